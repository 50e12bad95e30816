#include "flexspec/flex.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "flexspec/error.hpp"

namespace flexspec {
namespace {

constexpr double kRankTol = 1e-8;        // singular values below this (relative) span the kernel
constexpr double kBranchTol = 1e-7;      // rank-drop detection along the path
constexpr int kMaxCorrectorIters = 8;
constexpr int kMaxBisections = 40;
constexpr int kMinSegments = 64;

// Facets containing every vertex of `ridge`, in facet order.
std::array<int, 2> ridge_facets(std::span<const Facet> facets, const std::vector<int>& ridge) {
    std::vector<int> found;
    for (int f = 0; f < static_cast<int>(facets.size()); ++f) {
        const Facet& facet = facets[static_cast<std::size_t>(f)];
        if (std::all_of(ridge.begin(), ridge.end(),
                        [&](int v) { return std::find(facet.begin(), facet.end(), v) != facet.end(); })) {
            found.push_back(f);
        }
    }
    if (found.size() != 2) throw Error(ErrorKind::invalid_argument, "driver ridge is not shared by two facets");
    return {found[0], found[1]};
}

Eigen::VectorXd attached_position(const Eigen::MatrixXd& base, const Attachment& a) {
    const auto d = base.rows();
    Eigen::MatrixXd frame(d, static_cast<Eigen::Index>(a.frame.size()));
    for (std::size_t j = 0; j < a.frame.size(); ++j) frame.col(static_cast<Eigen::Index>(j)) = base.col(a.frame[j]);
    Eigen::VectorXd p = frame.col(0);
    for (Eigen::Index j = 1; j < frame.cols(); ++j) p += a.weights[j] * (frame.col(j) - frame.col(0));
    if (a.offset != 0.0) p += a.offset * facet_normal(frame).normalized();
    return p;
}

double scale_of(const Eigen::MatrixXd& v) {
    const Eigen::VectorXd lo = v.rowwise().minCoeff(), hi = v.rowwise().maxCoeff();
    return std::max((hi - lo).norm(), 1e-300);
}

}  // namespace

void FlexFamily::init_edges() {
    std::set<std::array<int, 2>> edges;
    for (const Facet& f : facets_) {
        for (std::size_t i = 0; i < f.size(); ++i) {
            for (std::size_t j = i + 1; j < f.size(); ++j) edges.insert({std::min(f[i], f[j]), std::max(f[i], f[j])});
        }
    }
    edges_.assign(edges.begin(), edges.end());
    lengths_.clear();
    for (const auto& e : edges_) {
        const double len = (reference_.col(e[0]) - reference_.col(e[1])).norm();
        if (!(len > 0.0)) throw Error(ErrorKind::invalid_surface, "zero-length reference edge");
        lengths_.push_back(len);
    }
}

SimplicialSurface FlexFamily::surface(const Eigen::MatrixXd& vertices) const {
    return {dimension_, vertices, facets_};
}

double FlexFamily::edge_residual(const Eigen::MatrixXd& vertices) const {
    double worst = 0.0;
    for (std::size_t k = 0; k < edges_.size(); ++k) {
        const double len = (vertices.col(edges_[k][0]) - vertices.col(edges_[k][1])).norm();
        worst = std::max(worst, std::abs(len - lengths_[k]) / lengths_[k]);
    }
    return worst;
}

double FlexFamily::driver_value(const Eigen::MatrixXd& vertices) const {
    if (driver_.kind == Driver::Kind::coordinate) return vertices(driver_.axis, driver_.vertex);
    return dihedral_angle_between(vertices, facets_[static_cast<std::size_t>(driver_facets_[0])],
                                  facets_[static_cast<std::size_t>(driver_facets_[1])]);
}

FlexFamily FlexFamily::rigid(const SimplicialSurface& surface) {
    FlexFamily f;
    f.kind_ = FamilyKind::rigid;
    f.dimension_ = surface.dimension();
    f.facets_.assign(surface.facets().begin(), surface.facets().end());
    f.reference_ = surface.vertices();
    f.init_edges();
    return f;
}

FlexFamily FlexFamily::attached(std::shared_ptr<const FlexFamily> base, double s_begin, double s_end,
                                std::vector<Attachment> attachments, std::vector<Facet> facets) {
    if (!base) throw Error(ErrorKind::invalid_argument, "attached family needs a base");
    for (double s : {s_begin, s_end}) {
        if (!(s >= 0.0 && s <= 1.0)) throw Error(ErrorKind::invalid_argument, "base parameter outside [0, 1]");
    }
    FlexFamily f;
    f.kind_ = FamilyKind::attached;
    f.dimension_ = base->dimension();
    f.base_ = std::move(base);
    f.s_begin_ = s_begin;
    f.s_end_ = s_end;
    f.attachments_ = std::move(attachments);
    f.facets_ = std::move(facets);
    for (const Attachment& a : f.attachments_) {
        if (static_cast<int>(a.frame.size()) != f.dimension_ || a.weights.size() != f.dimension_) {
            throw Error(ErrorKind::invalid_argument, "attachment frame must have d vertices");
        }
        for (int v : a.frame) {
            if (v < 0 || v >= f.base_->vertex_count()) throw Error(ErrorKind::invalid_argument, "bad frame vertex");
        }
    }
    const Eigen::MatrixXd base_ref = advance_flex(*f.base_, s_begin).vertices;
    f.reference_.resize(f.dimension_, base_ref.cols() + static_cast<Eigen::Index>(f.attachments_.size()));
    f.reference_.leftCols(base_ref.cols()) = base_ref;
    for (std::size_t k = 0; k < f.attachments_.size(); ++k) {
        f.reference_.col(base_ref.cols() + static_cast<Eigen::Index>(k)) =
            attached_position(base_ref, f.attachments_[k]);
    }
    (void)f.reference_surface();  // validates the combinatorics
    f.init_edges();
    return f;
}

// ---------------------------------------------------------------------------
// Continuation

namespace {

struct Gauge {
    const FlexFamily* family = nullptr;
    std::vector<int> free;      // free vertex ids
    std::vector<int> slot;      // vertex -> index into free, or -1 if pinned
    std::vector<int> active;    // edge ids with at least one free endpoint
    double scale = 1.0;

    explicit Gauge(const FlexFamily& f) : family(&f) {
        const Facet& pinned = f.facets()[static_cast<std::size_t>(f.gauge_facet())];
        slot.assign(static_cast<std::size_t>(f.vertex_count()), -1);
        for (int v = 0; v < f.vertex_count(); ++v) {
            if (std::find(pinned.begin(), pinned.end(), v) == pinned.end()) {
                slot[static_cast<std::size_t>(v)] = static_cast<int>(free.size());
                free.push_back(v);
            }
        }
        for (int e = 0; e < static_cast<int>(f.edges().size()); ++e) {
            const auto& edge = f.edges()[static_cast<std::size_t>(e)];
            if (slot[static_cast<std::size_t>(edge[0])] >= 0 || slot[static_cast<std::size_t>(edge[1])] >= 0) {
                active.push_back(e);
            }
        }
        scale = scale_of(f.reference());
    }

    [[nodiscard]] Eigen::Index unknowns() const {
        return static_cast<Eigen::Index>(free.size()) * family->dimension();
    }

    [[nodiscard]] Eigen::VectorXd gather(const Eigen::MatrixXd& v) const {
        const int d = family->dimension();
        Eigen::VectorXd x(unknowns());
        for (std::size_t k = 0; k < free.size(); ++k) x.segment(static_cast<Eigen::Index>(k) * d, d) = v.col(free[k]);
        return x;
    }

    [[nodiscard]] Eigen::MatrixXd scatter(const Eigen::VectorXd& x) const {
        const int d = family->dimension();
        Eigen::MatrixXd v = family->reference();
        for (std::size_t k = 0; k < free.size(); ++k) v.col(free[k]) = x.segment(static_cast<Eigen::Index>(k) * d, d);
        return v;
    }

    // Scaled constraint values (|p_i - p_j|^2 - L^2) / (2L), one per active edge.
    [[nodiscard]] Eigen::VectorXd constraints(const Eigen::MatrixXd& v) const {
        Eigen::VectorXd c(static_cast<Eigen::Index>(active.size()));
        for (std::size_t r = 0; r < active.size(); ++r) {
            const auto e = static_cast<std::size_t>(active[r]);
            const auto& edge = family->edges()[e];
            const double len = family->edge_lengths()[e];
            c[static_cast<Eigen::Index>(r)] =
                ((v.col(edge[0]) - v.col(edge[1])).squaredNorm() - len * len) / (2.0 * len);
        }
        return c;
    }

    [[nodiscard]] Eigen::MatrixXd jacobian(const Eigen::MatrixXd& v) const {
        const int d = family->dimension();
        Eigen::MatrixXd j = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(active.size()), unknowns());
        for (std::size_t r = 0; r < active.size(); ++r) {
            const auto e = static_cast<std::size_t>(active[r]);
            const auto& edge = family->edges()[e];
            const Eigen::VectorXd g = (v.col(edge[0]) - v.col(edge[1])) / family->edge_lengths()[e];
            const int a = slot[static_cast<std::size_t>(edge[0])], b = slot[static_cast<std::size_t>(edge[1])];
            if (a >= 0) j.row(static_cast<Eigen::Index>(r)).segment(a * d, d) += g.transpose();
            if (b >= 0) j.row(static_cast<Eigen::Index>(r)).segment(b * d, d) -= g.transpose();
        }
        return j;
    }

    [[nodiscard]] double driver(const Eigen::VectorXd& x) const { return family->driver_value(scatter(x)); }

    [[nodiscard]] Eigen::VectorXd driver_gradient(const Eigen::VectorXd& x) const {
        const double h = 1e-6 * scale;
        Eigen::VectorXd g(x.size());
        Eigen::VectorXd y = x;
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            y[i] = x[i] + h;
            const double up = driver(y);
            y[i] = x[i] - h;
            const double down = driver(y);
            y[i] = x[i];
            g[i] = (up - down) / (2.0 * h);
        }
        return g;
    }

    // Orthonormal basis of the numerical kernel of the constraint Jacobian.
    [[nodiscard]] Eigen::MatrixXd kernel(const Eigen::VectorXd& x, double tol, int* rank_deficiency = nullptr) const {
        const Eigen::MatrixXd j = jacobian(scatter(x));
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(j, Eigen::ComputeFullV);
        const Eigen::VectorXd& sv = svd.singularValues();
        const double top = sv.size() > 0 ? sv[0] : 1.0;
        Eigen::Index rank = 0;
        for (Eigen::Index i = 0; i < sv.size(); ++i) {
            if (sv[i] > tol * top) ++rank;
        }
        const Eigen::Index dim = x.size() - rank;
        if (rank_deficiency) *rank_deficiency = static_cast<int>(dim);
        return svd.matrixV().rightCols(dim);
    }

    // Gauss-Newton on [constraints; driver - target] with minimum-norm steps.
    // Returns the iteration count, or -1 on failure.
    int correct(Eigen::VectorXd& x, double target) const {
        const auto m = static_cast<Eigen::Index>(active.size());
        for (int it = 0; it <= kMaxCorrectorIters + 4; ++it) {
            const Eigen::MatrixXd v = scatter(x);
            Eigen::VectorXd r(m + 1);
            r.head(m) = constraints(v);
            r[m] = family->driver_value(v) - target;
            double worst = 0.0;
            for (Eigen::Index k = 0; k < m; ++k) {
                worst = std::max(worst, std::abs(r[k]) / family->edge_lengths()[static_cast<std::size_t>(active[static_cast<std::size_t>(k)])]);
            }
            if (worst < 1e-14 && std::abs(r[m]) < 1e-13) return it;
            if (it == kMaxCorrectorIters + 4) break;
            Eigen::MatrixXd j(m + 1, x.size());
            j.topRows(m) = jacobian(v);
            j.row(m) = driver_gradient(x).transpose();
            x -= j.completeOrthogonalDecomposition().solve(r);
            if (!x.allFinite()) return -1;
        }
        return -1;
    }
};

}  // namespace

FlexFamily FlexFamily::continuation(const SimplicialSurface& reference, Driver driver, double driver_end,
                                    int gauge_facet) {
    FlexFamily f;
    f.kind_ = FamilyKind::continuation;
    f.dimension_ = reference.dimension();
    f.facets_.assign(reference.facets().begin(), reference.facets().end());
    f.reference_ = reference.vertices();
    if (gauge_facet < 0 || gauge_facet >= reference.facet_count()) {
        throw Error(ErrorKind::invalid_argument, "gauge facet out of range");
    }
    f.gauge_facet_ = gauge_facet;
    f.driver_ = std::move(driver);
    if (f.driver_.kind == Driver::Kind::ridge_angle) {
        if (static_cast<int>(f.driver_.ridge.size()) != f.dimension_ - 1) {
            throw Error(ErrorKind::invalid_argument, "driver ridge must have d-1 vertices");
        }
        f.driver_facets_ = ridge_facets(f.facets_, f.driver_.ridge);
    } else if (f.driver_.vertex < 0 || f.driver_.vertex >= f.vertex_count() || f.driver_.axis < 0 ||
               f.driver_.axis >= f.dimension_) {
        throw Error(ErrorKind::invalid_argument, "driver coordinate out of range");
    }
    f.init_edges();
    f.driver_begin_ = f.driver_value(f.reference_);
    f.driver_end_ = driver_end;

    const Gauge gauge(f);
    int corank = 0;
    (void)gauge.kernel(gauge.gather(f.reference_), kRankTol, &corank);
    if (corank < 1) throw Error(ErrorKind::not_flexible, "constraint Jacobian has no kernel beyond rigid motions");
    f.corank_ = corank;
    return f;
}

struct FlexContext::Impl {
    const FlexFamily& family;
    std::unique_ptr<Gauge> gauge;
    std::vector<PathNode> nodes;
    bool traced = false;
    bool branch = false;
    std::unique_ptr<FlexContext> base;

    explicit Impl(const FlexFamily& f) : family(f) {
        if (f.kind() == FamilyKind::continuation) gauge = std::make_unique<Gauge>(f);
        if (f.kind() == FamilyKind::attached) base = std::make_unique<FlexContext>(*f.base());
    }

    void trace() {
        if (traced) return;
        traced = true;
        const Gauge& g = *gauge;
        const double t0 = family.driver_begin(), t1 = family.driver_end();
        const double span = t1 - t0;
        Eigen::VectorXd x = g.gather(family.reference());
        nodes.push_back({t0, 0.0, 0.0, 0.0, x});
        if (span == 0.0) return;

        const double max_step = std::abs(span) / kMinSegments;
        double step = max_step;
        double tau = t0;
        int halvings = 0;
        while (std::abs(t1 - tau) > 0.0) {
            const double remaining = t1 - tau;
            const double dt = std::copysign(std::min(step, std::abs(remaining)), span);
            const double target = std::abs(remaining) <= step ? t1 : tau + dt;

            const Eigen::MatrixXd basis = g.kernel(x, kRankTol);
            const Eigen::VectorXd grad = g.driver_gradient(x);
            const Eigen::VectorXd proj = basis * (basis.transpose() * grad);
            const double rate = grad.dot(proj);
            if (!(rate > 1e-14)) {
                throw Error(ErrorKind::continuation_failure, "driver is stationary on the constraint manifold");
            }
            const Eigen::VectorXd dxdt = proj / rate;
            const Eigen::VectorXd predicted = x + (target - tau) * dxdt;
            Eigen::VectorXd y = predicted;
            const int iters = g.correct(y, target);
            const double predictor_len = ((target - tau) * dxdt).norm();
            const bool ok = iters >= 0 && iters <= kMaxCorrectorIters && (y - predicted).norm() <= predictor_len + 1e-12 * g.scale;
            if (!ok) {
                step *= 0.5;
                if (++halvings > kMaxBisections) {
                    throw Error(ErrorKind::continuation_failure, "corrector failed after 40 step bisections");
                }
                continue;
            }
            halvings = 0;
            const double chord = (y - x).norm();
            x = y;
            tau = target;
            nodes.push_back({tau, nodes.back().arclength + chord, target - nodes.back().driver, dxdt.norm(), x});
            if (iters <= 3) step = std::min(step * 1.5, max_step);

            int deficiency = 0;
            (void)g.kernel(x, kBranchTol, &deficiency);
            if (deficiency > family.corank()) {
                branch = true;
                break;
            }
        }
    }

    FlexState continuation_state(double s) {
        trace();
        FlexState out;
        out.s = s;
        out.branch_point = branch;
        const double total = nodes.back().arclength;
        if (s == 0.0 || total == 0.0) {
            out.vertices = family.reference();
            return out;
        }
        const double want = s * total;
        auto it = std::lower_bound(nodes.begin(), nodes.end(), want,
                                   [](const PathNode& n, double v) { return n.arclength < v; });
        if (it == nodes.begin()) ++it;
        if (it == nodes.end()) --it;
        const PathNode& hi = *it;
        const PathNode& lo = *(it - 1);
        const double alpha = std::clamp((want - lo.arclength) / (hi.arclength - lo.arclength), 0.0, 1.0);
        if (alpha == 1.0) {
            out.vertices = gauge->scatter(hi.x);
        } else {
            Eigen::VectorXd x = (1.0 - alpha) * lo.x + alpha * hi.x;
            const double target = lo.driver + alpha * (hi.driver - lo.driver);
            if (gauge->correct(x, target) < 0) {
                throw Error(ErrorKind::continuation_failure, "corrector failed while evaluating a cached path");
            }
            out.vertices = gauge->scatter(x);
        }
        out.residual = family.edge_residual(out.vertices);
        return out;
    }

    FlexState attached_state(double s) {
        const double sb = family.s_begin() + (family.s_end() - family.s_begin()) * s;
        const FlexState bs = base->state(sb);
        FlexState out;
        out.s = s;
        out.branch_point = bs.branch_point;
        out.vertices.resize(family.dimension(), family.vertex_count());
        out.vertices.leftCols(bs.vertices.cols()) = bs.vertices;
        for (std::size_t k = 0; k < family.attachments().size(); ++k) {
            out.vertices.col(bs.vertices.cols() + static_cast<Eigen::Index>(k)) =
                attached_position(bs.vertices, family.attachments()[k]);
        }
        out.residual = family.edge_residual(out.vertices);
        return out;
    }
};

FlexContext::FlexContext(const FlexFamily& family) : impl_(std::make_unique<Impl>(family)) {}
FlexContext::~FlexContext() = default;

FlexState FlexContext::state(double s) {
    if (!(s >= 0.0 && s <= 1.0)) throw Error(ErrorKind::invalid_argument, "flex parameter outside [0, 1]");
    const FlexFamily& f = impl_->family;
    if (s == 0.0 || f.kind() == FamilyKind::rigid) {
        FlexState out;
        out.s = s;
        out.vertices = f.reference();
        return out;
    }
    if (f.kind() == FamilyKind::continuation) return impl_->continuation_state(s);
    return impl_->attached_state(s);
}

const std::vector<PathNode>& FlexContext::path() {
    if (impl_->family.kind() == FamilyKind::continuation) impl_->trace();
    return impl_->nodes;
}

FlexState advance_flex(const FlexFamily& family, double s) {
    FlexContext ctx(family);
    return ctx.state(s);
}

std::vector<double> sample_parameters(int n, double s_max) {
    if (n < 2) throw Error(ErrorKind::invalid_argument, "need at least two samples");
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = s_max * i / (n - 1);
    return out;
}

bool check_congruence(const FlexState& a, const FlexState& b) {
    if (a.vertices.rows() != b.vertices.rows() || a.vertices.cols() != b.vertices.cols()) return false;
    const auto n = a.vertices.cols();
    double worst = 0.0, largest = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double da = (a.vertices.col(i) - a.vertices.col(j)).norm();
            const double db = (b.vertices.col(i) - b.vertices.col(j)).norm();
            worst = std::max(worst, std::abs(da - db));
            largest = std::max({largest, da, db});
        }
    }
    return worst <= 1e-8 * largest;
}

}  // namespace flexspec
