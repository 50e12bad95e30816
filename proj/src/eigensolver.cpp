#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include "flexspec/error.hpp"
#include "flexspec/fedosov.hpp"
#include "flexspec/shapes.hpp"
#include "flexspec/spectral.hpp"

namespace flexspec {
namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kResidualTol = 1e-8;

// Rows and columns of the free degrees of freedom.
SpMat restrict_to(const SpMat& a, const std::vector<int>& index) {
    std::vector<int> pos(static_cast<std::size_t>(a.rows()), -1);
    for (std::size_t k = 0; k < index.size(); ++k) pos[static_cast<std::size_t>(index[k])] = static_cast<int>(k);
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(static_cast<std::size_t>(a.nonZeros()));
    for (int col = 0; col < a.outerSize(); ++col) {
        const int c = pos[static_cast<std::size_t>(col)];
        if (c < 0) continue;
        for (SpMat::InnerIterator it(a, col); it; ++it) {
            const int r = pos[static_cast<std::size_t>(it.row())];
            if (r >= 0) t.emplace_back(r, c, it.value());
        }
    }
    const auto n = static_cast<Eigen::Index>(index.size());
    SpMat out(n, n);
    out.setFromTriplets(t.begin(), t.end());
    return out;
}

struct Pairs {
    std::vector<double> lambda;
    MatrixXd vectors;  // M-orthonormal columns
    std::vector<double> residual;
};

// Shift-invert Lanczos for the `want` eigenvalues of K u = lambda M u
// closest above sigma, in the M-orthogonal complement of `locked`.
class ShiftInvert {
public:
    ShiftInvert(const SpMat& k, const SpMat& m, double sigma) : k_(k), m_(m), sigma_(sigma) {
        solver_.compute(SpMat(k - sigma * m));
        if (solver_.info() != Eigen::Success) throw Error(ErrorKind::factorization_failure, "shifted stiffness matrix");
    }

    Pairs run(int want, const MatrixXd& locked, std::mt19937_64& rng) const {
        const Eigen::Index n = k_.rows();
        const Eigen::Index room = n - locked.cols();
        if (want > room) throw Error(ErrorKind::invalid_argument, "more eigenvalues requested than unknowns");
        const MatrixXd m_locked = m_ * locked;
        const Eigen::Index cap = std::min<Eigen::Index>(room, 8 * want + 200);
        const Eigen::Index chunk = std::max<Eigen::Index>(20, want / 2);

        MatrixXd q(n, std::min<Eigen::Index>(cap + 1, 2 * want + 60));
        MatrixXd mq(n, q.cols());
        std::vector<double> alpha, beta;

        const auto grow = [&](Eigen::Index cols) {
            if (cols <= q.cols()) return;
            const Eigen::Index c = std::min<Eigen::Index>(cap + 1, std::max(cols, q.cols() * 3 / 2));
            q.conservativeResize(Eigen::NoChange, c);
            mq.conservativeResize(Eigen::NoChange, c);
        };
        const auto orthogonalize = [&](VectorXd& w, Eigen::Index j) {
            for (int pass = 0; pass < 2; ++pass) {
                if (j > 0) w.noalias() -= q.leftCols(j) * (mq.leftCols(j).transpose() * w);
                if (locked.cols() > 0) w.noalias() -= locked * (m_locked.transpose() * w);
            }
        };
        const auto fresh = [&](Eigen::Index j) {
            std::normal_distribution<double> g;
            VectorXd w(n);
            for (Eigen::Index i = 0; i < n; ++i) w[i] = g(rng);
            orthogonalize(w, j);
            return VectorXd(w / std::sqrt(w.dot(m_ * w)));
        };

        q.col(0) = fresh(0);
        mq.col(0) = m_ * q.col(0);
        Eigen::Index next_check = std::min<Eigen::Index>(cap, want + chunk);
        for (Eigen::Index j = 0;; ++j) {
            VectorXd w = solver_.solve(mq.col(j));
            const double a = w.dot(mq.col(j));
            alpha.push_back(a);
            orthogonalize(w, j + 1);
            double b = std::sqrt(std::max(w.dot(m_ * w), 0.0));
            const Eigen::Index steps = j + 1;
            const bool breakdown = b <= 1e-13 * std::abs(a);
            if (steps == next_check || steps == cap) {
                Pairs p = ritz(alpha, beta, q, steps, want);
                bool ok = static_cast<int>(p.lambda.size()) >= want;
                for (int i = 0; ok && i < want; ++i) ok = p.residual[static_cast<std::size_t>(i)] < kResidualTol;
                if (ok) return p;
                if (steps == cap) throw Error(ErrorKind::no_convergence, "Lanczos budget exhausted");
                next_check = std::min<Eigen::Index>(cap, steps + chunk);
            }
            grow(steps + 1);
            if (breakdown) {
                // Invariant subspace found: continue with a new direction.
                b = 0.0;
                q.col(steps) = fresh(steps);
            } else {
                q.col(steps) = w / b;
            }
            beta.push_back(b);
            mq.col(steps) = m_ * q.col(steps);
        }
    }

    // Residual ||K u - lambda M u|| / ||M u|| of a pair.
    [[nodiscard]] double residual(const VectorXd& u, double lambda) const {
        const VectorXd mu = m_ * u;
        return (k_ * u - lambda * mu).norm() / mu.norm();
    }

private:
    Pairs ritz(const std::vector<double>& alpha, const std::vector<double>& beta, const MatrixXd& q, Eigen::Index m,
               int want) const {
        Eigen::VectorXd diag = Eigen::Map<const VectorXd>(alpha.data(), m);
        Eigen::VectorXd off = m > 1 ? VectorXd(Eigen::Map<const VectorXd>(beta.data(), m - 1)) : VectorXd();
        Eigen::SelfAdjointEigenSolver<MatrixXd> tri;
        tri.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
        // Largest theta <-> smallest lambda; keep only positive theta.
        const int take = std::min<int>(want, static_cast<int>(m));
        Pairs p;
        MatrixXd y(m, take);
        for (int i = 0; i < take; ++i) {
            const Eigen::Index col = m - 1 - i;
            const double theta = tri.eigenvalues()[col];
            if (theta <= 0.0) break;
            p.lambda.push_back(sigma_ + 1.0 / theta);
            y.col(i) = tri.eigenvectors().col(col);
        }
        const auto got = static_cast<Eigen::Index>(p.lambda.size());
        p.vectors = q.leftCols(m) * y.leftCols(got);
        for (Eigen::Index i = 0; i < got; ++i) {
            p.residual.push_back(residual(p.vectors.col(i), p.lambda[static_cast<std::size_t>(i)]));
        }
        return p;
    }

    const SpMat& k_;
    const SpMat& m_;
    double sigma_;
    Eigen::SimplicialLDLT<SpMat> solver_;
};

// Number of eigenvalues of K u = lambda M u below tau (Sylvester inertia).
int count_below(const SpMat& k, const SpMat& m, double tau) {
    Eigen::SimplicialLDLT<SpMat> ldlt(SpMat(k - tau * m));
    if (ldlt.info() != Eigen::Success) throw Error(ErrorKind::factorization_failure, "inertia count");
    return static_cast<int>((ldlt.vectorD().array() < 0.0).count());
}

std::vector<double> relative_spread(const std::vector<SweepRow>& rows, int n) {
    std::vector<double> out(static_cast<std::size_t>(n), 0.0);
    const SweepRow* first = nullptr;
    for (const auto& r : rows) {
        if (r.simple && !first) first = &r;
    }
    if (!first) return out;
    for (int i = 0; i < n; ++i) {
        double lo = first->eigenvalues[static_cast<std::size_t>(i)], hi = lo;
        for (const auto& r : rows) {
            if (!r.simple) continue;
            lo = std::min(lo, r.eigenvalues[static_cast<std::size_t>(i)]);
            hi = std::max(hi, r.eigenvalues[static_cast<std::size_t>(i)]);
        }
        const double ref = std::abs(first->eigenvalues[static_cast<std::size_t>(i)]);
        out[static_cast<std::size_t>(i)] = ref > 0.0 ? (hi - lo) / ref : hi - lo;
    }
    return out;
}

}  // namespace

Spectrum solve_eigs(const Mesh2D& mesh, BoundaryCondition bc, int n) {
    if (n < 1) throw Error(ErrorKind::invalid_argument, "at least one eigenvalue must be requested");
    const FemMatrices fem = assemble_p1(mesh);
    std::vector<int> free;
    for (int i = 0; i < mesh.node_count(); ++i) {
        if (bc == BoundaryCondition::neumann || !mesh.boundary[static_cast<std::size_t>(i)]) free.push_back(i);
    }
    if (static_cast<int>(free.size()) <= n + 2) throw Error(ErrorKind::invalid_argument, "mesh too coarse for n");
    const SpMat k = restrict_to(fem.stiffness, free);
    const SpMat m = restrict_to(fem.mass, free);

    // The shift lies below the spectrum, so K - sigma M is positive definite.
    const double sigma = -1.0 / mesh.area();
    const ShiftInvert op(k, m, sigma);
    std::mt19937_64 rng(0x5eed);

    // One extra pair separates lambda_n from lambda_{n+1} for the inertia check.
    const int want = n + 1;
    Pairs all = op.run(want, MatrixXd(k.rows(), 0), rng);
    for (int attempt = 0;; ++attempt) {
        std::vector<std::size_t> order(all.lambda.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return all.lambda[a] < all.lambda[b]; });
        const double tau = 0.5 * (all.lambda[order[static_cast<std::size_t>(n - 1)]] + all.lambda[order[static_cast<std::size_t>(n)]]);
        const int below = count_below(k, m, tau);
        if (below == n) {
            Spectrum s;
            s.bc = bc;
            s.h = mesh.h;
            s.nodes = mesh.node_count();
            for (int i = 0; i < n; ++i) {
                s.eigenvalues.push_back(all.lambda[order[static_cast<std::size_t>(i)]]);
                s.max_residual = std::max(s.max_residual, all.residual[order[static_cast<std::size_t>(i)]]);
            }
            return s;
        }
        if (below < n || attempt == 3) throw Error(ErrorKind::no_convergence, "inertia count disagrees with Lanczos");
        // Missed copies of clustered eigenvalues: search the complement of what was found.
        Pairs more = op.run(below - n + 1, all.vectors, rng);
        all.lambda.insert(all.lambda.end(), more.lambda.begin(), more.lambda.end());
        all.residual.insert(all.residual.end(), more.residual.begin(), more.residual.end());
        MatrixXd joined(all.vectors.rows(), all.vectors.cols() + more.vectors.cols());
        joined << all.vectors, more.vectors;
        all.vectors = std::move(joined);
    }
}

double trust_threshold(const Spectrum& spectrum) {
    if (spectrum.eigenvalues.empty()) return 0.0;
    return 0.8 * spectrum.eigenvalues.back();
}

int counting_function(const Spectrum& spectrum, double k) {
    if (k * k > trust_threshold(spectrum)) {
        throw Error(ErrorKind::untrusted_range, "k^2 above 0.8 of the largest computed eigenvalue");
    }
    const auto& ev = spectrum.eigenvalues;
    return static_cast<int>(std::upper_bound(ev.begin(), ev.end(), k * k) - ev.begin());
}

Spectrum richardson(const Spectrum& coarse, const Spectrum& fine) {
    Spectrum out = fine;
    const std::size_t n = std::min(coarse.eigenvalues.size(), fine.eigenvalues.size());
    out.eigenvalues.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.eigenvalues[i] = (4.0 * fine.eigenvalues[i] - coarse.eigenvalues[i]) / 3.0;
    std::sort(out.eigenvalues.begin(), out.eigenvalues.end());
    out.h = 0.0;
    return out;
}

TwoMeshSpectrum two_mesh_spectrum(const Eigen::Matrix2Xd& polygon, BoundaryCondition bc, double h, int n) {
    const Mesh2D coarse = triangulate(polygon, h);
    return {solve_eigs(coarse, bc, n), solve_eigs(refine_uniform(coarse), bc, n)};
}

SweepResult flex_spectrum_sweep(const FlexFamily& family, BoundaryCondition bc, double h, int n,
                                std::span<const double> parameters) {
    if (family.dimension() != 2) throw Error(ErrorKind::unsupported_dimension, "spectral sweep needs a planar family");
    FlexContext ctx(family);
    std::vector<Eigen::Matrix2Xd> polygons;
    SweepResult out;
    for (double s : parameters) {
        const FlexState st = ctx.state(s);
        SweepRow row;
        row.s = s;
        row.simple = is_embedded(family.surface(st.vertices));
        out.rows.push_back(row);
        // Facets (i, i+1) make the vertex order the boundary loop.
        polygons.emplace_back(st.vertices);
    }
    std::vector<std::future<TwoMeshSpectrum>> jobs;
    for (std::size_t i = 0; i < out.rows.size(); ++i) {
        if (!out.rows[i].simple) continue;
        jobs.push_back(std::async(std::launch::async, [&, i] { return two_mesh_spectrum(polygons[i], bc, h, n); }));
    }
    out.error_bar.assign(static_cast<std::size_t>(n), 0.0);
    std::size_t job = 0;
    for (auto& row : out.rows) {
        if (!row.simple) continue;
        const TwoMeshSpectrum sp = jobs[job++].get();
        row.eigenvalues = sp.fine.eigenvalues;
        for (int i = 0; i < n; ++i) {
            const double bar = std::abs(sp.coarse.eigenvalues[static_cast<std::size_t>(i)] - sp.fine.eigenvalues[static_cast<std::size_t>(i)]);
            row.error_bar.push_back(bar);
            out.error_bar[static_cast<std::size_t>(i)] = std::max(out.error_bar[static_cast<std::size_t>(i)], bar);
        }
    }
    out.variation = relative_spread(out.rows, n);
    return out;
}

SweepResult flex_spectrum_sweep(const FlexFamily& family, BoundaryCondition bc, double h, int n, int samples) {
    const std::vector<double> s = sample_parameters(samples);
    return flex_spectrum_sweep(family, bc, h, n, s);
}

CornerFit fit_corner_coefficient(double h, double k_lo, double k_hi, double lambda_cap) {
    if (!(k_lo > 0.0 && k_hi > k_lo && k_hi * k_hi < lambda_cap)) {
        throw Error(ErrorKind::invalid_argument, "fit window must satisfy 0 < k_lo < k_hi < sqrt(lambda_cap)");
    }
    Eigen::Matrix2Xd square(2, 4);
    square << 0, 1, 1, 0,
              0, 0, 1, 1;
    const SimplicialSurface boundary = polygon_surface(square);
    const FedosovCoefficients c = coefficients(boundary, BoundaryCondition::dirichlet);

    // Enough eigenvalues to pass lambda_cap, from the two-term Weyl count.
    const double kc = std::sqrt(lambda_cap);
    const int n = static_cast<int>(std::ceil(weyl_counting_prediction(boundary, BoundaryCondition::dirichlet, kc) + 2.0 * kc)) + 10;
    const TwoMeshSpectrum sp = two_mesh_spectrum(square, BoundaryCondition::dirichlet, h, n);
    const Spectrum ex = richardson(sp.coarse, sp.fine);
    if (ex.eigenvalues.back() < lambda_cap) throw Error(ErrorKind::no_convergence, "spectrum does not reach lambda_cap");

    CornerFit fit;
    fit.target = 0.5 * c.a_dm2;
    fit.eigenvalues = n;
    fit.lambda_max = ex.eigenvalues.back();
    // Two leading terms of the p = 2 expansion: a_2 k^4 / 12 + a_1 k^3 / 6.
    FedosovCoefficients lead = c;
    lead.a_dm2 = 0.0;
    double num = 0.0, den = 0.0;
    const int steps = 400;
    for (int i = 0; i <= steps; ++i) {
        const double k = k_lo + (k_hi - k_lo) * i / steps;
        const double rem = riesz_mean_empirical(ex, 2, k) - riesz_mean_prediction(lead, 2, k);
        fit.remainder.push_back({k, rem});
        num += rem * k * k;
        den += k * k * k * k;
    }
    fit.c = num / den;
    return fit;
}

}  // namespace flexspec
