#include "flexspec/tent.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <set>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include "flexspec/error.hpp"
#include "flexspec/predicates.hpp"

namespace flexspec {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kAngleTol = 1e-9;

// Facet list rotated so that it starts at `first`.
Facet rotated(const Facet& f, int first) {
    const auto it = std::find(f.begin(), f.end(), first);
    Facet out(it, f.end());
    out.insert(out.end(), f.begin(), it);
    return out;
}

// The two facets at a ridge, as indices into the facet list.
std::array<int, 2> ridge_facets(const SimplicialSurface& s, const std::vector<int>& ridge) {
    std::set<int> want(ridge.begin(), ridge.end());
    for (const Ridge& r : s.ridges()) {
        if (std::set<int>(r.vertices.begin(), r.vertices.end()) == want) return r.facets;
    }
    throw Error(ErrorKind::invalid_argument, "vertex set is not a ridge of the surface");
}

double ridge_angle(const Eigen::MatrixXd& v, const SimplicialSurface& s, const std::array<int, 2>& facets) {
    return dihedral_angle_between(v, s.facet(facets[0]), s.facet(facets[1]));
}

double max_displacement(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return (a - b).colwise().norm().maxCoeff();
}

double segment_distance(const Eigen::Vector3d& p1, const Eigen::Vector3d& q1, const Eigen::Vector3d& p2,
                        const Eigen::Vector3d& q2) {
    const Eigen::Vector3d d1 = q1 - p1, d2 = q2 - p2, r = p1 - p2;
    const double a = d1.squaredNorm(), e = d2.squaredNorm(), f = d2.dot(r);
    const double c = d1.dot(r), b = d1.dot(d2);
    const double denom = a * e - b * b;
    double s = denom > 1e-300 ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
    double t = (b * s + f) / e;
    if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
    } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
    }
    return (p1 + s * d1 - p2 - t * d2).norm();
}

// Distance between closed triangles (columns are vertices).
double triangle_distance(const Eigen::Matrix3d& t1, const Eigen::Matrix3d& t2) {
    if (triangles_intersect(t1, t2)) return 0.0;
    double best = 1e300;
    for (int i = 0; i < 3; ++i) {
        best = std::min(best, point_simplex_distance(t1.col(i), t2));
        best = std::min(best, point_simplex_distance(t2.col(i), t1));
        for (int j = 0; j < 3; ++j) {
            best = std::min(best, segment_distance(t1.col(i), t1.col((i + 1) % 3), t2.col(j), t2.col((j + 1) % 3)));
        }
    }
    return best;
}

Eigen::Matrix3d triangle(const Eigen::MatrixXd& v, const std::array<int, 3>& ids) {
    Eigen::Matrix3d t;
    for (int i = 0; i < 3; ++i) t.col(i) = v.col(ids[static_cast<std::size_t>(i)]);
    return t;
}

// Side faces of a tent, oriented for the modified surface.
std::array<Facet, 3> tent_sides(const Tent& t) {
    const auto [p, q, m] = t.simplex;
    return {Facet{p, q, t.apex}, Facet{q, m, t.apex}, Facet{m, p, t.apex}};
}

// Interior angle of the tent tetrahedron at its first base edge.
double tent_angle(const Eigen::MatrixXd& v, const Tent& t) {
    const auto [p, q, m] = t.simplex;
    return dihedral_angle_between(v, Facet{p, q, m}, Facet{q, p, t.apex});
}

// Frame coordinates of x relative to a triangle: weights and normal offset.
Attachment frame_of(const Eigen::MatrixXd& v, const Facet& frame, const Eigen::Vector3d& x) {
    const Eigen::Vector3d a = v.col(frame[0]), b = v.col(frame[1]), c = v.col(frame[2]);
    const Eigen::Vector3d n = (b - a).cross(c - a).normalized();
    Attachment out;
    out.frame = frame;
    out.offset = (x - a).dot(n);
    Eigen::Matrix<double, 3, 2> basis;
    basis << b - a, c - a;
    const Eigen::Vector2d w = basis.colPivHouseholderQr().solve(x - a - out.offset * n);
    out.weights = Eigen::Vector3d(1.0 - w.sum(), w.x(), w.y());
    return out;
}

Eigen::Vector3d frame_point(const Eigen::MatrixXd& v, const Attachment& a) {
    Eigen::Vector3d p = v.col(a.frame[0]);
    for (int j = 1; j < 3; ++j) p += a.weights[j] * (v.col(a.frame[static_cast<std::size_t>(j)]) - v.col(a.frame[0]));
    if (a.offset != 0.0) {
        const Eigen::Vector3d n =
            (Eigen::Vector3d(v.col(a.frame[1]) - v.col(a.frame[0])))
                .cross(Eigen::Vector3d(v.col(a.frame[2]) - v.col(a.frame[0])))
                .normalized();
        p += a.offset * n;
    }
    return p;
}

bool tent_present(const FlexFamily& modified, const TentSpec& spec) {
    if (modified.kind() != FamilyKind::attached || modified.dimension() != 3) return false;
    const int n = modified.vertex_count();
    for (int id : {spec.y.apex, spec.z.apex, spec.sub_ridge[0], spec.sub_ridge[1]}) {
        if (id < 0 || id >= n) return false;
    }
    std::set<Facet> have;
    for (const Facet& f : modified.facets()) have.insert(rotated(f, *std::min_element(f.begin(), f.end())));
    for (const Tent* t : {&spec.y, &spec.z}) {
        for (const Facet& side : tent_sides(*t)) {
            if (!have.count(rotated(side, *std::min_element(side.begin(), side.end())))) return false;
        }
    }
    return true;
}

}  // namespace

RidgeProfile select_variable_ridge(const FlexFamily& family, double delta, int samples) {
    if (!(delta > 0.0 && delta <= 1.0) || samples < 2) throw Error(ErrorKind::invalid_argument, "bad sampling window");
    const SimplicialSurface ref = family.reference_surface();
    if (!is_embedded(ref)) throw Error(ErrorKind::invalid_domain, "reference state is not embedded");

    FlexContext ctx(family);
    const auto ridges = ref.ridges();
    std::vector<std::vector<double>> angles(ridges.size());
    std::vector<double> ts;
    for (int i = 0; i < samples; ++i) {
        const double t = delta * i / (samples - 1);
        ts.push_back(t);
        const Eigen::MatrixXd v = ctx.state(t).vertices;
        for (std::size_t r = 0; r < ridges.size(); ++r) angles[r].push_back(ridge_angle(v, ref, ridges[r].facets));
    }
    std::vector<double> spread(ridges.size());
    for (std::size_t r = 0; r < ridges.size(); ++r) {
        const auto [lo, hi] = std::minmax_element(angles[r].begin(), angles[r].end());
        spread[r] = *hi - *lo;
    }
    std::size_t best = static_cast<std::size_t>(std::max_element(spread.begin(), spread.end()) - spread.begin());
    if (spread[best] < kAngleTol) throw Error(ErrorKind::not_flexible, "every dihedral angle is constant");

    if (family.kind() == FamilyKind::continuation && family.driver().kind == Driver::Kind::ridge_angle) {
        const std::set<int> drv(family.driver().ridge.begin(), family.driver().ridge.end());
        for (std::size_t r = 0; r < ridges.size(); ++r) {
            if (std::set<int>(ridges[r].vertices.begin(), ridges[r].vertices.end()) == drv &&
                spread[r] >= spread[best] * (1.0 - 1e-6)) {
                best = r;
            }
        }
    }
    return {ridges[best].vertices, std::move(ts), std::move(angles[best])};
}

PhiStar compute_phi_star(const std::function<double(double)>& angle, const std::function<double(double)>& drift,
                         double delta, double drift_limit) {
    if (!(delta > 0.0) || !(drift_limit > 0.0)) throw Error(ErrorKind::invalid_argument, "delta and drift limit > 0");
    constexpr int kSamples = 10000;
    const double margin = 1e-12;
    const auto grid = [&](int i) { return delta * i / kSamples; };

    // Largest parameter with drift below the limit.
    double t_lim = delta;
    for (int i = 1; i <= kSamples; ++i) {
        if (drift(grid(i)) >= drift_limit) {
            double lo = grid(i - 1), hi = grid(i);
            while (hi - lo > 1e-12) {
                const double mid = 0.5 * (lo + hi);
                (drift(mid) < drift_limit ? lo : hi) = mid;
            }
            t_lim = lo;
            break;
        }
    }
    if (t_lim <= 0.0) throw Error(ErrorKind::resolution_exhausted, "drift limit reached at t = 0");

    std::vector<double> ts;
    for (int i = 0; i <= kSamples && grid(i) < t_lim; ++i) ts.push_back(grid(i));
    ts.push_back(t_lim);
    std::vector<double> phi(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) phi[i] = angle(ts[i]);

    PhiStar out;
    if (ts.size() > 1 && phi[1] > phi[0] + margin) {
        // t = 0 is a limit point of the set where the angle exceeds its start.
        std::size_t k = 1;
        while (k + 1 < ts.size() && phi[k + 1] > phi[0] + margin) ++k;
        out.phi_star = phi[0];
        out.t_star = 0.0;
        out.t_begin = ts[k];
        out.t_end = 0.0;
        out.increasing = true;
        return out;
    }
    // Otherwise t* is the last strict running minimum within the drift limit.
    double run_min = phi[0];
    std::size_t star = 0;
    for (std::size_t i = 1; i < ts.size(); ++i) {
        if (phi[i] < run_min - margin) star = i;
        run_min = std::min(run_min, phi[i]);
    }
    if (star == 0) throw Error(ErrorKind::resolution_exhausted, "no sign-definite interval at sampling resolution");
    out.phi_star = phi[star];
    out.t_star = ts[star];
    out.t_begin = 0.0;
    out.t_end = ts[star];
    out.increasing = false;
    return out;
}

PhiStar compute_phi_star(const FlexFamily& family, const RidgeProfile& ridge, double epsilon, double delta) {
    if (!(epsilon > 0.0)) throw Error(ErrorKind::invalid_argument, "epsilon must be positive");
    const SimplicialSurface ref = family.reference_surface();
    const auto facets = ridge_facets(ref, ridge.ridge);
    FlexContext ctx(family);
    std::map<double, Eigen::MatrixXd> cache;
    const auto at = [&](double t) -> const Eigen::MatrixXd& {
        auto it = cache.find(t);
        if (it == cache.end()) it = cache.emplace(t, ctx.state(t).vertices).first;
        return it->second;
    };
    const auto angle = [&](double t) { return ridge_angle(at(t), ref, facets); };
    const auto drift = [&](double t) { return max_displacement(at(t), family.reference()); };
    return compute_phi_star(angle, drift, delta, epsilon / 3.0);
}

TentSpec make_tent_spec(const FlexFamily& family, double epsilon, double delta) {
    if (!(epsilon > 0.0)) throw Error(ErrorKind::invalid_argument, "epsilon must be positive");
    const RidgeProfile profile = select_variable_ridge(family, delta);
    const PhiStar ps = compute_phi_star(family, profile, epsilon, delta);
    TentSpec spec;
    spec.ridge = profile.ridge;
    spec.phi_star = ps.phi_star;
    spec.epsilon = epsilon;
    spec.t_begin = ps.t_begin;
    spec.t_end = ps.t_end;
    return spec;
}

TentedFamily subdivide_and_tent(const FlexFamily& family, const TentSpec& input, int samples) {
    if (family.dimension() != 3) throw Error(ErrorKind::unsupported_dimension, "tents are built for d = 3");
    if (!(input.epsilon > 0.0)) throw Error(ErrorKind::invalid_argument, "epsilon must be positive");
    if (!(input.phi_star > 0.0 && input.phi_star < kTwoPi)) {
        throw Error(ErrorKind::invalid_argument, "phi* must lie in (0, 2 pi)");
    }
    if (input.ridge.size() != 2) throw Error(ErrorKind::invalid_argument, "ridge must be an edge");

    const Eigen::MatrixXd v0 = advance_flex(family, input.t_begin).vertices;
    const SimplicialSurface s0 = family.surface(v0);
    const auto [fy, fz] = ridge_facets(s0, input.ridge);
    // Y runs a -> b, Z runs b -> a.
    Facet Y = s0.facet(fy), Z = s0.facet(fz);
    int a = input.ridge[0], b = input.ridge[1];
    Y = rotated(Y, a);
    if (Y[1] != b) {
        std::swap(a, b);
        Y = rotated(s0.facet(fy), a);
    }
    Z = rotated(Z, b);
    const int c = Y[2], e = Z[2];

    const int n = family.vertex_count();
    const int p = n, q = n + 1, my = n + 2, mz = n + 3, vy = n + 4, vz = n + 5;
    const double theta = 0.5 * input.phi_star;

    const Eigen::Vector3d A = v0.col(a), B = v0.col(b), C = v0.col(c), E = v0.col(e);
    const Eigen::Vector3d mid = 0.5 * (A + B);
    const Eigen::Vector3d axis = (B - A).normalized();
    const auto across = [&](const Eigen::Vector3d& x) {
        const Eigen::Vector3d w = x - mid;
        return Eigen::Vector3d((w - w.dot(axis) * axis).normalized());
    };
    const Eigen::Vector3d uy = across(C), uz = across(E);
    const Eigen::Vector3d ny = (B - A).cross(C - A).normalized(), nz = (A - B).cross(E - B).normalized();
    const double r0 = std::min(input.epsilon / 4.0, 0.25 * (B - A).norm());

    std::vector<Facet> base_facets;
    for (int i = 0; i < s0.facet_count(); ++i) {
        if (i != fy && i != fz) base_facets.push_back(s0.facet(i));
    }

    std::string reason = "search budget";
    double scale = 1.0;
    for (int attempt = 0; attempt < 40; ++attempt, scale *= 0.5) {
        TentSpec spec = input;
        spec.scale = scale;
        spec.sub_ridge = {p, q};

        std::vector<Attachment> att(6);
        const double lo = 0.5 - 0.25 * scale, hi = 0.5 + 0.25 * scale;
        att[0] = {{a, b, c}, Eigen::Vector3d(1.0 - lo, lo, 0.0), 0.0};
        att[1] = {{a, b, c}, Eigen::Vector3d(1.0 - hi, hi, 0.0), 0.0};
        const double along = 0.5 * (1.0 - 0.5 * scale), up = 0.5 * scale;
        att[2] = {{a, b, c}, Eigen::Vector3d(1.0 - along - up, along, up), 0.0};
        att[3] = {{b, a, e}, Eigen::Vector3d(1.0 - along - up, along, up), 0.0};
        const double r = r0 * scale;
        const Eigen::Vector3d apex_y = mid + r * (std::cos(theta) * uy - std::sin(theta) * ny);
        const Eigen::Vector3d apex_z = mid + r * (std::cos(theta) * uz - std::sin(theta) * nz);
        att[4] = frame_of(v0, {a, b, c}, apex_y);
        att[5] = frame_of(v0, {b, a, e}, apex_z);

        spec.y = {fy, {p, q, my}, vy, att[4], theta};
        spec.z = {fz, {q, p, mz}, vz, att[5], theta};

        std::vector<Facet> sub = base_facets;
        for (const Facet& f : {Facet{a, p, my}, Facet{p, q, my}, Facet{q, b, my}, Facet{b, c, my}, Facet{c, a, my},
                               Facet{b, q, mz}, Facet{q, p, mz}, Facet{p, a, mz}, Facet{a, e, mz}, Facet{e, b, mz}}) {
            sub.push_back(f);
        }
        spec.subdivision = sub;

        std::vector<Facet> facets = base_facets;
        for (const Facet& f : sub) {
            if (f == Facet{p, q, my} || f == Facet{q, p, mz}) continue;
            if (std::find(base_facets.begin(), base_facets.end(), f) == base_facets.end()) facets.push_back(f);
        }
        for (const Tent* t : {&spec.y, &spec.z}) {
            for (const Facet& side : tent_sides(*t)) facets.push_back(side);
        }

        // Sub-facet clearance from the rest of the surface.
        Eigen::MatrixXd vx(3, n + 6);
        vx.leftCols(n) = v0;
        for (int k = 0; k < 6; ++k) vx.col(n + k) = frame_point(v0, att[static_cast<std::size_t>(k)]);
        double clearance = 1e300;
        for (const Facet& o : base_facets) {
            const Eigen::Matrix3d to = triangle(v0, {o[0], o[1], o[2]});
            clearance = std::min(clearance, triangle_distance(triangle(vx, spec.y.simplex), to));
            clearance = std::min(clearance, triangle_distance(triangle(vx, spec.z.simplex), to));
        }
        if (clearance < input.epsilon / 10.0) {
            reason = "sub-facet clearance";
            continue;
        }

        try {
            FlexFamily modified = FlexFamily::attached(std::make_shared<const FlexFamily>(family), input.t_begin,
                                                       input.t_end, att, facets);
            const SigmaReport report = verify_sigma_conditions(modified, spec, samples);
            reason.clear();
            for (const SigmaRow& row : report.rows) {
                if (!row.apex_inside) reason = "apex interiority";
                else if (!row.tents_clear) reason = "tent clearance";
                else if (!row.angle_sum_ok) reason = "angle sum";
                else if (!row.hausdorff_ok) reason = "tent Hausdorff bound";
                else if (!row.embedded) reason = "embeddedness";
                if (!reason.empty()) break;
            }
            if (reason.empty() && !report.subdivision_ok) reason = "subdivision";
            if (reason.empty() && !(report.hausdorff_to_start < input.epsilon)) reason = "Hausdorff budget";
            if (reason.empty()) return {std::move(modified), std::move(spec)};
        } catch (const Error& err) {
            reason = err.what();
        }
    }
    throw Error(ErrorKind::construction_failure, "no tent placement found: " + reason);
}

bool SigmaReport::all_pass() const {
    if (!subdivision_ok || rows.empty()) return false;
    return std::all_of(rows.begin(), rows.end(), [](const SigmaRow& r) {
        return r.apex_inside && r.tents_clear && r.angle_sum_ok && r.hausdorff_ok && r.embedded;
    });
}

SigmaReport verify_sigma_conditions(const FlexFamily& modified, const TentSpec& spec, int samples) {
    if (!(spec.epsilon > 0.0)) throw Error(ErrorKind::invalid_argument, "epsilon must be positive");
    if (samples < 2) throw Error(ErrorKind::invalid_argument, "at least two samples");
    const std::vector<double> params = sample_parameters(samples);
    SigmaReport report;
    if (!tent_present(modified, spec)) {
        for (double s : params) {
            SigmaRow row;
            row.s = s;
            row.angle_sum_residual = std::numeric_limits<double>::infinity();
            report.rows.push_back(row);
        }
        report.hausdorff_to_start = std::numeric_limits<double>::infinity();
        return report;
    }

    const FlexFamily& base = *modified.base();
    const int nb = base.vertex_count();
    const SimplicialSurface base_ref = base.reference_surface();
    const auto ridge_f = ridge_facets(base_ref, spec.ridge);
    const Facet pq_y{spec.sub_ridge[0], spec.sub_ridge[1], spec.y.apex};
    const Facet pq_z{spec.sub_ridge[1], spec.sub_ridge[0], spec.z.apex};
    const std::set<int> sub_ridge{spec.sub_ridge[0], spec.sub_ridge[1]};

    // Tents against P'_0: sup distance of their sides from the surface.
    const Eigen::MatrixXd m0 = modified.reference();
    {
        const SimplicialSurface p0 = base.surface(m0.leftCols(nb));
        std::vector<Eigen::MatrixXd> from, to;
        for (const Tent* t : {&spec.y, &spec.z}) {
            for (const Facet& side : tent_sides(*t)) from.push_back(triangle(m0, {side[0], side[1], side[2]}));
        }
        for (int i = 0; i < p0.facet_count(); ++i) to.push_back(p0.facet_points(i));
        const double bound = directed_hausdorff(from, to, 1e-9 * p0.diameter());
        for (double s : params) {
            SigmaRow row;
            row.s = s;
            row.hausdorff_bound = bound;
            row.hausdorff_ok = bound < spec.epsilon / 3.0;
            report.rows.push_back(row);
        }
        const SimplicialSurface sub0(3, m0.leftCols(spec.y.apex < spec.z.apex ? spec.y.apex : spec.z.apex),
                                     spec.subdivision);
        report.subdivision_ok = is_subdivision(p0, sub0);
        report.hausdorff_to_start = hausdorff_distance(modified.reference_surface(), base.reference_surface());
    }

    FlexContext ctx(modified);
    for (SigmaRow& row : report.rows) {
        const Eigen::MatrixXd v = ctx.state(row.s).vertices;
        const SimplicialSurface prime = base.surface(v.leftCols(nb));
        const SimplicialSurface tilde = modified.surface(v);

        row.apex_inside = winding_number(prime, v.col(spec.y.apex)) > 0.5 &&
                          winding_number(prime, v.col(spec.z.apex)) > 0.5;

        bool clear = true;
        for (const Tent* t : {&spec.y, &spec.z}) {
            for (const Facet& side : tent_sides(*t)) {
                const Eigen::Matrix3d ps = triangle(v, {side[0], side[1], side[2]});
                for (const Facet& f : spec.subdivision) {
                    if (facets_clash(side, ps, f, triangle(v, {f[0], f[1], f[2]}))) clear = false;
                }
            }
        }
        row.tents_clear = clear;

        row.angle_sum_residual = tent_angle(v, spec.y) + tent_angle(v, spec.z) - spec.phi_star;
        row.angle_sum_ok = std::abs(row.angle_sum_residual) < kAngleTol;
        row.embedded = is_embedded(tilde);

        row.phi_ridge = dihedral_angle_between(v, base_ref.facet(ridge_f[0]), base_ref.facet(ridge_f[1]));
        row.phi_tilde = dihedral_angle_between(v, pq_y, pq_z);
        row.bookkeeping_residual = std::abs(row.phi_tilde - (row.phi_ridge - spec.phi_star));

        row.other_min = kTwoPi;
        row.other_max = 0.0;
        const auto angles = dihedral_angles(tilde);
        for (std::size_t i = 0; i < angles.size(); ++i) {
            const auto& rv = tilde.ridges()[i].vertices;
            if (std::set<int>(rv.begin(), rv.end()) == sub_ridge) continue;
            row.other_min = std::min(row.other_min, angles[i].angle);
            row.other_max = std::max(row.other_max, angles[i].angle);
        }
    }
    return report;
}

bool is_subdivision(const SimplicialSurface& coarse, const SimplicialSurface& fine) {
    if (coarse.dimension() != fine.dimension()) return false;
    const double tol = 1e-9 * std::max(coarse.diameter(), 1e-300);
    std::vector<double> covered(static_cast<std::size_t>(coarse.facet_count()), 0.0);
    for (int j = 0; j < fine.facet_count(); ++j) {
        const Eigen::MatrixXd fp = fine.facet_points(j);
        const Eigen::VectorXd fn = facet_normal(fp);
        int owner = -1;
        for (int i = 0; i < coarse.facet_count() && owner < 0; ++i) {
            const Eigen::MatrixXd cp = coarse.facet_points(i);
            bool inside = facet_normal(cp).dot(fn) > 0.0;
            for (Eigen::Index k = 0; k < fp.cols() && inside; ++k) inside = point_simplex_distance(fp.col(k), cp) < tol;
            if (inside) owner = i;
        }
        if (owner < 0) return false;
        covered[static_cast<std::size_t>(owner)] += simplex_measure(fp);
    }
    for (int i = 0; i < coarse.facet_count(); ++i) {
        const double m = simplex_measure(coarse.facet_points(i));
        if (std::abs(covered[static_cast<std::size_t>(i)] - m) > 1e-9 * m) return false;
    }
    return true;
}

double winding_number(const SimplicialSurface& surface, const Eigen::Vector3d& x) {
    if (surface.dimension() != 3) throw Error(ErrorKind::unsupported_dimension, "winding number needs d = 3");
    double total = 0.0;
    for (int i = 0; i < surface.facet_count(); ++i) {
        const Eigen::Matrix3d t = surface.facet_points(i);
        const Eigen::Vector3d a = t.col(0) - x, b = t.col(1) - x, c = t.col(2) - x;
        const double la = a.norm(), lb = b.norm(), lc = c.norm();
        const double num = a.dot(b.cross(c));
        const double den = la * lb * lc + a.dot(b) * lc + a.dot(c) * lb + b.dot(c) * la;
        total += 2.0 * std::atan2(num, den);
    }
    return total / (4.0 * std::numbers::pi);
}

}  // namespace flexspec
