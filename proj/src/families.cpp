#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>
#include <vector>

#include <Eigen/Geometry>

#include "flexspec/error.hpp"
#include "flexspec/flex.hpp"
#include "flexspec/shapes.hpp"

namespace flexspec {
namespace {

using std::numbers::pi;

// Makes a triangle list coherently oriented (flood fill over shared edges),
// then outward (non-negative oriented volume).
std::vector<Facet> orient_triangles(const Eigen::MatrixXd& v, std::vector<Facet> facets) {
    const auto directed = [](const Facet& f, int a, int b) {
        for (int k = 0; k < 3; ++k) {
            if (f[static_cast<std::size_t>(k)] == a && f[static_cast<std::size_t>((k + 1) % 3)] == b) return true;
        }
        return false;
    };
    std::vector<bool> done(facets.size(), false);
    std::vector<std::size_t> stack{0};
    done[0] = true;
    while (!stack.empty()) {
        const std::size_t i = stack.back();
        stack.pop_back();
        for (std::size_t j = 0; j < facets.size(); ++j) {
            if (done[j]) continue;
            for (int k = 0; k < 3; ++k) {
                const int a = facets[i][static_cast<std::size_t>(k)], b = facets[i][static_cast<std::size_t>((k + 1) % 3)];
                if (directed(facets[j], a, b)) {
                    std::swap(facets[j][0], facets[j][1]);
                } else if (!directed(facets[j], b, a)) {
                    continue;
                }
                done[j] = true;
                stack.push_back(j);
                break;
            }
        }
    }
    const SimplicialSurface s(3, v, facets);
    if (oriented_volume(s) < 0.0) {
        for (Facet& f : facets) std::swap(f[0], f[1]);
    }
    return facets;
}

double ridge_angle(const SimplicialSurface& s, std::vector<int> ridge) {
    std::sort(ridge.begin(), ridge.end());
    for (int r = 0; r < static_cast<int>(s.ridges().size()); ++r) {
        auto v = s.ridges()[static_cast<std::size_t>(r)].vertices;
        std::sort(v.begin(), v.end());
        if (v == ridge) return dihedral_angle(s, r).angle;
    }
    throw Error(ErrorKind::invalid_argument, "ridge not found");
}

Eigen::Vector3d half_turn(const Eigen::Vector3d& p, const Eigen::Vector3d& point, const Eigen::Vector3d& axis) {
    const Eigen::Vector3d u = axis.normalized();
    const Eigen::Vector3d q = p - point;
    return point + 2.0 * q.dot(u) * u - q;
}

// Circumradius-based cyclic polygon with the given side lengths, counter-clockwise,
// vertex 0 at the origin and edge 0 along +x.
Eigen::Matrix2Xd cyclic_polygon(std::span<const double> lengths) {
    const auto n = static_cast<Eigen::Index>(lengths.size());
    const auto longest_it = std::max_element(lengths.begin(), lengths.end());
    const double longest = *longest_it;
    const auto longest_idx = static_cast<Eigen::Index>(longest_it - lengths.begin());
    const auto central = [&](double r, double len) { return 2.0 * std::asin(std::min(1.0, len / (2.0 * r))); };

    // Centre inside: sum of central angles is 2 pi. Centre outside: the
    // longest side's angle equals the sum of the others.
    const auto inside = [&](double r) {
        double sum = 0.0;
        for (double len : lengths) sum += central(r, len);
        return sum - 2.0 * pi;
    };
    const auto outside = [&](double r) {
        double sum = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (i != longest_idx) sum += central(r, lengths[static_cast<std::size_t>(i)]);
        }
        return sum - central(r, longest);
    };
    const bool centre_inside = inside(longest / 2.0) >= 0.0;
    const auto& f = centre_inside ? std::function<double(double)>(inside) : std::function<double(double)>(outside);
    double lo = longest / 2.0, hi = longest;
    while (f(hi) * f(lo) > 0.0) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        ((f(mid) > 0.0) == (f(lo) > 0.0) ? lo : hi) = mid;
    }
    const double r = 0.5 * (lo + hi);

    Eigen::Matrix2Xd p(2, n);
    double theta = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        p.col(i) << r * std::cos(theta), r * std::sin(theta);
        double step = central(r, lengths[static_cast<std::size_t>(i)]);
        if (!centre_inside && i == longest_idx) step = -step;
        theta += step;
    }
    double area = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto j = (i + 1) % n;
        area += p(0, i) * p(1, j) - p(0, j) * p(1, i);
    }
    if (area < 0.0) p.row(1) *= -1.0;

    const Eigen::Vector2d origin = p.col(0);
    const Eigen::Vector2d e = (p.col(1) - origin).normalized();
    Eigen::Matrix2d rot;
    rot << e.x(), e.y(), -e.y(), e.x();
    return rot * (p.colwise() - origin);
}

}  // namespace

FlexFamily make_flex_polygon(std::span<const double> lengths) {
    if (lengths.size() < 4) throw Error(ErrorKind::invalid_argument, "flex polygon needs at least 4 edges");
    const double total = std::accumulate(lengths.begin(), lengths.end(), 0.0);
    const double longest = *std::max_element(lengths.begin(), lengths.end());
    if (*std::min_element(lengths.begin(), lengths.end()) <= 0.0) {
        throw Error(ErrorKind::invalid_argument, "edge lengths must be positive");
    }
    if (longest >= total - longest) {
        throw Error(ErrorKind::invalid_argument, "edge lengths violate the polygon inequality");
    }
    const SimplicialSurface ref = polygon_surface(cyclic_polygon(lengths));
    Driver driver;
    driver.ridge = {0};
    const double start = ridge_angle(ref, driver.ridge);
    return FlexFamily::continuation(ref, driver, start - pi / 4.0);
}

FlexFamily make_bricard1() {
    // Half-turn symmetric about the z axis: A <-> X, B <-> D, C <-> Y.
    const auto r = [](const Eigen::Vector3d& p) { return Eigen::Vector3d(-p.x(), -p.y(), p.z()); };
    const Eigen::Vector3d a(1.0, 0.2, 0.6), b(0.3, 1.1, -0.4), c(-0.6, 0.9, 0.8);
    Eigen::MatrixXd v(3, 6);
    v << a, b, c, r(b), r(a), r(c);
    std::vector<Facet> facets;
    for (int p : {0, 4}) {
        for (int q : {2, 5}) {
            for (int s : {1, 3}) facets.push_back({p, q, s});
        }
    }
    facets = orient_triangles(v, facets);
    const SimplicialSurface ref(3, v, facets);
    Driver driver;
    driver.ridge = {0, 2};
    const double start = ridge_angle(ref, driver.ridge);
    return FlexFamily::continuation(ref, driver, start + 0.4);
}

SteffenParameters steffen_parameters() {
    // Chosen by a clearance search over the half-turn axis (tools/steffen_search.py).
    SteffenParameters p;
    p.frame_height = 2.7791;
    p.axis_point = {0.0791, -0.0845, 0.3478};
    p.axis_direction = {0.2389, -0.3819, -0.8893};
    p.driver_ridge = {3, 7};
    p.driver_span = 0.3;
    return p;
}

FlexFamily make_steffen() {
    // Crinkles over a rhombic frame A, B, C, D, E. Every crinkle X-Y is the
    // half-turn image of a frame edge, which makes its length constraints
    // dependent and leaves one degree of freedom.
    const SteffenParameters sp = steffen_parameters();
    const auto g = [](const Eigen::Vector3d& p) { return Eigen::Vector3d(-p.x(), p.y(), -p.z()); };
    const auto h = [&](const Eigen::Vector3d& p) { return half_turn(p, sp.axis_point, sp.axis_direction); };

    const Eigen::Vector3d a(-1.0, 0.0, 0.0), c(1.0, 0.0, 0.0), d(0.0, sp.frame_height, 0.0);
    const Eigen::Vector3d b = h(d), x1 = h(a), y1 = h(c);
    Eigen::MatrixXd v(3, 9);
    v << a, b, c, d, g(b), x1, y1, g(y1), g(x1);
    std::vector<Facet> facets{{0, 6, 1}, {0, 6, 3}, {5, 2, 1}, {5, 2, 3}, {5, 6, 1}, {5, 6, 3}, {0, 8, 3},
                              {0, 8, 4}, {7, 2, 3}, {7, 2, 4}, {7, 8, 3}, {7, 8, 4}, {0, 1, 4}, {1, 2, 4}};
    facets = orient_triangles(v, facets);
    const SimplicialSurface ref(3, v, facets);
    Driver driver;
    driver.ridge = {sp.driver_ridge[0], sp.driver_ridge[1]};
    const double start = ridge_angle(ref, driver.ridge);
    return FlexFamily::continuation(ref, driver, start + sp.driver_span);
}

FlexFamily make_rigid_cube() { return FlexFamily::rigid(unit_cube()); }

}  // namespace flexspec
