#include "flexspec/predicates.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <Eigen/Geometry>
#include <boost/multiprecision/cpp_int.hpp>

#include "flexspec/error.hpp"

namespace flexspec {
namespace predicates {
namespace {

using Rational = boost::multiprecision::cpp_rational;

constexpr double kEps = std::numeric_limits<double>::epsilon() / 2.0;  // 2^-53
constexpr double kCcwErrBound = (3.0 + 16.0 * kEps) * kEps;
constexpr double kO3dErrBound = (7.0 + 56.0 * kEps) * kEps;
constexpr double kIccErrBound = (10.0 + 96.0 * kEps) * kEps;

template <typename T>
int sign_of(const T& value) {
    return value > 0 ? 1 : (value < 0 ? -1 : 0);
}

int orient2d_exact(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c) {
    const Rational acx = Rational(a.x()) - Rational(c.x());
    const Rational acy = Rational(a.y()) - Rational(c.y());
    const Rational bcx = Rational(b.x()) - Rational(c.x());
    const Rational bcy = Rational(b.y()) - Rational(c.y());
    return sign_of(acx * bcy - acy * bcx);
}

// Sign of det[a - d, b - d, c - d].
int orient3d_exact(const Eigen::Vector3d& a, const Eigen::Vector3d& b, const Eigen::Vector3d& c,
                   const Eigen::Vector3d& d) {
    std::array<std::array<Rational, 3>, 3> m;
    for (int k = 0; k < 3; ++k) {
        m[0][k] = Rational(a[k]) - Rational(d[k]);
        m[1][k] = Rational(b[k]) - Rational(d[k]);
        m[2][k] = Rational(c[k]) - Rational(d[k]);
    }
    const Rational det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    return sign_of(det);
}

int incircle_exact(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c,
                   const Eigen::Vector2d& d) {
    std::array<std::array<Rational, 3>, 3> m;
    for (int r = 0; r < 3; ++r) {
        const Eigen::Vector2d& p = r == 0 ? a : (r == 1 ? b : c);
        m[r][0] = Rational(p.x()) - Rational(d.x());
        m[r][1] = Rational(p.y()) - Rational(d.y());
        m[r][2] = m[r][0] * m[r][0] + m[r][1] * m[r][1];
    }
    const Rational det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    return sign_of(det);
}

}  // namespace

int orient2d(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c) {
    const double detleft = (a.x() - c.x()) * (b.y() - c.y());
    const double detright = (a.y() - c.y()) * (b.x() - c.x());
    const double det = detleft - detright;
    const double bound = kCcwErrBound * (std::abs(detleft) + std::abs(detright));
    if (det > bound || -det > bound) return sign_of(det);
    return orient2d_exact(a, b, c);
}

int orient3d(const Eigen::Vector3d& a, const Eigen::Vector3d& b, const Eigen::Vector3d& c,
             const Eigen::Vector3d& d) {
    // det[b - a, c - a, d - a] = -det[a - d, b - d, c - d]
    const double adx = a.x() - d.x(), ady = a.y() - d.y(), adz = a.z() - d.z();
    const double bdx = b.x() - d.x(), bdy = b.y() - d.y(), bdz = b.z() - d.z();
    const double cdx = c.x() - d.x(), cdy = c.y() - d.y(), cdz = c.z() - d.z();

    const double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
    const double cdxady = cdx * ady, adxcdy = adx * cdy;
    const double adxbdy = adx * bdy, bdxady = bdx * ady;

    const double det = adz * (bdxcdy - cdxbdy) + bdz * (cdxady - adxcdy) + cdz * (adxbdy - bdxady);
    const double permanent = (std::abs(bdxcdy) + std::abs(cdxbdy)) * std::abs(adz) +
                             (std::abs(cdxady) + std::abs(adxcdy)) * std::abs(bdz) +
                             (std::abs(adxbdy) + std::abs(bdxady)) * std::abs(cdz);
    const double bound = kO3dErrBound * permanent;
    if (det > bound || -det > bound) return -sign_of(det);
    return -orient3d_exact(a, b, c, d);
}

int incircle(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c, const Eigen::Vector2d& d) {
    const double adx = a.x() - d.x(), bdx = b.x() - d.x(), cdx = c.x() - d.x();
    const double ady = a.y() - d.y(), bdy = b.y() - d.y(), cdy = c.y() - d.y();
    const double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy, alift = adx * adx + ady * ady;
    const double cdxady = cdx * ady, adxcdy = adx * cdy, blift = bdx * bdx + bdy * bdy;
    const double adxbdy = adx * bdy, bdxady = bdx * ady, clift = cdx * cdx + cdy * cdy;
    const double det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady);
    const double permanent = (std::abs(bdxcdy) + std::abs(cdxbdy)) * alift +
                             (std::abs(cdxady) + std::abs(adxcdy)) * blift +
                             (std::abs(adxbdy) + std::abs(bdxady)) * clift;
    const double bound = kIccErrBound * permanent;
    if (det > bound || -det > bound) return sign_of(det);
    return incircle_exact(a, b, c, d);
}

}  // namespace predicates

namespace {

using predicates::orient2d;
using predicates::orient3d;

// Coordinates are compared exactly; used only for collinear points.
bool on_closed_segment_collinear(const Eigen::Vector2d& p, const Eigen::Vector2d& q, const Eigen::Vector2d& x) {
    return std::min(p.x(), q.x()) <= x.x() && x.x() <= std::max(p.x(), q.x()) && std::min(p.y(), q.y()) <= x.y() &&
           x.y() <= std::max(p.y(), q.y());
}

bool point_in_closed_triangle_2d(const Eigen::Vector2d& x, const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                                 const Eigen::Vector2d& c) {
    const int s1 = orient2d(a, b, x);
    const int s2 = orient2d(b, c, x);
    const int s3 = orient2d(c, a, x);
    return (s1 >= 0 && s2 >= 0 && s3 >= 0) || (s1 <= 0 && s2 <= 0 && s3 <= 0);
}

// Drop the coordinate axis along which the (exactly planar) configuration
// stays non-degenerate. The projected triangle must have non-zero area.
int projection_axis(const Eigen::Vector3d& a, const Eigen::Vector3d& b, const Eigen::Vector3d& c) {
    const Eigen::Vector3d n = (b - a).cross(c - a).cwiseAbs();
    std::array<int, 3> order{0, 1, 2};
    std::sort(order.begin(), order.end(), [&](int i, int j) { return n[i] > n[j]; });
    for (int axis : order) {
        const auto drop = [axis](const Eigen::Vector3d& v) {
            return Eigen::Vector2d(v[(axis + 1) % 3], v[(axis + 2) % 3]);
        };
        if (orient2d(drop(a), drop(b), drop(c)) != 0) return axis;
    }
    throw Error(ErrorKind::invalid_surface, "degenerate triangle in intersection test");
}

Eigen::Vector2d project(const Eigen::Vector3d& v, int axis) { return {v[(axis + 1) % 3], v[(axis + 2) % 3]}; }

bool segment_hits_triangle_2d(const Eigen::Vector2d& p, const Eigen::Vector2d& q, const Eigen::Vector2d& a,
                              const Eigen::Vector2d& b, const Eigen::Vector2d& c) {
    if (point_in_closed_triangle_2d(p, a, b, c) || point_in_closed_triangle_2d(q, a, b, c)) return true;
    return segments_intersect(p, q, a, b) || segments_intersect(p, q, b, c) || segments_intersect(p, q, c, a);
}

// Does direction w (from the apex) lie in the closed planar cone spanned by
// directions u and v (non-parallel)? Orientation is evaluated on points so
// the predicates stay exact.
bool in_closed_cone_2d(const Eigen::Vector2d& apex, const Eigen::Vector2d& u_end, const Eigen::Vector2d& v_end,
                       const Eigen::Vector2d& w_end) {
    const int s = orient2d(apex, u_end, v_end);
    if (s == 0) return false;
    return orient2d(apex, u_end, w_end) * s >= 0 && orient2d(apex, w_end, v_end) * s >= 0;
}

bool collinear_same_direction(const Eigen::Vector2d& v, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    if (orient2d(v, a, b) != 0) return false;
    const auto side = [](double from, double to) { return to > from ? 1 : (to < from ? -1 : 0); };
    const int ax = side(v.x(), a.x()), bx = side(v.x(), b.x());
    if (ax != 0 || bx != 0) return ax == bx;
    return side(v.y(), a.y()) == side(v.y(), b.y());
}

bool triangles_clash(std::span<const int> ia, const Eigen::MatrixXd& pa, std::span<const int> ib,
                     const Eigen::MatrixXd& pb) {
    std::array<int, 3> shared_a{}, shared_b{};
    int shared = 0;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            if (ia[i] == ib[j]) {
                shared_a[shared] = i;
                shared_b[shared] = j;
                ++shared;
            }
        }
    }
    const auto A = [&](int i) -> Eigen::Vector3d { return pa.col(i); };
    const auto B = [&](int i) -> Eigen::Vector3d { return pb.col(i); };

    if (shared == 0) {
        return triangles_intersect(pa.topRows<3>(), pb.topRows<3>());
    }
    if (shared == 1) {
        const int va = shared_a[0], vb = shared_b[0];
        const Eigen::Vector3d v = A(va);
        const Eigen::Vector3d a1 = A((va + 1) % 3), a2 = A((va + 2) % 3);
        const Eigen::Vector3d b1 = B((vb + 1) % 3), b2 = B((vb + 2) % 3);
        if (segment_hits_triangle(a1, a2, v, b1, b2)) return true;
        if (segment_hits_triangle(b1, b2, v, a1, a2)) return true;
        // An edge lying in the other triangle's plane may still run inside it.
        const auto edge_inside = [](const Eigen::Vector3d& apex, const Eigen::Vector3d& x, const Eigen::Vector3d& u,
                                    const Eigen::Vector3d& w) {
            if (orient3d(apex, u, w, x) != 0) return false;
            const int axis = projection_axis(apex, u, w);
            return in_closed_cone_2d(project(apex, axis), project(u, axis), project(w, axis), project(x, axis));
        };
        return edge_inside(v, a1, b1, b2) || edge_inside(v, a2, b1, b2) || edge_inside(v, b1, a1, a2) ||
               edge_inside(v, b2, a1, a2);
    }
    if (shared == 2) {
        const int oa = 3 - shared_a[0] - shared_a[1];
        const int ob = 3 - shared_b[0] - shared_b[1];
        const Eigen::Vector3d v = A(shared_a[0]), w = A(shared_a[1]);
        const Eigen::Vector3d a = A(oa), b = B(ob);
        if (orient3d(v, w, a, b) != 0) return false;
        const int axis = projection_axis(v, w, a);
        return orient2d(project(v, axis), project(w, axis), project(a, axis)) *
                   orient2d(project(v, axis), project(w, axis), project(b, axis)) >=
               0;
    }
    return true;  // duplicated facet
}

bool segments_clash(std::span<const int> ia, const Eigen::MatrixXd& pa, std::span<const int> ib,
                    const Eigen::MatrixXd& pb) {
    const Eigen::Vector2d p = pa.col(0).head<2>(), q = pa.col(1).head<2>();
    const Eigen::Vector2d r = pb.col(0).head<2>(), s = pb.col(1).head<2>();
    int shared = 0;
    int sa = -1, sb = -1;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            if (ia[i] == ib[j]) {
                ++shared;
                sa = i;
                sb = j;
            }
        }
    }
    if (shared == 0) return segments_intersect(p, q, r, s);
    if (shared == 1) {
        const Eigen::Vector2d v = pa.col(sa).head<2>();
        const Eigen::Vector2d a = pa.col(1 - sa).head<2>();
        const Eigen::Vector2d b = pb.col(1 - sb).head<2>();
        return collinear_same_direction(v, a, b);
    }
    return true;
}

}  // namespace

bool segments_intersect(const Eigen::Vector2d& p, const Eigen::Vector2d& q, const Eigen::Vector2d& r,
                        const Eigen::Vector2d& s) {
    const int d1 = orient2d(r, s, p);
    const int d2 = orient2d(r, s, q);
    const int d3 = orient2d(p, q, r);
    const int d4 = orient2d(p, q, s);
    if (d1 * d2 < 0 && d3 * d4 < 0) return true;
    if (d1 == 0 && on_closed_segment_collinear(r, s, p)) return true;
    if (d2 == 0 && on_closed_segment_collinear(r, s, q)) return true;
    if (d3 == 0 && on_closed_segment_collinear(p, q, r)) return true;
    if (d4 == 0 && on_closed_segment_collinear(p, q, s)) return true;
    return false;
}

bool segment_hits_triangle(const Eigen::Vector3d& p, const Eigen::Vector3d& q, const Eigen::Vector3d& a,
                           const Eigen::Vector3d& b, const Eigen::Vector3d& c) {
    const int o1 = orient3d(a, b, c, p);
    const int o2 = orient3d(a, b, c, q);
    if (o1 * o2 > 0) return false;
    if (o1 == 0 && o2 == 0) {
        const int axis = projection_axis(a, b, c);
        return segment_hits_triangle_2d(project(p, axis), project(q, axis), project(a, axis), project(b, axis),
                                        project(c, axis));
    }
    const int s1 = orient3d(p, q, a, b);
    const int s2 = orient3d(p, q, b, c);
    const int s3 = orient3d(p, q, c, a);
    return (s1 >= 0 && s2 >= 0 && s3 >= 0) || (s1 <= 0 && s2 <= 0 && s3 <= 0);
}

bool triangles_intersect(const Eigen::Matrix3d& t1, const Eigen::Matrix3d& t2) {
    for (int i = 0; i < 3; ++i) {
        if (segment_hits_triangle(t1.col(i), t1.col((i + 1) % 3), t2.col(0), t2.col(1), t2.col(2))) return true;
        if (segment_hits_triangle(t2.col(i), t2.col((i + 1) % 3), t1.col(0), t1.col(1), t1.col(2))) return true;
    }
    return false;
}

bool facets_clash(std::span<const int> ids_a, const Eigen::MatrixXd& pts_a, std::span<const int> ids_b,
                  const Eigen::MatrixXd& pts_b) {
    const auto d = pts_a.rows();
    if (d != pts_b.rows()) throw Error(ErrorKind::dimension_mismatch, "facets_clash: mixed dimensions");
    if (d == 3) return triangles_clash(ids_a, pts_a, ids_b, pts_b);
    if (d == 2) return segments_clash(ids_a, pts_a, ids_b, pts_b);
    throw Error(ErrorKind::unsupported_dimension, "intersection tests support d = 2 and d = 3");
}

}  // namespace flexspec
