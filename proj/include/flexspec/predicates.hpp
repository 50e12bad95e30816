#pragma once

#include <span>

#include <Eigen/Core>

namespace flexspec {

// Exact orientation predicates. A floating-point evaluation is accepted when
// it clears a static forward error bound; otherwise the determinant is
// re-evaluated in exact rational arithmetic. Results are -1, 0 or +1.
namespace predicates {

// Sign of det[b - a, c - a]: +1 when a, b, c turn counter-clockwise.
[[nodiscard]] int orient2d(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c);

// +1 when d lies strictly inside the circle through a, b, c (counter-clockwise).
[[nodiscard]] int incircle(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c,
                           const Eigen::Vector2d& d);

// Sign of det[b - a, c - a, d - a].
[[nodiscard]] int orient3d(const Eigen::Vector3d& a, const Eigen::Vector3d& b, const Eigen::Vector3d& c,
                           const Eigen::Vector3d& d);

}  // namespace predicates

// Closed segment vs closed segment in the plane.
[[nodiscard]] bool segments_intersect(const Eigen::Vector2d& p, const Eigen::Vector2d& q, const Eigen::Vector2d& r,
                                      const Eigen::Vector2d& s);

// Closed segment vs closed (non-degenerate) triangle in space.
[[nodiscard]] bool segment_hits_triangle(const Eigen::Vector3d& p, const Eigen::Vector3d& q,
                                         const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                                         const Eigen::Vector3d& c);

[[nodiscard]] bool triangles_intersect(const Eigen::Matrix3d& t1, const Eigen::Matrix3d& t2);

// True when two closed facets (segments for d = 2, triangles for d = 3)
// intersect in anything other than the face spanned by their common vertex
// ids. Touching counts as a clash.
[[nodiscard]] bool facets_clash(std::span<const int> ids_a, const Eigen::MatrixXd& pts_a, std::span<const int> ids_b,
                                const Eigen::MatrixXd& pts_b);

}  // namespace flexspec
