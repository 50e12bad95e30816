#pragma once

#include <Eigen/Core>

#include "flexspec/surface.hpp"

namespace flexspec {

// [0,1]^3 split into 12 outward triangles; vertex i sits at (i&1, i>>1&1, i>>2&1).
[[nodiscard]] SimplicialSurface unit_cube();

// Simplex (0,0,0), (1,0,0), (0,1,0), (0,0,1), outward.
[[nodiscard]] SimplicialSurface unit_tetrahedron();

// Closed polygon in the plane from a 2 x n vertex loop. Counter-clockwise
// loops come out outward-oriented.
[[nodiscard]] SimplicialSurface polygon_surface(const Eigen::Matrix2Xd& loop);

}  // namespace flexspec
