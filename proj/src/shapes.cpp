#include "flexspec/shapes.hpp"

#include <array>
#include <vector>

namespace flexspec {

SimplicialSurface unit_cube() {
    Eigen::MatrixXd v(3, 8);
    for (int i = 0; i < 8; ++i) v.col(i) << (i & 1), ((i >> 1) & 1), ((i >> 2) & 1);
    constexpr std::array<std::array<int, 4>, 6> quads{{
        {0, 2, 3, 1}, {4, 5, 7, 6}, {0, 1, 5, 4}, {2, 6, 7, 3}, {0, 4, 6, 2}, {1, 3, 7, 5},
    }};
    std::vector<Facet> facets;
    for (const auto& q : quads) {
        facets.push_back({q[0], q[1], q[2]});
        facets.push_back({q[0], q[2], q[3]});
    }
    return {3, std::move(v), std::move(facets)};
}

SimplicialSurface unit_tetrahedron() {
    Eigen::MatrixXd v(3, 4);
    v << 0, 1, 0, 0,
         0, 0, 1, 0,
         0, 0, 0, 1;
    return {3, std::move(v), {{0, 2, 1}, {0, 1, 3}, {0, 3, 2}, {1, 2, 3}}};
}

SimplicialSurface polygon_surface(const Eigen::Matrix2Xd& loop) {
    const int n = static_cast<int>(loop.cols());
    std::vector<Facet> facets;
    for (int i = 0; i < n; ++i) facets.push_back({i, (i + 1) % n});
    return {2, Eigen::MatrixXd(loop), std::move(facets)};
}

}  // namespace flexspec
