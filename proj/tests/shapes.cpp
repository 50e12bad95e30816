#include "shapes.hpp"

#include <array>
#include <vector>

namespace test_shapes {

flexspec::SimplicialSurface l_prism() {
    constexpr std::array<std::array<double, 2>, 6> loop{{{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}}};
    Eigen::MatrixXd v(3, 12);
    for (int i = 0; i < 6; ++i) {
        v.col(i) << loop[i][0], loop[i][1], 0.0;
        v.col(i + 6) << loop[i][0], loop[i][1], 1.0;
    }
    // Fan from the reflex vertex 3.
    constexpr std::array<std::array<int, 3>, 4> caps{{{3, 4, 5}, {3, 5, 0}, {3, 0, 1}, {3, 1, 2}}};
    std::vector<flexspec::Facet> f;
    for (const auto& t : caps) {
        f.push_back({t[0] + 6, t[1] + 6, t[2] + 6});
        f.push_back({t[0], t[2], t[1]});
    }
    for (int i = 0; i < 6; ++i) {
        const int j = (i + 1) % 6;
        f.push_back({i, j, j + 6});
        f.push_back({i, j + 6, i + 6});
    }
    return {3, std::move(v), std::move(f)};
}

}  // namespace test_shapes
