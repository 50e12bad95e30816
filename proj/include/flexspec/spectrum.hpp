#pragma once

#include <string_view>
#include <vector>

namespace flexspec {

enum class BoundaryCondition { dirichlet, neumann };

[[nodiscard]] inline std::string_view to_string(BoundaryCondition bc) noexcept {
    return bc == BoundaryCondition::dirichlet ? "dirichlet" : "neumann";
}

// Ascending Laplace eigenvalues (nu^2, units length^-2) with the mesh they
// came from.
struct Spectrum {
    BoundaryCondition bc = BoundaryCondition::dirichlet;
    std::vector<double> eigenvalues;
    double h = 0.0;
    int nodes = 0;
    double max_residual = 0.0;  // max ||K u - lambda M u|| / ||M u||
};

}  // namespace flexspec
