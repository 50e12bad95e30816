#pragma once

#include <vector>

#include "flexspec/flex.hpp"
#include "flexspec/spectrum.hpp"
#include "flexspec/surface.hpp"

namespace flexspec {

// Leading three coefficients of the Riesz-mean expansion of the eigenvalue
// counting function. a_dm1 is negative for Dirichlet, positive for Neumann.
struct FedosovCoefficients {
    double a_d = 0.0;
    double a_dm1 = 0.0;
    double a_dm2 = 0.0;
    BoundaryCondition bc = BoundaryCondition::dirichlet;
    int dimension = 0;
};

// (phi^2 - pi^2) / (3 phi); exactly zero at phi = pi.
[[nodiscard]] double corner_term(double phi);

// Throws invalid_domain unless the surface is embedded.
[[nodiscard]] FedosovCoefficients coefficients(const SimplicialSurface& surface, BoundaryCondition bc);

// Geometric part only: no embedding check. For callers that verified it.
[[nodiscard]] FedosovCoefficients coefficients_unchecked(const SimplicialSurface& surface, BoundaryCondition bc);

// Two-term Weyl prediction of N(k), the number of eigenvalues <= k^2.
[[nodiscard]] double weyl_counting_prediction(const SimplicialSurface& surface, BoundaryCondition bc, double k);

// sum_{l=d-2}^{d} a_l Gamma(l+1)/Gamma(p+l+1) k^(p+l). Lower-order terms are
// not available, so the result carries an O(k^(d-1)) remainder.
// Accepts 0 <= p <= max(d-1, 2).
[[nodiscard]] double riesz_mean_prediction(const FedosovCoefficients& c, int p, double k);

// (1/Gamma(p+1)) sum over sqrt(lambda_n) <= k of (k - sqrt(lambda_n))^p.
[[nodiscard]] double riesz_mean_empirical(const Spectrum& spectrum, int p, double k);

struct CoefficientSample {
    double s = 0.0;
    FedosovCoefficients c;
    double min_angle = 0.0;
    double max_angle = 0.0;
    bool embedded = true;  // rows with false are excluded from the variation
};

struct CoefficientTrack {
    std::vector<CoefficientSample> rows;
    // (max - min) / |value at the first embedded sample| per coefficient,
    // in the order a_d, a_{d-1}, a_{d-2}.
    std::array<double, 3> variation{};
};

[[nodiscard]] CoefficientTrack track_coefficients(const FlexFamily& family, BoundaryCondition bc, int samples);

}  // namespace flexspec
