#pragma once

#include <functional>
#include <vector>

#include <Eigen/Core>

#include "flexspec/flex.hpp"

namespace flexspec {

struct RidgeProfile {
    std::vector<int> ridge;  // vertex ids of the selected ridge
    std::vector<double> t;   // base parameters, 0 .. delta
    std::vector<double> angle;
};

// Ridge whose dihedral angle varies most over base parameters [0, delta].
// A ridge-angle driver wins ties. Throws not_flexible if every angle is
// constant within 1e-9, invalid_domain if F(0) is not embedded.
[[nodiscard]] RidgeProfile select_variable_ridge(const FlexFamily& family, double delta = 0.1, int samples = 41);

// Reparametrised interval: base parameter t = t_begin + (t_end - t_begin) s.
// The angle exceeds phi_star on s in [0, 1) and equals it at s = 1.
struct PhiStar {
    double phi_star = 0.0;
    double t_star = 0.0;
    double t_begin = 0.0;
    double t_end = 0.0;
    bool increasing = true;  // t = 0 is a limit point of {angle > angle(0)}
};

// Case split on a sampled profile. `drift(t)` bounds the Hausdorff distance
// between F(0) and F(t); the chosen interval keeps it below `drift_limit`.
// 10^4 uniform samples of [0, delta], drift limit pinned by bisection to 1e-12.
// Throws resolution_exhausted when no sign-definite interval is found.
[[nodiscard]] PhiStar compute_phi_star(const std::function<double(double)>& angle,
                                       const std::function<double(double)>& drift, double delta,
                                       double drift_limit);
[[nodiscard]] PhiStar compute_phi_star(const FlexFamily& family, const RidgeProfile& ridge, double epsilon,
                                       double delta = 0.1);

// One tetrahedral tent over a sub-facet of an incident facet (d = 3).
struct Tent {
    int facet = -1;                // base facet carrying the tent
    std::array<int, 3> simplex{};  // sub-facet vertex ids in the modified family, oriented as the facet
    int apex = -1;                 // apex vertex id in the modified family
    Attachment apex_frame;         // apex in the frame of the base facet
    double angle = 0.0;            // interior tent angle at the sub-ridge
};

struct TentSpec {
    std::vector<int> ridge;             // selected ridge of F
    std::array<int, 2> sub_ridge{-1, -1};  // ids in the modified family
    double phi_star = 0.0;
    double epsilon = 0.0;
    double t_begin = 0.0;
    double t_end = 0.0;
    double scale = 1.0;  // geometric shrink factor of sub-facets and apex distance
    Tent y;
    Tent z;
    std::vector<Facet> subdivision;  // subdivided facets before the tents replace y' and z'
};

// Selection, phi* and interval for `family` with Hausdorff budget epsilon.
[[nodiscard]] TentSpec make_tent_spec(const FlexFamily& family, double epsilon, double delta = 0.1);

struct TentedFamily {
    FlexFamily family;
    TentSpec spec;
};

// Subdivides the two facets at the ridge and replaces a sub-facet of each by
// the inner sides of a rigid tetrahedral tent, with tent angles phi*/2 each.
// Apex distance and sub-facet size shrink geometrically until clearance,
// interiority, non-intersection and the Hausdorff budget hold on `samples`
// parameters. Throws construction_failure naming the violated condition.
[[nodiscard]] TentedFamily subdivide_and_tent(const FlexFamily& family, const TentSpec& spec, int samples = 50);

struct SigmaRow {
    double s = 0.0;
    bool apex_inside = false;       // apexes in the domain of P'_s
    bool tents_clear = false;       // tent sides meet P'_s only along the sub-facets
    double angle_sum_residual = 0.0;  // theta_y + theta_z - phi*
    bool angle_sum_ok = false;
    double hausdorff_bound = 0.0;   // tents to P'_0, s = 0 geometry
    bool hausdorff_ok = false;
    bool embedded = false;
    double phi_ridge = 0.0;         // angle of the selected ridge in P'_s
    double phi_tilde = 0.0;         // angle at the sub-ridge in the modified surface
    double bookkeeping_residual = 0.0;  // |phi_tilde - (phi_ridge - phi*)|
    double other_min = 0.0;         // extreme angles over all other ridges
    double other_max = 0.0;
};

struct SigmaReport {
    std::vector<SigmaRow> rows;
    bool subdivision_ok = false;
    double hausdorff_to_start = 0.0;  // modified surface at s = 0 against F(0)
    [[nodiscard]] bool all_pass() const;
};

// Never throws for a family lacking the tents: the rows report failure.
// Throws invalid_argument for epsilon <= 0 or samples < 2.
[[nodiscard]] SigmaReport verify_sigma_conditions(const FlexFamily& modified, const TentSpec& spec, int samples);

// Every facet of `coarse` is the union of the facets of `fine` lying in it.
[[nodiscard]] bool is_subdivision(const SimplicialSurface& coarse, const SimplicialSurface& fine);

// Generalised winding number of a closed 3-dimensional surface around x.
[[nodiscard]] double winding_number(const SimplicialSurface& surface, const Eigen::Vector3d& x);

}  // namespace flexspec
