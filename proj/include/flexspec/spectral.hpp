#pragma once

#include <array>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "flexspec/flex.hpp"
#include "flexspec/spectrum.hpp"

namespace flexspec {

// Conforming triangulation of a planar polygon. Triangles are counter-clockwise.
struct Mesh2D {
    Eigen::Matrix2Xd nodes;
    std::vector<std::array<int, 3>> triangles;
    std::vector<bool> boundary;
    double h = 0.0;  // bound on the element diameter

    [[nodiscard]] int node_count() const noexcept { return static_cast<int>(nodes.cols()); }
    [[nodiscard]] double area() const;
    [[nodiscard]] double min_angle() const;  // radians
    [[nodiscard]] double max_diameter() const;
};

// Constrained Delaunay mesh with Ruppert refinement: every polygon vertex is
// a node, every element has diameter <= h and minimum angle >= 15 degrees.
// Throws invalid_domain for a non-simple polygon, mesh_failure if refinement
// does not terminate.
[[nodiscard]] Mesh2D triangulate(const Eigen::Matrix2Xd& polygon, double h);

// Splits every triangle into four through its edge midpoints; h halves.
[[nodiscard]] Mesh2D refine_uniform(const Mesh2D& mesh);

// Piecewise-linear stiffness and consistent mass matrices over all nodes.
struct FemMatrices {
    Eigen::SparseMatrix<double> stiffness;
    Eigen::SparseMatrix<double> mass;
};
[[nodiscard]] FemMatrices assemble_p1(const Mesh2D& mesh);

// Smallest n eigenvalues of K u = lambda M u (Dirichlet nodes eliminated),
// by shift-invert Lanczos with full reorthogonalisation. Each returned pair
// satisfies ||K u - lambda M u|| / ||M u|| < 1e-8, and a Sylvester inertia
// count confirms that no eigenvalue below the returned range was skipped.
[[nodiscard]] Spectrum solve_eigs(const Mesh2D& mesh, BoundaryCondition bc, int n);

// Largest eigenvalue considered reliable: 0.8 of the largest one computed.
[[nodiscard]] double trust_threshold(const Spectrum& spectrum);

// #{n : lambda_n <= k^2}. Throws untrusted_range above the trust threshold.
[[nodiscard]] int counting_function(const Spectrum& spectrum, double k);

// (4 lambda_fine - lambda_coarse) / 3, index by index, for meshes h and h/2.
[[nodiscard]] Spectrum richardson(const Spectrum& coarse, const Spectrum& fine);

// Spectrum on a mesh of size h and on its uniform refinement.
struct TwoMeshSpectrum {
    Spectrum coarse;
    Spectrum fine;
};
[[nodiscard]] TwoMeshSpectrum two_mesh_spectrum(const Eigen::Matrix2Xd& polygon, BoundaryCondition bc, double h,
                                                int n);

struct SweepRow {
    double s = 0.0;
    bool simple = true;               // false rows carry no eigenvalues
    std::vector<double> eigenvalues;  // fine mesh
    std::vector<double> error_bar;    // |lambda_h - lambda_{h/2}|
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::vector<double> variation;  // (max - min) / value at the first row, per eigenvalue
    std::vector<double> error_bar;  // largest two-mesh difference, per eigenvalue
};

// Spectra of the polygons of a planar family. Samples are solved concurrently.
[[nodiscard]] SweepResult flex_spectrum_sweep(const FlexFamily& family, BoundaryCondition bc, double h, int n,
                                              std::span<const double> parameters);
[[nodiscard]] SweepResult flex_spectrum_sweep(const FlexFamily& family, BoundaryCondition bc, double h, int n,
                                              int samples);

// Corner-constant extraction on the unit square (Dirichlet): extrapolated
// spectra up to lambda_cap, p = 2 Riesz mean minus its two leading predicted
// terms, least-squares fit c k^2 over [k_lo, k_hi].
struct CornerFit {
    double c = 0.0;
    double target = 0.0;  // a_0 / 2
    int eigenvalues = 0;
    double lambda_max = 0.0;
    std::vector<std::array<double, 2>> remainder;  // (k, Riesz mean minus leading terms)
};
[[nodiscard]] CornerFit fit_corner_coefficient(double h, double k_lo = 15.0, double k_hi = 35.0,
                                               double lambda_cap = 1600.0);

}  // namespace flexspec
