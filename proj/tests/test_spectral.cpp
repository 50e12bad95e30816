#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "flexspec/error.hpp"
#include "flexspec/fedosov.hpp"
#include "flexspec/shapes.hpp"
#include "flexspec/spectral.hpp"

using namespace flexspec;
using std::numbers::pi;

namespace {

Eigen::Matrix2Xd unit_square() {
    Eigen::Matrix2Xd p(2, 4);
    p << 0, 1, 1, 0,
         0, 0, 1, 1;
    return p;
}

Eigen::Matrix2Xd l_shape() {
    Eigen::Matrix2Xd p(2, 6);
    p << 0, 1, 1, 0.5, 0.5, 0,
         0, 0, 0.5, 0.5, 1, 1;
    return p;
}

// Sorted pi^2 (m^2 + n^2) / (a^2, b^2) for an a x b rectangle.
std::vector<double> rectangle_dirichlet(double a, double b, int count) {
    std::vector<double> ev;
    for (int m = 1; m <= 40; ++m) {
        for (int n = 1; n <= 40; ++n) ev.push_back(pi * pi * (m * m / (a * a) + n * n / (b * b)));
    }
    std::sort(ev.begin(), ev.end());
    ev.resize(static_cast<std::size_t>(count));
    return ev;
}

double point_segment(const Eigen::Vector2d& p, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    const double t = std::clamp((p - a).dot(b - a) / (b - a).squaredNorm(), 0.0, 1.0);
    return (a + t * (b - a) - p).norm();
}

double distance_to_loop(const Eigen::Matrix2Xd& loop, const Eigen::Vector2d& p) {
    double d = 1e300;
    for (Eigen::Index i = 0; i < loop.cols(); ++i) d = std::min(d, point_segment(p, loop.col(i), loop.col((i + 1) % loop.cols())));
    return d;
}

// Conformity, orientation, quality and boundary flags of a mesh.
void expect_valid_mesh(const Mesh2D& mesh, const Eigen::Matrix2Xd& loop) {
    std::map<std::pair<int, int>, int> directed;
    for (const auto& t : mesh.triangles) {
        const Eigen::Vector2d a = mesh.nodes.col(t[0]), b = mesh.nodes.col(t[1]), c = mesh.nodes.col(t[2]);
        EXPECT_GT((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x(), 0.0);
        for (int i = 0; i < 3; ++i) ++directed[{t[static_cast<std::size_t>(i)], t[static_cast<std::size_t>((i + 1) % 3)]}];
    }
    for (const auto& [e, count] : directed) {
        EXPECT_EQ(count, 1);
        if (!directed.count({e.second, e.first})) {
            // Boundary edge: both ends on the polygon and flagged.
            EXPECT_LT(distance_to_loop(loop, mesh.nodes.col(e.first)), 1e-12);
            EXPECT_LT(distance_to_loop(loop, mesh.nodes.col(e.second)), 1e-12);
            EXPECT_TRUE(mesh.boundary[static_cast<std::size_t>(e.first)]);
        }
    }
    for (int i = 0; i < mesh.node_count(); ++i) {
        if (mesh.boundary[static_cast<std::size_t>(i)]) EXPECT_LT(distance_to_loop(loop, mesh.nodes.col(i)), 1e-12);
    }
    for (Eigen::Index v = 0; v < loop.cols(); ++v) {
        double best = 1e300;
        for (int i = 0; i < mesh.node_count(); ++i) best = std::min(best, (mesh.nodes.col(i) - loop.col(v)).norm());
        EXPECT_EQ(best, 0.0);
    }
    EXPECT_GE(mesh.min_angle(), 15.0 * pi / 180.0);
    EXPECT_LE(mesh.max_diameter(), mesh.h * (1.0 + 1e-12));
}

}  // namespace

TEST(Triangulate, UnitSquareCoarse) {
    const Mesh2D m = triangulate(unit_square(), 0.5);
    EXPECT_GE(m.triangles.size(), 8u);
    EXPECT_NEAR(m.area(), 1.0, 1e-12);
    expect_valid_mesh(m, unit_square());
}

TEST(Triangulate, LShape) {
    const Mesh2D m = triangulate(l_shape(), 0.1);
    EXPECT_NEAR(m.area(), 0.75, 1e-12);
    expect_valid_mesh(m, l_shape());
}

TEST(Triangulate, ClockwiseInputAndAcuteCorner) {
    Eigen::Matrix2Xd par(2, 4);
    const double c = std::cos(pi / 4), s = std::sin(pi / 4);
    par << 0, c, 2 + c, 2,
           0, s, s, 0;  // clockwise parallelogram with a 45 degree corner
    const Mesh2D m = triangulate(par, 0.08);
    EXPECT_NEAR(m.area(), 2.0 * s, 1e-12);
    expect_valid_mesh(m, par.rowwise().reverse());
}

TEST(Triangulate, RejectsBowTie) {
    Eigen::Matrix2Xd bow(2, 4);
    bow << 0, 1, 1, 0,
           0, 1, 0, 1;
    EXPECT_THROW((void)triangulate(bow, 0.1), Error);
    EXPECT_THROW((void)triangulate(unit_square(), 0.0), Error);
}

TEST(Triangulate, UniformRefinement) {
    const Mesh2D m = triangulate(l_shape(), 0.2);
    const Mesh2D r = refine_uniform(m);
    EXPECT_EQ(r.triangles.size(), 4 * m.triangles.size());
    EXPECT_NEAR(r.area(), 0.75, 1e-12);
    EXPECT_DOUBLE_EQ(r.h, 0.1);
    expect_valid_mesh(r, l_shape());
}

TEST(Eigs, UnitSquareDirichlet) {
    const Spectrum s = solve_eigs(triangulate(unit_square(), 0.02), BoundaryCondition::dirichlet, 10);
    const auto exact = rectangle_dirichlet(1.0, 1.0, 10);
    ASSERT_EQ(s.eigenvalues.size(), 10u);
    for (int i = 0; i < 10; ++i) EXPECT_NEAR(s.eigenvalues[i] / exact[i], 1.0, 5e-3) << i;
    EXPECT_LT(s.max_residual, 1e-8);
    EXPECT_TRUE(std::is_sorted(s.eigenvalues.begin(), s.eigenvalues.end()));
    EXPECT_GT(s.eigenvalues[0], 0.0);
}

TEST(Eigs, UnitSquareNeumann) {
    const Spectrum s = solve_eigs(triangulate(unit_square(), 0.02), BoundaryCondition::neumann, 3);
    EXPECT_LT(std::abs(s.eigenvalues[0]), 1e-8);
    EXPECT_NEAR(s.eigenvalues[1] / (pi * pi), 1.0, 5e-3);
    EXPECT_NEAR(s.eigenvalues[2] / (pi * pi), 1.0, 5e-3);
}

TEST(Eigs, NeumannGroundStateIsConstant) {
    // The inertia count below a tiny positive shift is exactly one mode.
    const Mesh2D m = triangulate(l_shape(), 0.1);
    const Spectrum s = solve_eigs(m, BoundaryCondition::neumann, 2);
    EXPECT_LT(std::abs(s.eigenvalues[0]), 1e-8);
    EXPECT_GT(s.eigenvalues[1], 1.0);
}

TEST(Eigs, LShapeFirstEigenvalue) {
    // Side-2 L-shape, reference 9.6397 from mesh refinement; the re-entrant
    // corner limits convergence, so the finest mesh is used directly.
    const Mesh2D m = refine_uniform(refine_uniform(triangulate(2.0 * l_shape(), 0.08)));
    const Spectrum s = solve_eigs(m, BoundaryCondition::dirichlet, 1);
    EXPECT_NEAR(s.eigenvalues[0] / 9.6397, 1.0, 5e-3);
}

TEST(Eigs, RichardsonImprovesSquare) {
    const TwoMeshSpectrum two = two_mesh_spectrum(unit_square(), BoundaryCondition::dirichlet, 0.05, 6);
    const Spectrum ex = richardson(two.coarse, two.fine);
    const auto exact = rectangle_dirichlet(1.0, 1.0, 6);
    for (int i = 0; i < 6; ++i) {
        EXPECT_LT(std::abs(ex.eigenvalues[i] - exact[i]), 0.2 * std::abs(two.fine.eigenvalues[i] - exact[i])) << i;
    }
}

TEST(Eigs, InvalidRequests) {
    const Mesh2D m = triangulate(unit_square(), 0.5);
    EXPECT_THROW((void)solve_eigs(m, BoundaryCondition::dirichlet, 0), Error);
    EXPECT_THROW((void)solve_eigs(m, BoundaryCondition::dirichlet, 1000), Error);
}

TEST(Counting, SquareDirichlet) {
    const Spectrum s = solve_eigs(triangulate(unit_square(), 0.03), BoundaryCondition::dirichlet, 14);
    EXPECT_EQ(counting_function(s, 10.0), 6);
    EXPECT_EQ(counting_function(s, 4.0), 0);
    EXPECT_THROW((void)counting_function(s, 20.0), Error);
    EXPECT_NEAR(trust_threshold(s), 0.8 * s.eigenvalues.back(), 0.0);
}

TEST(Counting, NeumannZeroMode) {
    const Spectrum s = solve_eigs(triangulate(unit_square(), 0.1), BoundaryCondition::neumann, 4);
    EXPECT_EQ(counting_function(s, 0.1), 1);
}

TEST(Sweep, FourBarRectangleAndShear) {
    const std::vector<double> lengths{2, 1, 2, 1};
    const std::vector<double> s{0.0, 0.5};
    const SweepResult r = flex_spectrum_sweep(make_flex_polygon(lengths), BoundaryCondition::dirichlet, 0.05, 1, s);
    ASSERT_EQ(r.rows.size(), 2u);
    const double rect = pi * pi * (0.25 + 1.0);
    EXPECT_NEAR(r.rows[0].eigenvalues[0] / rect, 1.0, 5e-3);
    const double diff = std::abs(r.rows[1].eigenvalues[0] - r.rows[0].eigenvalues[0]);
    EXPECT_GT(diff, 10.0 * r.error_bar[0]);
    EXPECT_GT(diff / r.rows[0].eigenvalues[0], 0.01);
}

TEST(Sweep, RigidFamilyWithinErrorBar) {
    const auto fam = FlexFamily::rigid(polygon_surface(unit_square()));
    const SweepResult r = flex_spectrum_sweep(fam, BoundaryCondition::neumann, 0.1, 3, 3);
    for (int i = 0; i < 3; ++i) {
        EXPECT_LE(r.variation[static_cast<std::size_t>(i)] * std::abs(r.rows[0].eigenvalues[static_cast<std::size_t>(i)]),
                  r.error_bar[static_cast<std::size_t>(i)] + 1e-12);
    }
}

TEST(Sweep, RejectsSpatialFamily) {
    EXPECT_THROW((void)flex_spectrum_sweep(make_rigid_cube(), BoundaryCondition::dirichlet, 0.1, 1, 2), Error);
}

// Property tests.

TEST(SpectralProperty, DirichletDomainMonotonicity) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.05, 0.3);
    for (int trial = 0; trial < 3; ++trial) {
        // A square with one corner cut off sits inside the full square.
        const double a = u(rng), b = u(rng);
        Eigen::Matrix2Xd cut(2, 5);
        cut << a, 1, 1, 0, 0,
               0, 0, 1, 1, b;
        const double small = solve_eigs(triangulate(cut, 0.05), BoundaryCondition::dirichlet, 1).eigenvalues[0];
        const double big = solve_eigs(triangulate(unit_square(), 0.05), BoundaryCondition::dirichlet, 1).eigenvalues[0];
        EXPECT_GE(small, big);
    }
}

TEST(SpectralProperty, QuadraticConvergenceOnSquare) {
    const Mesh2D m0 = triangulate(unit_square(), 0.1);
    const Mesh2D m1 = refine_uniform(m0), m2 = refine_uniform(m1);
    const auto e0 = solve_eigs(m0, BoundaryCondition::dirichlet, 3).eigenvalues;
    const auto e1 = solve_eigs(m1, BoundaryCondition::dirichlet, 3).eigenvalues;
    const auto e2 = solve_eigs(m2, BoundaryCondition::dirichlet, 3).eigenvalues;
    for (int i = 0; i < 3; ++i) {
        const double ratio = (e0[i] - e1[i]) / (e1[i] - e2[i]);
        EXPECT_GE(ratio, 2.5) << i;
        EXPECT_LE(ratio, 6.0) << i;
    }
}

TEST(SpectralProperty, Scaling) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.5, 2.0);
    const Mesh2D m = triangulate(l_shape(), 0.1);
    const auto base = solve_eigs(m, BoundaryCondition::dirichlet, 4).eigenvalues;
    for (int trial = 0; trial < 3; ++trial) {
        const double c = u(rng);
        // Scaling the mesh itself keeps the discretisation identical.
        Mesh2D scaled = m;
        scaled.nodes *= c;
        scaled.h *= c;
        const auto ev = solve_eigs(scaled, BoundaryCondition::dirichlet, 4).eigenvalues;
        for (int i = 0; i < 4; ++i) EXPECT_NEAR(ev[i] * c * c / base[i], 1.0, 1e-9);
    }
}

TEST(SpectralProperty, WeylRemainderBoundedOnSquare) {
    const Spectrum s = solve_eigs(triangulate(unit_square(), 0.04), BoundaryCondition::dirichlet, 190);
    const SimplicialSurface boundary = polygon_surface(unit_square());
    for (double k = 10.0; k <= 40.0; k += 0.25) {
        const double diff = counting_function(s, k) - weyl_counting_prediction(boundary, BoundaryCondition::dirichlet, k);
        EXPECT_LE(std::abs(diff), 1.5 * k) << k;
    }
}
