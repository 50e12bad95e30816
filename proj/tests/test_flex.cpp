#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Geometry>
#include <gtest/gtest.h>

#include "flexspec/error.hpp"
#include "flexspec/flex.hpp"
#include "flexspec/surface.hpp"

using namespace flexspec;
using std::numbers::pi;

namespace {

// Intersection of circles |x - c1| = r1 and |x - c2| = r2 nearest to `hint`.
Eigen::Vector2d circle_meet(const Eigen::Vector2d& c1, double r1, const Eigen::Vector2d& c2, double r2,
                            const Eigen::Vector2d& hint) {
    const double d = (c2 - c1).norm();
    const double a = (r1 * r1 - r2 * r2 + d * d) / (2.0 * d);
    const double h = std::sqrt(std::max(0.0, r1 * r1 - a * a));
    const Eigen::Vector2d e = (c2 - c1) / d;
    const Eigen::Vector2d m = c1 + a * e;
    const Eigen::Vector2d n(-e.y(), e.x());
    const Eigen::Vector2d p = m + h * n, q = m - h * n;
    return (p - hint).norm() < (q - hint).norm() ? p : q;
}

double relative_spread(const std::vector<double>& v, double scale) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return (*hi - *lo) / scale;
}

}  // namespace

TEST(FlexPolygon, RectangleReference) {
    const std::vector<double> lengths{2, 1, 2, 1};
    const auto fam = make_flex_polygon(lengths);
    Eigen::MatrixXd expect(2, 4);
    expect << 0, 2, 2, 0,
              0, 0, 1, 1;
    EXPECT_LT((fam.reference() - expect).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_EQ(fam.corank(), 1);
    EXPECT_NEAR(fam.driver_begin(), pi / 2.0, 1e-12);
}

TEST(FlexPolygon, HexagonHasThreeInternalDegrees) {
    const std::vector<double> lengths(6, 1.0);
    const auto fam = make_flex_polygon(lengths);
    EXPECT_EQ(fam.corank(), 3);
    EXPECT_NEAR(fam.driver_begin(), 2.0 * pi / 3.0, 1e-12);
    FlexContext ctx(fam);
    for (double s : sample_parameters(10)) EXPECT_LT(ctx.state(s).residual, 1e-10);
}

TEST(FlexPolygon, InfeasibleLengths) {
    const std::vector<double> lengths{10, 1, 1, 1};
    EXPECT_THROW((void)make_flex_polygon(lengths), Error);
    const std::vector<double> three{1, 1, 1};
    EXPECT_THROW((void)make_flex_polygon(three), Error);
}

TEST(FlexPolygon, FourBarMatchesTwoCircleOracle) {
    const std::vector<double> lengths{2, 1, 2, 1};
    const auto fam = make_flex_polygon(lengths);
    FlexContext ctx(fam);
    Eigen::Vector2d prev2(2, 1);
    for (double s : sample_parameters(21, 1.0)) {
        const FlexState st = ctx.state(s);
        const double theta = fam.driver_value(st.vertices);
        // Vertex 0 at the origin and vertex 1 at (2, 0) are pinned.
        const Eigen::Vector2d v3(std::cos(theta), std::sin(theta));
        const Eigen::Vector2d v2 = circle_meet(Eigen::Vector2d(2, 0), 1.0, v3, 2.0, prev2);
        prev2 = v2;
        EXPECT_LT((st.vertices.col(3) - v3).norm(), 1e-9) << "s=" << s;
        EXPECT_LT((st.vertices.col(2) - v2).norm(), 1e-9) << "s=" << s;
    }
    EXPECT_NEAR(fam.driver_value(ctx.state(1.0).vertices), pi / 4.0, 1e-12);
}

TEST(Flex, ZeroParameterIsReferenceExactly) {
    const std::vector<double> lengths{2, 1, 2, 1};
    for (const auto& fam : {make_flex_polygon(lengths), make_bricard1(), make_rigid_cube()}) {
        const FlexState st = advance_flex(fam, 0.0);
        EXPECT_TRUE(st.vertices == fam.reference());
    }
}

TEST(Flex, ParameterOutOfRange) {
    const auto fam = make_bricard1();
    EXPECT_THROW((void)advance_flex(fam, 1.5), Error);
    EXPECT_THROW((void)advance_flex(fam, -0.1), Error);
}

TEST(Flex, RigidCubeIsConstant) {
    const auto fam = make_rigid_cube();
    EXPECT_TRUE(advance_flex(fam, 0.7).vertices == fam.reference());
    EXPECT_THROW((void)FlexFamily::continuation(fam.reference_surface(), Driver{Driver::Kind::ridge_angle, {0, 1}}, 1.0),
                 Error);
}

TEST(Bricard, NotEmbeddedAndInvariant) {
    const auto fam = make_bricard1();
    EXPECT_EQ(fam.vertex_count(), 6);
    EXPECT_EQ(fam.facets().size(), 8u);
    EXPECT_EQ(fam.corank(), 1);
    EXPECT_FALSE(is_embedded(fam.reference_surface()));

    FlexContext ctx(fam);
    const double scale = fam.reference_surface().diameter();
    std::vector<double> vol, area, mean;
    for (double s : sample_parameters(50)) {
        const FlexState st = ctx.state(s);
        EXPECT_LT(st.residual, 1e-9);
        EXPECT_FALSE(st.branch_point);
        const auto surf = fam.surface(st.vertices);
        vol.push_back(oriented_volume(surf));
        area.push_back(surface_area(surf));
        mean.push_back(integral_mean_curvature(surf));
    }
    // Oriented volume and integral mean curvature of this octahedron are both
    // zero, so their spreads are measured against diameter^3 and total edge length.
    double total_edge = 0.0;
    for (double l : fam.edge_lengths()) total_edge += l;
    EXPECT_LT(relative_spread(vol, std::pow(scale, 3)), 1e-8);
    EXPECT_LT(relative_spread(area, area.front()), 1e-12);
    EXPECT_LT(relative_spread(mean, total_edge), 1e-8);
    EXPECT_FALSE(check_congruence(ctx.state(0.0), ctx.state(0.5)));
}

TEST(Congruence, RigidMotionsAndReflections) {
    const auto fam = make_bricard1();
    const FlexState a = advance_flex(fam, 0.3);
    FlexState b = a;
    const Eigen::Matrix3d rot = Eigen::AngleAxisd(0.7, Eigen::Vector3d(1, 2, 3).normalized()).toRotationMatrix();
    b.vertices = (rot * a.vertices).colwise() + Eigen::Vector3d(5, -1, 2);
    EXPECT_TRUE(check_congruence(a, a));
    EXPECT_TRUE(check_congruence(a, b));
    b.vertices.row(0) *= -1.0;
    EXPECT_TRUE(check_congruence(a, b));
}

// Property tests.

TEST(FlexProperty, EdgeLengthsPreservedOnRandomPolygons) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.5, 2.0);
    for (int trial = 0; trial < 8; ++trial) {
        const int n = 4 + trial % 4;
        std::vector<double> lengths(static_cast<std::size_t>(n));
        for (double& l : lengths) l = u(rng);
        FlexFamily fam = [&] {
            for (;;) {
                try {
                    return make_flex_polygon(lengths);
                } catch (const Error&) {
                    for (double& l : lengths) l = u(rng);
                }
            }
        }();
        FlexContext ctx(fam);
        for (double s : sample_parameters(12, 1.0)) EXPECT_LT(ctx.state(s).residual, 1e-9);
    }
}

TEST(FlexProperty, StepsAreLipschitz) {
    const std::vector<double> lengths{2, 1, 2, 1};
    for (const auto& fam : {make_flex_polygon(lengths), make_bricard1()}) {
        FlexContext ctx(fam);
        const auto& path = ctx.path();
        ASSERT_GT(path.size(), 2u);
        for (std::size_t k = 1; k < path.size(); ++k) {
            const double moved = (path[k].x - path[k - 1].x).norm();
            EXPECT_LE(moved, 10.0 * std::abs(path[k].step) * path[k].tangent_norm);
        }
    }
}

TEST(FlexProperty, FamiliesAreNotCongruentAcrossTheFlex) {
    const std::vector<double> lengths{2, 1, 2, 1};
    for (const auto& fam : {make_flex_polygon(lengths), make_bricard1()}) {
        EXPECT_FALSE(check_congruence(advance_flex(fam, 0.0), advance_flex(fam, 0.5)));
    }
}

namespace {

// Point at distances r1, r2, r3 from p1, p2, p3, on the side nearest `hint`.
Eigen::Vector3d trilaterate(const Eigen::Vector3d& p1, const Eigen::Vector3d& p2, const Eigen::Vector3d& p3,
                            double r1, double r2, double r3, const Eigen::Vector3d& hint) {
    const double d = (p2 - p1).norm();
    const Eigen::Vector3d ex = (p2 - p1) / d;
    const double i = ex.dot(p3 - p1);
    const Eigen::Vector3d ey = (p3 - p1 - i * ex).normalized();
    const Eigen::Vector3d ez = ex.cross(ey);
    const double j = ey.dot(p3 - p1);
    const double x = (r1 * r1 - r2 * r2 + d * d) / (2.0 * d);
    const double y = (r1 * r1 - r3 * r3 + i * i + j * j) / (2.0 * j) - i / j * x;
    const double z = std::sqrt(std::max(0.0, r1 * r1 - x * x - y * y));
    const Eigen::Vector3d s1 = p1 + x * ex + y * ey + z * ez, s2 = p1 + x * ex + y * ey - z * ez;
    return (s1 - hint).norm() < (s2 - hint).norm() ? s1 : s2;
}

// Signed angle of plane (a, c, p) about the axis a -> c, from a fixed frame.
double angle_about(const Eigen::Vector3d& a, const Eigen::Vector3d& c, const Eigen::Vector3d& ref,
                   const Eigen::Vector3d& p) {
    const Eigen::Vector3d k = (c - a).normalized();
    const Eigen::Vector3d e1 = ((ref - a) - (ref - a).dot(k) * k).normalized();
    const Eigen::Vector3d e2 = k.cross(e1);
    const Eigen::Vector3d w = p - a;
    return std::atan2(w.dot(e2), w.dot(e1));
}

// Steffen vertex order: A B C D E X1 Y1 X2 Y2. With A, B, C, E held, D turns
// about AC and each crinkle vertex is fixed by three of its edges.
Eigen::MatrixXd steffen_by_trilateration(const Eigen::MatrixXd& ref, double theta, const Eigen::MatrixXd& hint) {
    const auto col = [&](int i) -> Eigen::Vector3d { return ref.col(i); };
    const auto len = [&](int i, int j) { return (ref.col(i) - ref.col(j)).norm(); };
    const Eigen::Vector3d a = col(0), b = col(1), c = col(2), e = col(4);
    const Eigen::Vector3d d = a + Eigen::AngleAxisd(theta, (c - a).normalized()) * (col(3) - a);
    Eigen::MatrixXd out(3, 9);
    out.col(0) = a;
    out.col(1) = b;
    out.col(2) = c;
    out.col(3) = d;
    out.col(4) = e;
    out.col(5) = trilaterate(c, b, d, len(5, 2), len(5, 1), len(5, 3), hint.col(5));
    out.col(6) = trilaterate(a, b, d, len(6, 0), len(6, 1), len(6, 3), hint.col(6));
    out.col(7) = trilaterate(c, d, e, len(7, 2), len(7, 3), len(7, 4), hint.col(7));
    out.col(8) = trilaterate(a, d, e, len(8, 0), len(8, 3), len(8, 4), hint.col(8));
    return out;
}

}  // namespace

TEST(Steffen, Counts) {
    const auto fam = make_steffen();
    const auto surf = fam.reference_surface();
    EXPECT_EQ(surf.vertex_count(), 9);
    EXPECT_EQ(surf.facet_count(), 14);
    EXPECT_EQ(surf.edges().size(), 21u);
    EXPECT_EQ(fam.corank(), 1);
    EXPECT_GT(oriented_volume(surf), 0.0);
}

TEST(Steffen, EmbeddedAlongTheFlex) {
    const auto fam = make_steffen();
    FlexContext ctx(fam);
    for (double s : sample_parameters(50)) {
        const FlexState st = ctx.state(s);
        EXPECT_TRUE(is_embedded(fam.surface(st.vertices))) << "s=" << s;
        EXPECT_LT(st.residual, 1e-9) << "s=" << s;
        EXPECT_FALSE(st.branch_point);
    }
}

TEST(Steffen, DihedralAnglesMove) {
    const auto fam = make_steffen();
    const auto a0 = dihedral_angles(fam.reference_surface());
    const auto a1 = dihedral_angles(fam.surface(advance_flex(fam, 0.999).vertices));
    double biggest = 0.0;
    for (std::size_t k = 0; k < a0.size(); ++k) biggest = std::max(biggest, std::abs(a1[k].angle - a0[k].angle));
    EXPECT_GT(biggest, 0.05);
}

TEST(Steffen, AllEdgeLengthsHeldMidway) {
    const auto fam = make_steffen();
    const FlexState st = advance_flex(fam, 0.5);
    const auto lengths = fam.edge_lengths();
    ASSERT_EQ(lengths.size(), 21u);
    for (std::size_t k = 0; k < lengths.size(); ++k) {
        const auto [i, j] = fam.edges()[k];
        EXPECT_NEAR((st.vertices.col(i) - st.vertices.col(j)).norm(), lengths[k], 1e-10 * lengths[k]);
    }
}

TEST(Steffen, MatchesTrilaterationOracle) {
    const auto fam = make_steffen();
    const Eigen::MatrixXd& ref = fam.reference();
    FlexContext ctx(fam);
    Eigen::MatrixXd hint = ref;
    for (double s : sample_parameters(11)) {
        const FlexState st = ctx.state(s);
        const auto& w = st.vertices;
        // Turn of D about AC relative to B, compared with the reference.
        const double theta = angle_about(w.col(0), w.col(2), w.col(1), w.col(3)) -
                             angle_about(ref.col(0), ref.col(2), ref.col(1), ref.col(3));
        FlexState oracle;
        oracle.vertices = steffen_by_trilateration(ref, theta, hint);
        hint = oracle.vertices;
        EXPECT_TRUE(check_congruence(st, oracle)) << "s=" << s;
    }
}

TEST(Steffen, NotCongruentMidway) {
    const auto fam = make_steffen();
    EXPECT_FALSE(check_congruence(advance_flex(fam, 0.0), advance_flex(fam, 0.5)));
}

TEST(FlexJson, RoundTripPreservesFamilies) {
    const std::vector<double> lengths{2, 1, 2, 1};
    for (const auto& fam : {make_flex_polygon(lengths), make_bricard1(), make_steffen(), make_rigid_cube()}) {
        const FlexFamily back = family_from_json(family_to_json(fam));
        EXPECT_EQ(back.kind(), fam.kind());
        EXPECT_LT((back.reference() - fam.reference()).cwiseAbs().maxCoeff(), 1e-15);
        EXPECT_NEAR(back.driver_end(), fam.driver_end(), 1e-15);
        EXPECT_TRUE(check_congruence(advance_flex(back, 0.6), advance_flex(fam, 0.6)));
    }
}

TEST(FlexJson, AttachedFamilyRoundTrip) {
    auto base = std::make_shared<const FlexFamily>(make_bricard1());
    Attachment a;
    a.frame = {0, 2, 1};
    a.weights = Eigen::Vector3d(0.0, 1.0 / 3.0, 1.0 / 3.0);
    a.offset = 0.1;
    std::vector<Facet> facets(base->facets().begin(), base->facets().end());
    const Facet f0 = facets[0];
    facets.erase(facets.begin());
    for (int k = 0; k < 3; ++k) facets.push_back({f0[static_cast<std::size_t>(k)], f0[static_cast<std::size_t>((k + 1) % 3)], 6});
    const auto fam = FlexFamily::attached(base, 0.1, 0.9, {a}, facets);
    const FlexFamily back = family_from_json(family_to_json(fam));
    EXPECT_EQ(back.kind(), FamilyKind::attached);
    EXPECT_EQ(back.vertex_count(), 7);
    EXPECT_LT((advance_flex(back, 0.4).vertices - advance_flex(fam, 0.4).vertices).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(FlexJson, SurfaceRoundTripAndErrors) {
    const auto s = make_steffen().reference_surface();
    const auto back = surface_from_json(surface_to_json(s));
    EXPECT_NEAR(oriented_volume(back), oriented_volume(s), 1e-14);
    EXPECT_THROW((void)surface_from_json("{not json"), Error);
    EXPECT_THROW((void)family_from_json(R"({"kind":"spiral","dimension":2,"vertices":[],"facets":[]})"), Error);
}
