#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "flexspec/error.hpp"
#include "flexspec/fedosov.hpp"
#include "flexspec/shapes.hpp"
#include "flexspec/tent.hpp"

using namespace flexspec;
using std::numbers::pi;

namespace {

const TentedFamily& tented_steffen() {
    static const TentedFamily t = [] {
        const FlexFamily f = make_steffen();
        return subdivide_and_tent(f, make_tent_spec(f, 0.05), 50);
    }();
    return t;
}

const SigmaReport& steffen_report() {
    static const SigmaReport r = verify_sigma_conditions(tented_steffen().family, tented_steffen().spec, 50);
    return r;
}

double tetra_volume(const Eigen::MatrixXd& v, int a, int b, int c, int d) {
    Eigen::Matrix3d m;
    m << v.col(b) - v.col(a), v.col(c) - v.col(a), v.col(d) - v.col(a);
    return std::abs(m.determinant()) / 6.0;
}

// Rigid motion taking the columns of `from` onto `to` (least squares).
Eigen::Matrix4d kabsch(const Eigen::Matrix3d& from, const Eigen::Matrix3d& to) {
    const Eigen::Vector3d cf = from.rowwise().mean(), ct = to.rowwise().mean();
    const Eigen::Matrix3d h = (from.colwise() - cf) * (to.colwise() - ct).transpose();
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
    d(2, 2) = (svd.matrixV() * svd.matrixU().transpose()).determinant() < 0 ? -1.0 : 1.0;
    const Eigen::Matrix3d r = svd.matrixV() * d * svd.matrixU().transpose();
    Eigen::Matrix4d out = Eigen::Matrix4d::Identity();
    out.topLeftCorner<3, 3>() = r;
    out.topRightCorner<3, 1>() = ct - r * cf;
    return out;
}

}  // namespace

TEST(SelectRidge, FourBarPicksDrivenCorner) {
    const std::vector<double> lengths{2, 1, 2, 1};
    const FlexFamily f = make_flex_polygon(lengths);
    const RidgeProfile p = select_variable_ridge(f);
    EXPECT_EQ(p.ridge, f.driver().ridge);
    // Closed form: the driven corner angle is pi/2 - (pi/4) u with u the driver progress.
    for (std::size_t i = 1; i < 5; ++i) EXPECT_LT(p.angle[i], p.angle[i - 1]);
    EXPECT_NEAR(p.angle[0], pi / 2.0, 1e-12);
}

TEST(SelectRidge, SteffenEdgeMoves) {
    const RidgeProfile p = select_variable_ridge(make_steffen(), 1.0);
    EXPECT_EQ(p.ridge.size(), 2u);
    const auto [lo, hi] = std::minmax_element(p.angle.begin(), p.angle.end());
    EXPECT_GT(*hi - *lo, 0.05);
}

TEST(SelectRidge, RigidFamilyIsNotFlexible) {
    try {
        (void)select_variable_ridge(make_rigid_cube());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::not_flexible);
    }
}

TEST(SelectRidge, NonEmbeddedRejected) {
    EXPECT_THROW((void)select_variable_ridge(make_bricard1()), Error);
}

TEST(PhiStar, MonotoneIncreasing) {
    const double phi0 = 1.3;
    const auto angle = [&](double t) { return phi0 + t; };
    const auto drift = [](double t) { return t; };
    const PhiStar ps = compute_phi_star(angle, drift, 0.1, 0.02);
    EXPECT_TRUE(ps.increasing);
    EXPECT_EQ(ps.phi_star, phi0);
    EXPECT_EQ(ps.t_end, 0.0);
    EXPECT_GT(ps.t_begin, 0.0);
    EXPECT_LT(drift(ps.t_begin), 0.02);
    EXPECT_EQ(angle(ps.t_end), ps.phi_star);
}

TEST(PhiStar, MonotoneDecreasing) {
    const auto angle = [](double t) { return 2.0 - t * t - t; };
    const auto drift = [](double t) { return 3.0 * t; };
    const PhiStar ps = compute_phi_star(angle, drift, 0.1, 0.05);
    EXPECT_FALSE(ps.increasing);
    EXPECT_GT(ps.t_star, 0.0);
    EXPECT_LT(drift(ps.t_star), 0.05);
    EXPECT_NEAR(drift(ps.t_star), 0.05, 1e-10);  // drift limit pinned by bisection
    EXPECT_EQ(ps.t_begin, 0.0);
    EXPECT_EQ(ps.t_end, ps.t_star);
    EXPECT_EQ(ps.phi_star, angle(ps.t_star));
}

TEST(PhiStar, RiseThenFallStopsInsideTheRun) {
    const auto angle = [](double t) { return 1.0 + t * (0.05 - t); };
    const auto drift = [](double t) { return t; };
    const PhiStar ps = compute_phi_star(angle, drift, 0.1, 1.0);
    EXPECT_TRUE(ps.increasing);
    EXPECT_LT(ps.t_begin, 0.05);
    EXPECT_GT(ps.t_begin, 0.049);
    for (int i = 0; i < 1000; ++i) {
        const double s = i / 1000.0;
        EXPECT_GT(angle(ps.t_begin + (ps.t_end - ps.t_begin) * s), ps.phi_star) << s;
    }
}

TEST(PhiStar, FlatProfileExhaustsResolution) {
    try {
        (void)compute_phi_star([](double) { return 1.0; }, [](double t) { return t; }, 0.1, 0.01);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::resolution_exhausted);
    }
    EXPECT_THROW((void)compute_phi_star([](double t) { return t; }, [](double) { return 1.0; }, 0.1, 0.5), Error);
}

TEST(PhiStar, SteffenEndpoint) {
    const FlexFamily f = make_steffen();
    const TentSpec spec = make_tent_spec(f, 0.05);
    const SimplicialSurface ref = f.reference_surface();
    const auto angle_at = [&](double t) {
        const Eigen::MatrixXd v = advance_flex(f, t).vertices;
        for (const auto& r : ref.ridges()) {
            if (std::is_permutation(r.vertices.begin(), r.vertices.end(), spec.ridge.begin())) {
                return dihedral_angle_between(v, ref.facet(r.facets[0]), ref.facet(r.facets[1]));
            }
        }
        return -1.0;
    };
    EXPECT_LT(std::abs(angle_at(spec.t_end) - spec.phi_star), 1e-9);
    EXPECT_GT(angle_at(spec.t_begin), spec.phi_star);
    EXPECT_GT(spec.phi_star, 0.0);
    EXPECT_LT(spec.phi_star, 2.0 * pi);
    EXPECT_THROW((void)make_tent_spec(f, 0.0), Error);
}

TEST(Tent, SteffenAllConditionsHold) {
    const SigmaReport& r = steffen_report();
    EXPECT_TRUE(r.all_pass());
    EXPECT_TRUE(r.subdivision_ok);
    EXPECT_LT(r.hausdorff_to_start, 0.05);
    ASSERT_EQ(r.rows.size(), 50u);
    for (const SigmaRow& row : r.rows) {
        EXPECT_TRUE(row.embedded) << row.s;
        EXPECT_LT(std::abs(row.angle_sum_residual), 1e-9);
        EXPECT_LT(row.hausdorff_bound, 0.05 / 3.0);
    }
}

TEST(Tent, NewAngleIsRidgeAngleMinusPhiStar) {
    const SigmaReport& r = steffen_report();
    for (const SigmaRow& row : r.rows) {
        EXPECT_LT(row.bookkeeping_residual, 1e-9);
        EXPECT_GT(row.phi_tilde, 0.0);
    }
    EXPECT_LT(r.rows.back().phi_tilde, 1e-2);
    EXPECT_LT(r.rows.back().phi_tilde, r.rows.front().phi_tilde);
}

TEST(Tent, OtherAnglesStayInAFixedWindow) {
    double lo = 2.0 * pi, hi = 0.0;
    for (const SigmaRow& row : steffen_report().rows) {
        lo = std::min(lo, row.other_min);
        hi = std::max(hi, row.other_max);
    }
    EXPECT_GT(lo, 0.05);
    EXPECT_LT(hi, 2.0 * pi - 0.05);
}

TEST(Tent, UnmodifiedFamilyReportsFailure) {
    const SigmaReport r = verify_sigma_conditions(make_steffen(), tented_steffen().spec, 5);
    EXPECT_FALSE(r.all_pass());
    for (const SigmaRow& row : r.rows) EXPECT_FALSE(row.angle_sum_ok);
}

TEST(Tent, InvalidRequests) {
    TentSpec bad = tented_steffen().spec;
    bad.epsilon = 0.0;
    EXPECT_THROW((void)verify_sigma_conditions(tented_steffen().family, bad, 10), Error);
    EXPECT_THROW((void)subdivide_and_tent(make_steffen(), bad), Error);
    const std::vector<double> lengths{2, 1, 2, 1};
    const FlexFamily planar = make_flex_polygon(lengths);
    TentSpec flat = make_tent_spec(planar, 0.05);
    try {
        (void)subdivide_and_tent(planar, flat);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::unsupported_dimension);
    }
}

TEST(Tent, FamilyRoundTripsThroughJson) {
    const FlexFamily back = family_from_json(family_to_json(tented_steffen().family));
    for (double s : {0.0, 0.4, 0.999}) {
        const Eigen::MatrixXd a = advance_flex(tented_steffen().family, s).vertices;
        const Eigen::MatrixXd b = advance_flex(back, s).vertices;
        EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(Tent, CoefficientsAlongTheModifiedFamily) {
    const CoefficientTrack t = track_coefficients(tented_steffen().family, BoundaryCondition::dirichlet, 50);
    EXPECT_LT(t.variation[0], 1e-7);
    EXPECT_LT(t.variation[1], 1e-7);
    EXPECT_GT(t.variation[2], 1.0);
    const SigmaReport& r = steffen_report();
    ASSERT_EQ(t.rows.size(), r.rows.size());
    for (std::size_t i = 1; i < t.rows.size(); ++i) {
        if (r.rows[i].phi_tilde < 0.1 && r.rows[i].phi_tilde < r.rows[i - 1].phi_tilde) {
            EXPECT_GT(std::abs(t.rows[i].c.a_dm2), std::abs(t.rows[i - 1].c.a_dm2)) << i;
        }
    }
}

// Property tests.

TEST(TentProperty, TentsMoveRigidlyWithTheirFacets) {
    const auto& tf = tented_steffen();
    const Eigen::MatrixXd v0 = tf.family.reference();
    const double scale = tf.family.reference_surface().diameter();
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 0.999);
    for (int trial = 0; trial < 10; ++trial) {
        const Eigen::MatrixXd v = advance_flex(tf.family, u(rng)).vertices;
        for (const Tent* t : {&tf.spec.y, &tf.spec.z}) {
            Eigen::Matrix3d from, to;
            for (int j = 0; j < 3; ++j) {
                from.col(j) = v0.col(t->apex_frame.frame[static_cast<std::size_t>(j)]);
                to.col(j) = v.col(t->apex_frame.frame[static_cast<std::size_t>(j)]);
            }
            const Eigen::Matrix4d g = kabsch(from, to);
            std::vector<int> ids(t->simplex.begin(), t->simplex.end());
            ids.push_back(t->apex);
            for (int id : ids) {
                const Eigen::Vector3d img = g.topLeftCorner<3, 3>() * v0.col(id) + g.topRightCorner<3, 1>();
                EXPECT_LT((img - v.col(id)).norm(), 1e-9 * scale);
            }
        }
    }
}

TEST(TentProperty, VolumeAccounting) {
    const auto& tf = tented_steffen();
    const FlexFamily& base = *tf.family.base();
    const int nb = base.vertex_count();
    double ty0 = -1.0, tz0 = -1.0;
    for (double s : sample_parameters(12)) {
        const Eigen::MatrixXd v = advance_flex(tf.family, s).vertices;
        const double ty = tetra_volume(v, tf.spec.y.simplex[0], tf.spec.y.simplex[1], tf.spec.y.simplex[2], tf.spec.y.apex);
        const double tz = tetra_volume(v, tf.spec.z.simplex[0], tf.spec.z.simplex[1], tf.spec.z.simplex[2], tf.spec.z.apex);
        if (ty0 < 0.0) {
            ty0 = ty;
            tz0 = tz;
        }
        EXPECT_NEAR(ty, ty0, 1e-12);
        EXPECT_NEAR(tz, tz0, 1e-12);
        // The tents lie inside the domain, so they are cut out of it.
        const double vp = oriented_volume(base.surface(v.leftCols(nb)));
        EXPECT_NEAR(oriented_volume(tf.family.surface(v)), vp - ty - tz, 1e-12);
    }
}

TEST(TentProperty, SubdivisionOfTheStartSurface) {
    const auto& tf = tented_steffen();
    const int nb = tf.family.base()->vertex_count();
    for (double s : {0.0, 0.5, 0.999}) {
        const Eigen::MatrixXd v = advance_flex(tf.family, s).vertices;
        const SimplicialSurface coarse = tf.family.base()->surface(v.leftCols(nb));
        const SimplicialSurface fine(3, v.leftCols(nb + 4), tf.spec.subdivision);
        EXPECT_TRUE(is_subdivision(coarse, fine));
        EXPECT_NEAR(surface_area(fine), surface_area(coarse), 1e-12);
    }
    EXPECT_FALSE(is_subdivision(unit_cube(), unit_tetrahedron()));
    EXPECT_TRUE(is_subdivision(unit_cube(), unit_cube()));
}

TEST(TentProperty, WindingNumber) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> in(0.01, 0.99), out(1.01, 3.0);
    const SimplicialSurface cube = unit_cube();
    for (int trial = 0; trial < 20; ++trial) {
        EXPECT_NEAR(winding_number(cube, Eigen::Vector3d(in(rng), in(rng), in(rng))), 1.0, 1e-12);
        EXPECT_NEAR(winding_number(cube, Eigen::Vector3d(out(rng), in(rng), in(rng))), 0.0, 1e-12);
        EXPECT_NEAR(winding_number(cube.reversed(), Eigen::Vector3d(in(rng), in(rng), in(rng))), -1.0, 1e-12);
    }
}
