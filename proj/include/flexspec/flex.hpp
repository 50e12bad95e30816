#pragma once

#include <array>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "flexspec/surface.hpp"

namespace flexspec {

// Quantity used as the continuation parameter.
struct Driver {
    enum class Kind { ridge_angle, coordinate };
    Kind kind = Kind::ridge_angle;
    std::vector<int> ridge;  // d-1 vertex ids, for ridge_angle
    int vertex = -1;         // for coordinate
    int axis = 0;
};

// A vertex carried rigidly by a base facet:
//   p = q_0 + sum_{j>=1} weights[j] (q_j - q_0) + offset * unit_normal(q_0..q_{d-1}),
// where q are the base positions of `frame`. weights sum to one.
struct Attachment {
    std::vector<int> frame;
    Eigen::VectorXd weights;
    double offset = 0.0;
};

struct FlexState {
    double s = 0.0;
    Eigen::MatrixXd vertices;   // d x n
    double residual = 0.0;      // max relative edge-length error
    bool branch_point = false;  // path was cut short by a rank drop
};

enum class FamilyKind { rigid, continuation, attached };

class FlexFamily {
public:
    // Constant family.
    static FlexFamily rigid(const SimplicialSurface& surface);

    // Edge-length constraint manifold traced from `reference` while the
    // driver moves monotonically from its reference value to `driver_end`.
    // The vertices of `gauge_facet` stay at their reference positions.
    static FlexFamily continuation(const SimplicialSurface& reference, Driver driver, double driver_end,
                                   int gauge_facet = 0);

    // Family over `base` evaluated at base parameter s_begin + (s_end - s_begin) * s,
    // with extra rigidly attached vertices (ids base.vertex_count() + k) and a
    // new facet list over all vertices.
    static FlexFamily attached(std::shared_ptr<const FlexFamily> base, double s_begin, double s_end,
                               std::vector<Attachment> attachments, std::vector<Facet> facets);

    [[nodiscard]] FamilyKind kind() const noexcept { return kind_; }
    [[nodiscard]] int dimension() const noexcept { return dimension_; }
    [[nodiscard]] int vertex_count() const noexcept { return static_cast<int>(reference_.cols()); }
    [[nodiscard]] std::span<const Facet> facets() const noexcept { return facets_; }
    [[nodiscard]] const Eigen::MatrixXd& reference() const noexcept { return reference_; }
    [[nodiscard]] std::span<const std::array<int, 2>> edges() const noexcept { return edges_; }
    [[nodiscard]] std::span<const double> edge_lengths() const noexcept { return lengths_; }

    [[nodiscard]] const Driver& driver() const noexcept { return driver_; }
    [[nodiscard]] double driver_begin() const noexcept { return driver_begin_; }
    [[nodiscard]] double driver_end() const noexcept { return driver_end_; }
    [[nodiscard]] int gauge_facet() const noexcept { return gauge_facet_; }
    [[nodiscard]] int corank() const noexcept { return corank_; }

    [[nodiscard]] const std::shared_ptr<const FlexFamily>& base() const noexcept { return base_; }
    [[nodiscard]] double s_begin() const noexcept { return s_begin_; }
    [[nodiscard]] double s_end() const noexcept { return s_end_; }
    [[nodiscard]] std::span<const Attachment> attachments() const noexcept { return attachments_; }

    [[nodiscard]] SimplicialSurface surface(const Eigen::MatrixXd& vertices) const;
    [[nodiscard]] SimplicialSurface reference_surface() const { return surface(reference_); }

    // Max over edges of |length - reference| / reference.
    [[nodiscard]] double edge_residual(const Eigen::MatrixXd& vertices) const;

    // Current value of the driver.
    [[nodiscard]] double driver_value(const Eigen::MatrixXd& vertices) const;

private:
    FlexFamily() = default;
    void init_edges();

    FamilyKind kind_ = FamilyKind::rigid;
    int dimension_ = 0;
    std::vector<Facet> facets_;
    Eigen::MatrixXd reference_;
    std::vector<std::array<int, 2>> edges_;
    std::vector<double> lengths_;

    Driver driver_;
    std::array<int, 2> driver_facets_{-1, -1};
    double driver_begin_ = 0.0;
    double driver_end_ = 0.0;
    int gauge_facet_ = 0;
    int corank_ = 0;

    std::shared_ptr<const FlexFamily> base_;
    double s_begin_ = 0.0;
    double s_end_ = 1.0;
    std::vector<Attachment> attachments_;
};

struct PathNode {
    double driver = 0.0;
    double arclength = 0.0;  // accumulated chord length in gauge coordinates
    double step = 0.0;       // driver increment that produced this node
    double tangent_norm = 0.0;
    Eigen::VectorXd x;       // free coordinates
};

// Per-computation cache of a traced path. Not thread-safe; use one context
// per thread.
class FlexContext {
public:
    explicit FlexContext(const FlexFamily& family);
    ~FlexContext();
    FlexContext(const FlexContext&) = delete;
    FlexContext& operator=(const FlexContext&) = delete;

    // s in [0, 1]; s = 0 returns the reference coordinates exactly.
    [[nodiscard]] FlexState state(double s);

    // Continuation nodes (empty for rigid and attached families).
    [[nodiscard]] const std::vector<PathNode>& path();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

[[nodiscard]] FlexState advance_flex(const FlexFamily& family, double s);

// n parameter values 0, ..., s_max evenly spaced (n >= 2).
[[nodiscard]] std::vector<double> sample_parameters(int n, double s_max = 0.999);

// Distance matrices agree within 1e-8 relative (congruence up to rigid motion
// and reflection).
[[nodiscard]] bool check_congruence(const FlexState& a, const FlexState& b);

// Built-in families.
[[nodiscard]] FlexFamily make_flex_polygon(std::span<const double> lengths);
[[nodiscard]] FlexFamily make_bricard1();
[[nodiscard]] FlexFamily make_steffen();
[[nodiscard]] FlexFamily make_rigid_cube();

// Construction of the built-in Steffen-type polyhedron: a rhombic frame
// A(-1,0,0), C(1,0,0), D(0,frame_height,0) and crinkles obtained by the
// half-turn about (axis_point, axis_direction), mirrored by (x,y,z) -> (-x,y,-z).
struct SteffenParameters {
    double frame_height = 0.0;
    Eigen::Vector3d axis_point;
    Eigen::Vector3d axis_direction;
    std::array<int, 2> driver_ridge{};
    double driver_span = 0.0;  // radians beyond the reference angle
};
[[nodiscard]] SteffenParameters steffen_parameters();

// JSON round trip of families and surfaces.
[[nodiscard]] std::string family_to_json(const FlexFamily& family);
[[nodiscard]] FlexFamily family_from_json(const std::string& text);
[[nodiscard]] std::string surface_to_json(const SimplicialSurface& surface);
[[nodiscard]] SimplicialSurface surface_from_json(const std::string& text);

}  // namespace flexspec
