#pragma once

#include <array>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace flexspec {

using Point = Eigen::VectorXd;
using Facet = std::vector<int>;

// A (d-2)-face together with the two facets that contain it. `vertices` is
// listed in the order induced by `facets[0]`.
struct Ridge {
    std::vector<int> vertices;
    std::array<int, 2> facets{};
};

// Oriented closed (d-1)-dimensional simplicial complex mapped affinely into
// R^d. Vertex coordinates are the columns of a d x n matrix. Construction
// validates closedness, coherent orientation and non-degeneracy; the object
// is immutable afterwards.
class SimplicialSurface {
public:
    SimplicialSurface(int dimension, Eigen::MatrixXd vertices, std::vector<Facet> facets);

    [[nodiscard]] int dimension() const noexcept { return dimension_; }
    [[nodiscard]] int vertex_count() const noexcept { return static_cast<int>(vertices_.cols()); }
    [[nodiscard]] int facet_count() const noexcept { return static_cast<int>(facets_.size()); }

    [[nodiscard]] const Eigen::MatrixXd& vertices() const noexcept { return vertices_; }
    [[nodiscard]] Point vertex(int i) const { return vertices_.col(i); }
    [[nodiscard]] std::span<const Facet> facets() const noexcept { return facets_; }
    [[nodiscard]] const Facet& facet(int i) const { return facets_[static_cast<std::size_t>(i)]; }
    [[nodiscard]] std::span<const Ridge> ridges() const noexcept { return ridges_; }

    // Unordered vertex pairs spanned by some facet, sorted lexicographically.
    [[nodiscard]] std::vector<std::array<int, 2>> edges() const;

    // Facet vertices as a d x d matrix (columns are points).
    [[nodiscard]] Eigen::MatrixXd facet_points(int facet) const;

    [[nodiscard]] SimplicialSurface reversed() const;
    [[nodiscard]] SimplicialSurface with_vertices(Eigen::MatrixXd vertices) const;

    // Largest distance between two vertices.
    [[nodiscard]] double diameter() const;

private:
    int dimension_;
    Eigen::MatrixXd vertices_;
    std::vector<Facet> facets_;
    std::vector<Ridge> ridges_;
};

struct DihedralData {
    int ridge = -1;
    double angle = 0.0;    // interior angle of the bounded domain, radians
    double measure = 0.0;  // (d-2)-volume of the ridge; 1 for d = 2
};

// Measure of the simplex spanned by the columns of `points`.
[[nodiscard]] double simplex_measure(const Eigen::MatrixXd& points);

// Outward normal of an oriented facet (not normalised; its length is
// (d-1)! times the facet measure).
[[nodiscard]] Eigen::VectorXd facet_normal(const Eigen::MatrixXd& facet_points);

[[nodiscard]] double oriented_volume(const SimplicialSurface& surface);
[[nodiscard]] double surface_area(const SimplicialSurface& surface);
[[nodiscard]] std::vector<DihedralData> dihedral_angles(const SimplicialSurface& surface);
[[nodiscard]] DihedralData dihedral_angle(const SimplicialSurface& surface, int ridge);
// Interior angle at the ridge shared by two coherently oriented facets,
// evaluated on raw coordinates (columns of `vertices`).
[[nodiscard]] double dihedral_angle_between(const Eigen::MatrixXd& vertices, const Facet& f0, const Facet& f1);
[[nodiscard]] double integral_mean_curvature(const SimplicialSurface& surface);
[[nodiscard]] bool is_embedded(const SimplicialSurface& surface);
[[nodiscard]] double hausdorff_distance(const SimplicialSurface& a, const SimplicialSurface& b);

// Euclidean distance from x to the closed simplex spanned by the columns of
// `simplex` (any dimension up to d).
[[nodiscard]] double point_simplex_distance(const Eigen::VectorXd& x, const Eigen::MatrixXd& simplex);

// sup over x in `from` of dist(x, union of `to`), for closed simplices of
// equal ambient dimension (segments or triangles). Absolute accuracy `tol`.
[[nodiscard]] double directed_hausdorff(std::span<const Eigen::MatrixXd> from, std::span<const Eigen::MatrixXd> to,
                                        double tol);

}  // namespace flexspec
