#include "flexspec/surface.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "flexspec/error.hpp"
#include "flexspec/predicates.hpp"

namespace flexspec {
namespace {

constexpr double kDegenerateRelTol = 1e-12;

double factorial(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

// Parity of the permutation that sorts `v` (all entries distinct).
int permutation_parity(std::vector<int> v) {
    int swaps = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        for (std::size_t j = 0; j + 1 < v.size() - i; ++j) {
            if (v[j] > v[j + 1]) {
                std::swap(v[j], v[j + 1]);
                ++swaps;
            }
        }
    }
    return swaps % 2 == 0 ? 1 : -1;
}

double max_edge_length(const Eigen::MatrixXd& points) {
    double longest = 0.0;
    for (Eigen::Index i = 0; i < points.cols(); ++i) {
        for (Eigen::Index j = i + 1; j < points.cols(); ++j) {
            longest = std::max(longest, (points.col(i) - points.col(j)).norm());
        }
    }
    return longest;
}

}  // namespace

double simplex_measure(const Eigen::MatrixXd& points) {
    const auto k = points.cols() - 1;
    if (k <= 0) return 1.0;
    Eigen::MatrixXd edges(points.rows(), k);
    for (Eigen::Index j = 0; j < k; ++j) edges.col(j) = points.col(j + 1) - points.col(0);
    const double gram = (edges.transpose() * edges).determinant();
    return std::sqrt(std::max(gram, 0.0)) / factorial(static_cast<int>(k));
}

Eigen::VectorXd facet_normal(const Eigen::MatrixXd& facet_points) {
    const auto d = facet_points.rows();
    Eigen::MatrixXd m(d, d);
    for (Eigen::Index j = 1; j < d; ++j) m.col(j) = facet_points.col(j) - facet_points.col(0);
    Eigen::VectorXd normal(d);
    for (Eigen::Index k = 0; k < d; ++k) {
        m.col(0).setZero();
        m(k, 0) = 1.0;
        normal[k] = m.determinant();
    }
    return normal;
}

SimplicialSurface::SimplicialSurface(int dimension, Eigen::MatrixXd vertices, std::vector<Facet> facets)
    : dimension_(dimension), vertices_(std::move(vertices)), facets_(std::move(facets)) {
    if (dimension_ < 2) throw Error(ErrorKind::unsupported_dimension, "surface dimension must be >= 2");
    if (vertices_.rows() != dimension_) {
        throw Error(ErrorKind::invalid_surface, "vertex coordinates do not match the surface dimension");
    }
    if (facets_.empty()) throw Error(ErrorKind::invalid_surface, "surface has no facets");

    const int n = vertex_count();
    // ridge key -> (facet, induced orientation sign)
    std::map<std::vector<int>, std::vector<std::pair<int, int>>> incidence;
    for (int f = 0; f < facet_count(); ++f) {
        const Facet& facet = facets_[static_cast<std::size_t>(f)];
        if (static_cast<int>(facet.size()) != dimension_) {
            throw Error(ErrorKind::invalid_surface, "facet " + std::to_string(f) + " is not a (d-1)-simplex");
        }
        for (int v : facet) {
            if (v < 0 || v >= n) throw Error(ErrorKind::invalid_surface, "facet index out of range");
        }
        auto sorted = facet;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            throw Error(ErrorKind::invalid_surface, "facet " + std::to_string(f) + " repeats a vertex");
        }

        const Eigen::MatrixXd pts = facet_points(f);
        const double scale = max_edge_length(pts);
        if (simplex_measure(pts) < kDegenerateRelTol * std::pow(scale, dimension_ - 1) || scale == 0.0) {
            throw Error(ErrorKind::invalid_surface, "facet " + std::to_string(f) + " is degenerate");
        }

        for (int k = 0; k < dimension_; ++k) {
            std::vector<int> rest;
            for (int j = 0; j < dimension_; ++j) {
                if (j != k) rest.push_back(facet[static_cast<std::size_t>(j)]);
            }
            const int sign = (k % 2 == 0 ? 1 : -1) * permutation_parity(rest);
            std::sort(rest.begin(), rest.end());
            incidence[rest].emplace_back(f, sign);
        }
    }

    ridges_.reserve(incidence.size());
    for (const auto& [key, users] : incidence) {
        if (users.size() != 2) {
            throw Error(ErrorKind::invalid_surface,
                        "ridge shared by " + std::to_string(users.size()) + " facets (surface not closed)");
        }
        if (users[0].second == users[1].second) {
            throw Error(ErrorKind::invalid_surface, "facet orientations are not coherent");
        }
        Ridge ridge;
        ridge.facets = {users[0].first, users[1].first};
        for (int v : facets_[static_cast<std::size_t>(users[0].first)]) {
            if (std::binary_search(key.begin(), key.end(), v)) ridge.vertices.push_back(v);
        }
        ridges_.push_back(std::move(ridge));
    }
}

std::vector<std::array<int, 2>> SimplicialSurface::edges() const {
    std::vector<std::array<int, 2>> out;
    for (const Facet& f : facets_) {
        for (std::size_t i = 0; i < f.size(); ++i) {
            for (std::size_t j = i + 1; j < f.size(); ++j) {
                out.push_back({std::min(f[i], f[j]), std::max(f[i], f[j])});
            }
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

Eigen::MatrixXd SimplicialSurface::facet_points(int facet) const {
    const Facet& f = facets_[static_cast<std::size_t>(facet)];
    Eigen::MatrixXd pts(dimension_, static_cast<Eigen::Index>(f.size()));
    for (std::size_t j = 0; j < f.size(); ++j) pts.col(static_cast<Eigen::Index>(j)) = vertices_.col(f[j]);
    return pts;
}

SimplicialSurface SimplicialSurface::reversed() const {
    auto flipped = facets_;
    for (Facet& f : flipped) std::swap(f[0], f[1]);
    return {dimension_, vertices_, std::move(flipped)};
}

SimplicialSurface SimplicialSurface::with_vertices(Eigen::MatrixXd vertices) const {
    return {dimension_, std::move(vertices), facets_};
}

double SimplicialSurface::diameter() const {
    double best = 0.0;
    for (int i = 0; i < vertex_count(); ++i) {
        for (int j = i + 1; j < vertex_count(); ++j) {
            best = std::max(best, (vertices_.col(i) - vertices_.col(j)).squaredNorm());
        }
    }
    return std::sqrt(best);
}

double oriented_volume(const SimplicialSurface& surface) {
    double sum = 0.0;
    for (int f = 0; f < surface.facet_count(); ++f) sum += surface.facet_points(f).determinant();
    return sum / factorial(surface.dimension());
}

double surface_area(const SimplicialSurface& surface) {
    double sum = 0.0;
    for (int f = 0; f < surface.facet_count(); ++f) sum += simplex_measure(surface.facet_points(f));
    return sum;
}

double dihedral_angle_between(const Eigen::MatrixXd& vertices, const Facet& f0, const Facet& f1) {
    const auto d = vertices.rows();
    std::vector<int> ridge;
    for (int v : f0) {
        if (std::find(f1.begin(), f1.end(), v) != f1.end()) ridge.push_back(v);
    }
    if (static_cast<Eigen::Index>(ridge.size()) != d - 1) {
        throw Error(ErrorKind::invalid_argument, "facets do not share a ridge");
    }
    const Eigen::VectorXd base = vertices.col(ridge[0]);

    Eigen::MatrixXd ridge_basis;
    if (d > 2) {
        Eigen::MatrixXd span(d, d - 2);
        for (Eigen::Index j = 0; j < d - 2; ++j) span.col(j) = vertices.col(ridge[static_cast<std::size_t>(j + 1)]) - base;
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(span);
        ridge_basis = qr.householderQ() * Eigen::MatrixXd::Identity(d, d - 2);
    }

    // Unit vector inside facet f, orthogonal to the ridge, pointing away from it.
    const auto inward = [&](const Facet& f) {
        int opposite = -1;
        for (int v : f) {
            if (std::find(ridge.begin(), ridge.end(), v) == ridge.end()) opposite = v;
        }
        Eigen::VectorXd w = vertices.col(opposite) - base;
        if (ridge_basis.size() > 0) w -= ridge_basis * (ridge_basis.transpose() * w);
        return Eigen::VectorXd(w.normalized());
    };

    Eigen::MatrixXd p0(d, static_cast<Eigen::Index>(f0.size()));
    for (std::size_t j = 0; j < f0.size(); ++j) p0.col(static_cast<Eigen::Index>(j)) = vertices.col(f0[j]);
    const Eigen::VectorXd u1 = inward(f0);
    const Eigen::VectorXd u2 = inward(f1);
    const Eigen::VectorXd n1 = facet_normal(p0).normalized();

    double angle = std::atan2(-u2.dot(n1), u2.dot(u1));
    if (angle < 0.0) angle += 2.0 * std::numbers::pi;
    return angle;
}

DihedralData dihedral_angle(const SimplicialSurface& surface, int ridge_index) {
    const Ridge& ridge = surface.ridges()[static_cast<std::size_t>(ridge_index)];
    Eigen::MatrixXd ridge_pts(surface.dimension(), static_cast<Eigen::Index>(ridge.vertices.size()));
    for (std::size_t j = 0; j < ridge.vertices.size(); ++j) {
        ridge_pts.col(static_cast<Eigen::Index>(j)) = surface.vertex(ridge.vertices[j]);
    }
    const double angle =
        dihedral_angle_between(surface.vertices(), surface.facet(ridge.facets[0]), surface.facet(ridge.facets[1]));
    return {ridge_index, angle, simplex_measure(ridge_pts)};
}

std::vector<DihedralData> dihedral_angles(const SimplicialSurface& surface) {
    std::vector<DihedralData> out;
    out.reserve(surface.ridges().size());
    for (int r = 0; r < static_cast<int>(surface.ridges().size()); ++r) out.push_back(dihedral_angle(surface, r));
    return out;
}

double integral_mean_curvature(const SimplicialSurface& surface) {
    if (surface.dimension() != 3) {
        throw Error(ErrorKind::unsupported_dimension, "integral mean curvature is defined here for d = 3");
    }
    double sum = 0.0;
    for (const DihedralData& dd : dihedral_angles(surface)) sum += (std::numbers::pi - dd.angle) * dd.measure;
    return 0.5 * sum;
}

bool is_embedded(const SimplicialSurface& surface) {
    const int d = surface.dimension();
    if (d != 2 && d != 3) throw Error(ErrorKind::unsupported_dimension, "embedding test supports d = 2 and d = 3");
    const int m = surface.facet_count();
    std::vector<Eigen::MatrixXd> pts;
    pts.reserve(static_cast<std::size_t>(m));
    std::vector<Eigen::VectorXd> lo, hi;
    for (int f = 0; f < m; ++f) {
        pts.push_back(surface.facet_points(f));
        lo.emplace_back(pts.back().rowwise().minCoeff());
        hi.emplace_back(pts.back().rowwise().maxCoeff());
    }
    for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j) {
            const auto& fi = surface.facet(i);
            const auto& fj = surface.facet(j);
            const bool share = std::any_of(fi.begin(), fi.end(), [&](int v) {
                return std::find(fj.begin(), fj.end(), v) != fj.end();
            });
            // Closed boxes that are disjoint cannot hold touching facets.
            if (!share && ((lo[static_cast<std::size_t>(i)].array() > hi[static_cast<std::size_t>(j)].array()).any() ||
                           (lo[static_cast<std::size_t>(j)].array() > hi[static_cast<std::size_t>(i)].array()).any())) {
                continue;
            }
            if (facets_clash(fi, pts[static_cast<std::size_t>(i)], fj, pts[static_cast<std::size_t>(j)])) return false;
        }
    }
    return true;
}

}  // namespace flexspec
