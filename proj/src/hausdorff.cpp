#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <vector>

#include <Eigen/Dense>

#include "flexspec/error.hpp"
#include "flexspec/surface.hpp"

namespace flexspec {

double point_simplex_distance(const Eigen::VectorXd& x, const Eigen::MatrixXd& simplex) {
    const int m = static_cast<int>(simplex.cols());
    double best = std::numeric_limits<double>::infinity();
    // The closest point lies in the relative interior of some face, where it
    // is the affine projection onto that face; enumerate all faces.
    for (unsigned mask = 1; mask < (1u << m); ++mask) {
        std::vector<int> ids;
        for (int i = 0; i < m; ++i) {
            if (mask & (1u << i)) ids.push_back(i);
        }
        const Eigen::VectorXd t0 = simplex.col(ids[0]);
        if (ids.size() == 1) {
            best = std::min(best, (x - t0).norm());
            continue;
        }
        const auto k = static_cast<Eigen::Index>(ids.size() - 1);
        Eigen::MatrixXd e(x.size(), k);
        for (Eigen::Index j = 0; j < k; ++j) e.col(j) = simplex.col(ids[static_cast<std::size_t>(j + 1)]) - t0;
        const Eigen::VectorXd lambda = (e.transpose() * e).ldlt().solve(e.transpose() * (x - t0));
        if ((lambda.array() < -1e-14).any() || lambda.sum() > 1.0 + 1e-14) continue;
        best = std::min(best, (x - t0 - e * lambda).norm());
    }
    return best;
}

namespace {

struct Cell {
    Eigen::MatrixXd points;      // d x (k+1)
    Eigen::MatrixXd distances;   // (k+1) x |to|, vertex-to-target-simplex distances
    double upper = 0.0;
    Eigen::VectorXd best_point;  // maximiser of the interpolated bound
};

struct CellOrder {
    bool operator()(const Cell& a, const Cell& b) const { return a.upper < b.upper; }
};

// Distance to a single convex simplex is convex, so on a cell it is bounded by
// the linear interpolant of its vertex values. The distance to the union is
// the minimum over targets; maximise min_j of those interpolants over the
// cell (a small max-min LP solved by enumerating arrangement vertices).
void bound_cell(Cell& cell) {
    const auto nv = cell.points.cols();
    const auto nt = cell.distances.cols();
    constexpr Eigen::Index kCandidates = 6;

    std::vector<Eigen::Index> order(static_cast<std::size_t>(nt));
    std::iota(order.begin(), order.end(), 0);
    const Eigen::VectorXd mean = cell.distances.colwise().mean();
    const auto take = std::min<Eigen::Index>(kCandidates, nt);
    std::partial_sort(order.begin(), order.begin() + take, order.end(),
                      [&](Eigen::Index a, Eigen::Index b) { return mean[a] < mean[b]; });
    order.resize(static_cast<std::size_t>(take));

    Eigen::MatrixXd f(nv, take);
    for (Eigen::Index j = 0; j < take; ++j) f.col(j) = cell.distances.col(order[static_cast<std::size_t>(j)]);

    double best = -1.0;
    Eigen::VectorXd best_lambda = Eigen::VectorXd::Constant(nv, 1.0 / static_cast<double>(nv));
    const auto consider = [&](const Eigen::VectorXd& lambda) {
        if ((lambda.array() < -1e-12).any()) return;
        const double g = (f.transpose() * lambda).minCoeff();
        if (g > best) {
            best = g;
            best_lambda = lambda;
        }
    };

    for (Eigen::Index i = 0; i < nv; ++i) consider(Eigen::VectorXd::Unit(nv, i));
    for (Eigen::Index i = 0; i < nv; ++i) {
        for (Eigen::Index i2 = i + 1; i2 < nv; ++i2) {
            for (Eigen::Index j = 0; j < take; ++j) {
                for (Eigen::Index k = j + 1; k < take; ++k) {
                    const double a = f(i, k) - f(i, j);
                    const double b = f(i2, k) - f(i2, j);
                    if (a == b) continue;
                    const double t = a / (a - b);
                    if (t < 0.0 || t > 1.0) continue;
                    Eigen::VectorXd lambda = Eigen::VectorXd::Zero(nv);
                    lambda[i] = 1.0 - t;
                    lambda[i2] = t;
                    consider(lambda);
                }
            }
        }
    }
    if (nv == 3) {
        for (Eigen::Index j = 0; j < take; ++j) {
            for (Eigen::Index k = j + 1; k < take; ++k) {
                for (Eigen::Index l = k + 1; l < take; ++l) {
                    Eigen::Matrix3d sys;
                    sys.row(0).setOnes();
                    sys.row(1) = (f.col(j) - f.col(k)).transpose();
                    sys.row(2) = (f.col(k) - f.col(l)).transpose();
                    Eigen::FullPivLU<Eigen::Matrix3d> lu(sys);
                    if (!lu.isInvertible()) continue;
                    consider(lu.solve(Eigen::Vector3d(1.0, 0.0, 0.0)));
                }
            }
        }
    }
    cell.upper = best;
    cell.best_point = cell.points * best_lambda;
}

Eigen::VectorXd distances_to(const Eigen::VectorXd& x, std::span<const Eigen::MatrixXd> to) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(to.size()));
    for (std::size_t j = 0; j < to.size(); ++j) out[static_cast<Eigen::Index>(j)] = point_simplex_distance(x, to[j]);
    return out;
}

}  // namespace

double directed_hausdorff(std::span<const Eigen::MatrixXd> from, std::span<const Eigen::MatrixXd> to, double tol) {
    if (from.empty() || to.empty()) throw Error(ErrorKind::invalid_argument, "empty simplex set");
    constexpr std::size_t kMaxCells = 4'000'000;

    double lower = 0.0;
    std::priority_queue<Cell, std::vector<Cell>, CellOrder> queue;
    for (const Eigen::MatrixXd& s : from) {
        Cell cell;
        cell.points = s;
        cell.distances.resize(s.cols(), static_cast<Eigen::Index>(to.size()));
        for (Eigen::Index i = 0; i < s.cols(); ++i) {
            cell.distances.row(i) = distances_to(s.col(i), to).transpose();
            lower = std::max(lower, cell.distances.row(i).minCoeff());
        }
        bound_cell(cell);
        queue.push(std::move(cell));
    }

    std::size_t processed = 0;
    while (!queue.empty()) {
        Cell cell = queue.top();
        queue.pop();
        if (cell.upper <= lower + tol) break;
        if (++processed > kMaxCells) {
            throw Error(ErrorKind::no_convergence, "Hausdorff refinement exceeded its cell budget");
        }
        lower = std::max(lower, distances_to(cell.best_point, to).minCoeff());
        if (cell.upper <= lower + tol) continue;

        // Bisect the longest edge.
        Eigen::Index ea = 0, eb = 1;
        double longest = -1.0;
        for (Eigen::Index i = 0; i < cell.points.cols(); ++i) {
            for (Eigen::Index j = i + 1; j < cell.points.cols(); ++j) {
                const double len = (cell.points.col(i) - cell.points.col(j)).squaredNorm();
                if (len > longest) {
                    longest = len;
                    ea = i;
                    eb = j;
                }
            }
        }
        const Eigen::VectorXd mid = 0.5 * (cell.points.col(ea) + cell.points.col(eb));
        const Eigen::VectorXd mid_d = distances_to(mid, to);
        lower = std::max(lower, mid_d.minCoeff());
        for (const Eigen::Index replaced : {ea, eb}) {
            Cell child;
            child.points = cell.points;
            child.distances = cell.distances;
            child.points.col(replaced) = mid;
            child.distances.row(replaced) = mid_d.transpose();
            bound_cell(child);
            if (child.upper > lower + tol) queue.push(std::move(child));
        }
    }
    return lower;
}

double hausdorff_distance(const SimplicialSurface& a, const SimplicialSurface& b) {
    if (a.dimension() != b.dimension()) {
        throw Error(ErrorKind::dimension_mismatch, "Hausdorff distance between surfaces of different dimension");
    }
    std::vector<Eigen::MatrixXd> sa, sb;
    for (int f = 0; f < a.facet_count(); ++f) sa.push_back(a.facet_points(f));
    for (int f = 0; f < b.facet_count(); ++f) sb.push_back(b.facet_points(f));
    const double tol = 1e-7 * std::max(a.diameter(), b.diameter());
    return std::max(directed_hausdorff(sa, sb, tol), directed_hausdorff(sb, sa, tol));
}

}  // namespace flexspec
