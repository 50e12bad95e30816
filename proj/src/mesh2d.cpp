#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <unordered_map>
#include <vector>

#include <Eigen/SparseCore>

#include "flexspec/error.hpp"
#include "flexspec/predicates.hpp"
#include "flexspec/shapes.hpp"
#include "flexspec/spectral.hpp"

namespace flexspec {
namespace {

using Vec = Eigen::Vector2d;
using predicates::incircle;
using predicates::orient2d;

std::uint64_t edge_key(int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) | static_cast<std::uint32_t>(b);
}

// Incremental Delaunay triangulation (Bowyer-Watson) inside a large
// enclosing triangle made of vertices 0, 1, 2.
class Delaunay {
public:
    struct Tri {
        std::array<int, 3> v;
        std::array<int, 3> n;  // n[i] is across the edge opposite v[i]; -1 on the hull
        bool alive = true;
    };

    Delaunay(const Vec& lo, const Vec& hi) {
        const Vec c = 0.5 * (lo + hi);
        const double r = 64.0 * std::max((hi - lo).maxCoeff(), 1.0);
        pts_ = {c + Vec(-r, -r), c + Vec(r, -r), c + Vec(0.0, r)};
        tris_.push_back({{0, 1, 2}, {-1, -1, -1}, true});
    }

    [[nodiscard]] const std::vector<Vec>& points() const noexcept { return pts_; }
    [[nodiscard]] const std::vector<Tri>& tris() const noexcept { return tris_; }

    // Returns the vertex id; an existing id if p coincides with a vertex.
    int insert(const Vec& p) {
        const int t0 = locate(p);
        for (int v : tris_[static_cast<std::size_t>(t0)].v) {
            if (pts_[static_cast<std::size_t>(v)] == p) return v;
        }
        const int id = static_cast<int>(pts_.size());
        pts_.push_back(p);

        cavity_.clear();
        stack_.assign(1, t0);
        mark_.resize(tris_.size(), 0);
        ++stamp_;
        if (stamp_ == 0) {
            std::fill(mark_.begin(), mark_.end(), 0);
            stamp_ = 1;
        }
        mark_[static_cast<std::size_t>(t0)] = stamp_;
        while (!stack_.empty()) {
            const int t = stack_.back();
            stack_.pop_back();
            cavity_.push_back(t);
            for (int nb : tris_[static_cast<std::size_t>(t)].n) {
                if (nb < 0 || mark_[static_cast<std::size_t>(nb)] == stamp_) continue;
                const auto& w = tris_[static_cast<std::size_t>(nb)].v;
                if (incircle(pt(w[0]), pt(w[1]), pt(w[2]), p) > 0) {
                    mark_[static_cast<std::size_t>(nb)] = stamp_;
                    stack_.push_back(nb);
                }
            }
        }

        // Fan the cavity boundary to the new vertex.
        rim_.clear();
        for (int t : cavity_) {
            const Tri& tr = tris_[static_cast<std::size_t>(t)];
            for (int i = 0; i < 3; ++i) {
                const int nb = tr.n[static_cast<std::size_t>(i)];
                if (nb >= 0 && mark_[static_cast<std::size_t>(nb)] == stamp_) continue;
                rim_.push_back({tr.v[static_cast<std::size_t>((i + 1) % 3)], tr.v[static_cast<std::size_t>((i + 2) % 3)], nb, t});
            }
        }
        for (int t : cavity_) tris_[static_cast<std::size_t>(t)].alive = false;

        by_start_.clear();
        const int first = static_cast<int>(tris_.size());
        for (std::size_t k = 0; k < rim_.size(); ++k) {
            const RimEdge e = rim_[k];
            const int t = first + static_cast<int>(k);
            tris_.push_back({{id, e.a, e.b}, {e.outside, -1, -1}, true});
            if (e.outside >= 0) {
                for (int& back : tris_[static_cast<std::size_t>(e.outside)].n) {
                    if (back == e.old) back = t;
                }
            }
            by_start_[e.a] = t;
        }
        for (std::size_t k = 0; k < rim_.size(); ++k) {
            const int t = first + static_cast<int>(k);
            Tri& tr = tris_[static_cast<std::size_t>(t)];
            // Edge (id, a) is opposite b: shared with the fan triangle ending at a.
            // Edge (b, id) is opposite a: shared with the fan triangle starting at b.
            tr.n[1] = by_start_.at(tr.v[2]);
            for (std::size_t j = 0; j < rim_.size(); ++j) {
                if (rim_[j].b == tr.v[1]) {
                    tr.n[2] = first + static_cast<int>(j);
                    break;
                }
            }
        }
        mark_.resize(tris_.size(), 0);
        last_ = first;
        return id;
    }

private:
    [[nodiscard]] const Vec& pt(int i) const { return pts_[static_cast<std::size_t>(i)]; }

    int locate(const Vec& p) {
        int t = last_;
        if (t < 0 || t >= static_cast<int>(tris_.size()) || !tris_[static_cast<std::size_t>(t)].alive) {
            t = static_cast<int>(tris_.size()) - 1;
            while (!tris_[static_cast<std::size_t>(t)].alive) --t;
        }
        for (std::size_t steps = 0; steps < 4 * tris_.size() + 16; ++steps) {
            const Tri& tr = tris_[static_cast<std::size_t>(t)];
            bool moved = false;
            for (int k = 0; k < 3; ++k) {
                const int i = (k + static_cast<int>(steps)) % 3;
                const int a = tr.v[static_cast<std::size_t>((i + 1) % 3)], b = tr.v[static_cast<std::size_t>((i + 2) % 3)];
                if (orient2d(pt(a), pt(b), p) < 0) {
                    t = tr.n[static_cast<std::size_t>(i)];
                    moved = true;
                    break;
                }
            }
            if (!moved) return t;
            if (t < 0) throw Error(ErrorKind::mesh_failure, "point outside the enclosing triangle");
        }
        throw Error(ErrorKind::mesh_failure, "point location did not terminate");
    }

    std::vector<Vec> pts_;
    std::vector<Tri> tris_;
    int last_ = 0;
    std::vector<int> cavity_, stack_;
    std::vector<unsigned> mark_;
    unsigned stamp_ = 0;
    struct RimEdge {
        int a, b, outside, old;
    };
    std::vector<RimEdge> rim_;
    std::unordered_map<int, int> by_start_;
};

double signed_area(const Eigen::Matrix2Xd& loop) {
    double a = 0.0;
    for (Eigen::Index i = 0; i < loop.cols(); ++i) {
        const auto j = (i + 1) % loop.cols();
        a += loop(0, i) * loop(1, j) - loop(0, j) * loop(1, i);
    }
    return 0.5 * a;
}

bool inside_polygon(const Eigen::Matrix2Xd& loop, const Vec& p) {
    bool in = false;
    for (Eigen::Index i = 0, j = loop.cols() - 1; i < loop.cols(); j = i++) {
        const Vec a = loop.col(i), b = loop.col(j);
        if ((a.y() > p.y()) != (b.y() > p.y()) && p.x() < (b.x() - a.x()) * (p.y() - a.y()) / (b.y() - a.y()) + a.x()) {
            in = !in;
        }
    }
    return in;
}

double distance_to_boundary(const Eigen::Matrix2Xd& loop, const Vec& p) {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < loop.cols(); ++i) {
        const Vec a = loop.col(i), b = loop.col((i + 1) % loop.cols());
        const double t = std::clamp((p - a).dot(b - a) / (b - a).squaredNorm(), 0.0, 1.0);
        best = std::min(best, (a + t * (b - a) - p).norm());
    }
    return best;
}

Vec circumcenter(const Vec& a, const Vec& b, const Vec& c) {
    const Vec ab = b - a, ac = c - a;
    const double d = 2.0 * (ab.x() * ac.y() - ab.y() * ac.x());
    const double ab2 = ab.squaredNorm(), ac2 = ac.squaredNorm();
    return a + Vec(ac.y() * ab2 - ab.y() * ac2, ab.x() * ac2 - ac.x() * ab2) / d;
}

double triangle_min_angle(const Vec& a, const Vec& b, const Vec& c) {
    const auto angle = [](const Vec& p, const Vec& q, const Vec& r) {
        const Vec u = q - p, v = r - p;
        return std::atan2(std::abs(u.x() * v.y() - u.y() * v.x()), u.dot(v));
    };
    return std::min({angle(a, b, c), angle(b, c, a), angle(c, a, b)});
}

double triangle_diameter(const Vec& a, const Vec& b, const Vec& c) {
    return std::max({(a - b).norm(), (b - c).norm(), (c - a).norm()});
}

// Diametral-circle encroachment: p strictly inside the circle on segment ab.
bool encroaches(const Vec& a, const Vec& b, const Vec& p) { return (a - p).dot(b - p) < 0.0; }

}  // namespace

double Mesh2D::area() const {
    double sum = 0.0;
    for (const auto& t : triangles) {
        const Vec a = nodes.col(t[0]), b = nodes.col(t[1]), c = nodes.col(t[2]);
        sum += 0.5 * ((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
    }
    return sum;
}

double Mesh2D::min_angle() const {
    double m = std::numbers::pi;
    for (const auto& t : triangles) m = std::min(m, triangle_min_angle(nodes.col(t[0]), nodes.col(t[1]), nodes.col(t[2])));
    return m;
}

double Mesh2D::max_diameter() const {
    double m = 0.0;
    for (const auto& t : triangles) m = std::max(m, triangle_diameter(nodes.col(t[0]), nodes.col(t[1]), nodes.col(t[2])));
    return m;
}

Mesh2D triangulate(const Eigen::Matrix2Xd& polygon, double h) {
    if (!(h > 0.0)) throw Error(ErrorKind::invalid_argument, "mesh size must be positive");
    if (polygon.cols() < 3) throw Error(ErrorKind::invalid_domain, "polygon needs at least 3 vertices");
    try {
        if (!is_embedded(polygon_surface(polygon))) throw Error(ErrorKind::invalid_domain, "polygon is not simple");
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::invalid_domain) throw;
        throw Error(ErrorKind::invalid_domain, e.what());
    }
    Eigen::Matrix2Xd loop = polygon;
    if (signed_area(loop) < 0.0) loop = loop.rowwise().reverse().eval();

    const Vec lo = loop.rowwise().minCoeff(), hi = loop.rowwise().maxCoeff();
    const double extent = (hi - lo).maxCoeff();
    if (h > extent) h = extent;
    Delaunay dt(lo, hi);
    const double spacing = 0.7 * h;

    // Boundary: polygon vertices and evenly split sides.
    std::vector<std::array<int, 2>> segments;
    std::vector<char> on_boundary(3, 0);
    const auto add = [&](const Vec& p, bool boundary) {
        const int id = dt.insert(p);
        if (static_cast<std::size_t>(id) >= on_boundary.size()) on_boundary.resize(static_cast<std::size_t>(id) + 1, 0);
        if (boundary) on_boundary[static_cast<std::size_t>(id)] = 1;
        return id;
    };
    std::vector<int> corner(static_cast<std::size_t>(loop.cols()));
    for (Eigen::Index i = 0; i < loop.cols(); ++i) corner[static_cast<std::size_t>(i)] = add(loop.col(i), true);
    for (Eigen::Index i = 0; i < loop.cols(); ++i) {
        const Vec a = loop.col(i), b = loop.col((i + 1) % loop.cols());
        const int pieces = std::max(1, static_cast<int>(std::ceil((b - a).norm() / spacing)));
        int prev = corner[static_cast<std::size_t>(i)];
        for (int k = 1; k < pieces; ++k) {
            const int id = add(a + (b - a) * (static_cast<double>(k) / pieces), true);
            segments.push_back({prev, id});
            prev = id;
        }
        segments.push_back({prev, corner[static_cast<std::size_t>((i + 1) % loop.cols())]});
    }

    // Interior: hexagonal lattice kept clear of the boundary.
    const double dy = spacing * std::sqrt(3.0) / 2.0;
    int row = 0;
    for (double y = lo.y() + 0.5 * dy; y < hi.y(); y += dy, ++row) {
        const double shift = (row % 2) ? 0.5 * spacing : 0.0;
        std::vector<Vec> line;
        for (double x = lo.x() + shift + 0.25 * spacing; x < hi.x(); x += spacing) line.emplace_back(x, y);
        if (row % 2) std::reverse(line.begin(), line.end());
        for (const Vec& p : line) {
            if (inside_polygon(loop, p) && distance_to_boundary(loop, p) > 0.5 * spacing) add(p, false);
        }
    }

    const double min_angle_target = 20.0 * std::numbers::pi / 180.0;
    const std::size_t budget = 40 * dt.points().size() + 200000;

    const auto inside_tri = [&](const Delaunay::Tri& t) {
        if (t.v[0] < 3 || t.v[1] < 3 || t.v[2] < 3) return false;
        const auto& p = dt.points();
        const Vec c = (p[static_cast<std::size_t>(t.v[0])] + p[static_cast<std::size_t>(t.v[1])] +
                       p[static_cast<std::size_t>(t.v[2])]) / 3.0;
        return inside_polygon(loop, c);
    };

    for (;;) {
        if (dt.points().size() > budget) throw Error(ErrorKind::mesh_failure, "refinement budget exhausted");
        const auto& pts = dt.points();
        const auto P = [&](int i) -> const Vec& { return pts[static_cast<std::size_t>(i)]; };

        // Split every subsegment that is missing or has a vertex in its diametral circle.
        std::unordered_map<std::uint64_t, std::vector<int>> opposite;
        for (const auto& t : dt.tris()) {
            if (!t.alive) continue;
            for (int i = 0; i < 3; ++i) {
                opposite[edge_key(t.v[static_cast<std::size_t>((i + 1) % 3)], t.v[static_cast<std::size_t>((i + 2) % 3)])]
                    .push_back(t.v[static_cast<std::size_t>(i)]);
            }
        }
        std::vector<std::size_t> encroached;
        for (std::size_t k = 0; k < segments.size(); ++k) {
            const auto [a, b] = segments[k];
            const auto it = opposite.find(edge_key(a, b));
            bool bad = it == opposite.end();
            if (!bad) {
                for (int c : it->second) bad = bad || (c >= 3 && encroaches(P(a), P(b), P(c)));
            }
            if (bad) encroached.push_back(k);
        }
        if (!encroached.empty()) {
            std::vector<bool> split(segments.size(), false);
            for (std::size_t k : encroached) split[k] = true;
            std::vector<std::array<int, 2>> next;
            for (std::size_t k = 0; k < segments.size(); ++k) {
                const auto [a, b] = segments[k];
                if (!split[k]) {
                    next.push_back(segments[k]);
                    continue;
                }
                const Vec m = 0.5 * (P(a) + P(b));
                const int id = add(m, true);
                next.push_back({a, id});
                next.push_back({id, b});
            }
            segments = std::move(next);
            continue;
        }

        // Refine poor or oversized interior triangles at their circumcentres.
        struct Bad {
            double score;
            std::array<int, 3> v;
        };
        std::vector<Bad> bad;
        for (const auto& t : dt.tris()) {
            if (!t.alive || !inside_tri(t)) continue;
            const Vec &a = P(t.v[0]), &b = P(t.v[1]), &c = P(t.v[2]);
            const double diam = triangle_diameter(a, b, c);
            const double ang = triangle_min_angle(a, b, c);
            if (diam > h || ang < min_angle_target) bad.push_back({std::max(diam / h, min_angle_target / ang), t.v});
        }
        if (bad.empty()) break;
        std::sort(bad.begin(), bad.end(), [](const Bad& x, const Bad& y) { return x.score > y.score; });

        std::vector<bool> split(segments.size(), false);
        bool any_split = false;
        std::vector<Vec> centres;
        for (const Bad& t : bad) {
            const Vec c = circumcenter(P(t.v[0]), P(t.v[1]), P(t.v[2]));
            bool hit = false;
            for (std::size_t k = 0; k < segments.size(); ++k) {
                if (encroaches(P(segments[k][0]), P(segments[k][1]), c)) {
                    split[k] = true;
                    hit = true;
                }
            }
            any_split = any_split || hit;
            if (!hit && inside_polygon(loop, c)) centres.push_back(c);
        }
        // Points of one batch are kept apart so a single pass does not cluster.
        std::vector<Vec> accepted;
        for (const Vec& c : centres) {
            bool close = false;
            for (const Vec& q : accepted) close = close || (q - c).norm() < 0.25 * spacing;
            if (!close && accepted.size() < 4096) accepted.push_back(c);
        }
        if (any_split) {
            std::vector<std::array<int, 2>> next;
            for (std::size_t k = 0; k < segments.size(); ++k) {
                const auto [a, b] = segments[k];
                if (!split[k]) {
                    next.push_back(segments[k]);
                    continue;
                }
                const int id = add(0.5 * (P(a) + P(b)), true);
                next.push_back({a, id});
                next.push_back({id, b});
            }
            segments = std::move(next);
        }
        for (const Vec& c : accepted) {
            // A centre may have become encroaching after segment splits.
            bool hit = false;
            for (const auto& s : segments) hit = hit || encroaches(P(s[0]), P(s[1]), c);
            if (!hit) add(c, false);
        }
        if (!any_split && accepted.empty()) throw Error(ErrorKind::mesh_failure, "refinement stalled");
    }

    // Extract the interior triangles and compact the vertex ids.
    Mesh2D mesh;
    mesh.h = h;
    const auto& pts = dt.points();
    std::vector<int> remap(pts.size(), -1);
    int count = 0;
    for (const auto& t : dt.tris()) {
        if (!t.alive || !inside_tri(t)) continue;
        std::array<int, 3> tri{};
        for (int i = 0; i < 3; ++i) {
            int& r = remap[static_cast<std::size_t>(t.v[static_cast<std::size_t>(i)])];
            if (r < 0) r = count++;
            tri[static_cast<std::size_t>(i)] = r;
        }
        mesh.triangles.push_back(tri);
    }
    mesh.nodes.resize(2, count);
    mesh.boundary.assign(static_cast<std::size_t>(count), false);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (remap[i] < 0) continue;
        mesh.nodes.col(remap[i]) = pts[i];
        mesh.boundary[static_cast<std::size_t>(remap[i])] = i < on_boundary.size() && on_boundary[i];
    }
    if (mesh.min_angle() < 15.0 * std::numbers::pi / 180.0) {
        throw Error(ErrorKind::mesh_failure, "minimum angle below 15 degrees");
    }
    return mesh;
}

Mesh2D refine_uniform(const Mesh2D& mesh) {
    std::unordered_map<std::uint64_t, int> mid;
    std::unordered_map<std::uint64_t, int> uses;
    for (const auto& t : mesh.triangles) {
        for (int i = 0; i < 3; ++i) ++uses[edge_key(t[static_cast<std::size_t>(i)], t[static_cast<std::size_t>((i + 1) % 3)])];
    }
    std::vector<Vec> extra;
    std::vector<bool> boundary = mesh.boundary;
    const int n0 = mesh.node_count();
    const auto midpoint = [&](int a, int b) {
        const auto key = edge_key(a, b);
        auto it = mid.find(key);
        if (it != mid.end()) return it->second;
        const int id = n0 + static_cast<int>(extra.size());
        extra.push_back(0.5 * (mesh.nodes.col(a) + mesh.nodes.col(b)));
        boundary.push_back(uses.at(key) == 1);
        mid.emplace(key, id);
        return id;
    };
    Mesh2D out;
    out.h = 0.5 * mesh.h;
    for (const auto& t : mesh.triangles) {
        const int ab = midpoint(t[0], t[1]), bc = midpoint(t[1], t[2]), ca = midpoint(t[2], t[0]);
        out.triangles.push_back({t[0], ab, ca});
        out.triangles.push_back({ab, t[1], bc});
        out.triangles.push_back({ca, bc, t[2]});
        out.triangles.push_back({ab, bc, ca});
    }
    out.nodes.resize(2, n0 + static_cast<Eigen::Index>(extra.size()));
    out.nodes.leftCols(n0) = mesh.nodes;
    for (std::size_t k = 0; k < extra.size(); ++k) out.nodes.col(n0 + static_cast<Eigen::Index>(k)) = extra[k];
    out.boundary = std::move(boundary);
    return out;
}

FemMatrices assemble_p1(const Mesh2D& mesh) {
    std::vector<Eigen::Triplet<double>> k, m;
    k.reserve(9 * mesh.triangles.size());
    m.reserve(9 * mesh.triangles.size());
    for (const auto& t : mesh.triangles) {
        const Vec p[3] = {mesh.nodes.col(t[0]), mesh.nodes.col(t[1]), mesh.nodes.col(t[2])};
        const double two_area = (p[1] - p[0]).x() * (p[2] - p[0]).y() - (p[1] - p[0]).y() * (p[2] - p[0]).x();
        const double area = 0.5 * two_area;
        Vec grad[3];
        for (int i = 0; i < 3; ++i) {
            const Vec e = p[(i + 2) % 3] - p[(i + 1) % 3];
            grad[i] = Vec(-e.y(), e.x()) / two_area;
        }
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                k.emplace_back(t[static_cast<std::size_t>(i)], t[static_cast<std::size_t>(j)], area * grad[i].dot(grad[j]));
                m.emplace_back(t[static_cast<std::size_t>(i)], t[static_cast<std::size_t>(j)], area / 12.0 * (i == j ? 2.0 : 1.0));
            }
        }
    }
    FemMatrices out;
    const int n = mesh.node_count();
    out.stiffness.resize(n, n);
    out.mass.resize(n, n);
    out.stiffness.setFromTriplets(k.begin(), k.end());
    out.mass.setFromTriplets(m.begin(), m.end());
    return out;
}

}  // namespace flexspec
