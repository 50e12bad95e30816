#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <vector>

#include <CLI11.hpp>

#include "flexspec/error.hpp"
#include "flexspec/fedosov.hpp"
#include "flexspec/shapes.hpp"
#include "flexspec/spectral.hpp"
#include "flexspec/tent.hpp"

namespace flexspec::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr int kExitFail = 1;
constexpr int kExitError = 2;

std::string number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x == 0.0 ? 0.0 : x);
    return buf;
}

BoundaryCondition parse_bc(const std::string& s) {
    if (s == "dirichlet") return BoundaryCondition::dirichlet;
    if (s == "neumann") return BoundaryCondition::neumann;
    throw Error(ErrorKind::invalid_argument, "config: bc must be dirichlet or neumann, got '" + s + "'");
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error(ErrorKind::io_error, "cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error(ErrorKind::io_error, "cannot write " + p.string());
    out << text;
}

bool is_builtin_family(const std::string& n) {
    return n == "steffen" || n == "bricard1" || n == "cube" || n == "four-bar";
}
bool is_builtin_polygon(const std::string& n) { return n == "square" || n == "l-shape"; }

// CSV with a comment line carrying the command and config hash, then a
// column row whose names include units in brackets.
class Csv {
public:
    Csv(const ExperimentConfig& cfg, const std::vector<std::string>& columns) {
        text_ << "# flexspec " << cfg.command << " config_hash=" << config_hash(cfg) << '\n';
        for (std::size_t i = 0; i < columns.size(); ++i) text_ << (i ? "," : "") << columns[i];
        text_ << '\n';
    }
    void row(const std::vector<double>& values) {
        for (std::size_t i = 0; i < values.size(); ++i) text_ << (i ? "," : "") << number(values[i]);
        text_ << '\n';
        ++rows_;
    }
    [[nodiscard]] int rows() const { return rows_; }
    void save(const fs::path& p) const { write_file(p, text_.str()); }

private:
    std::ostringstream text_;
    int rows_ = 0;
};

fs::path output_path(const ExperimentConfig& cfg, const std::string& fallback) {
    const fs::path p = cfg.out.empty() ? fs::path(fallback) : fs::path(cfg.out);
    return p.is_absolute() ? p : cfg.out_dir / p;
}

std::string slug(std::string command) {
    std::replace(command.begin(), command.end(), ' ', '-');
    return command;
}

void write_summary(const ExperimentConfig& cfg, const std::string& status, const json& results) {
    json j;
    j["command"] = cfg.command;
    j["config"] = cfg.to_json();
    j["config_hash"] = config_hash(cfg);
    j["status"] = status;
    j["results"] = results;
    write_file(cfg.out_dir / (slug(cfg.command) + ".summary.json"), j.dump(2) + "\n");
}

double relative_spread(const std::vector<double>& v, double scale) {
    if (v.empty()) return 0.0;
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return (*hi - *lo) / scale;
}

std::vector<double> parameters_for(const FlexFamily& f, int samples) {
    if (f.kind() == FamilyKind::rigid) return {0.0};
    return sample_parameters(samples);
}

json tent_to_json(const TentSpec& t) {
    const auto tent = [](const Tent& x) {
        return json{{"facet", x.facet},
                    {"simplex", x.simplex},
                    {"apex", x.apex},
                    {"frame", x.apex_frame.frame},
                    {"weights", std::vector<double>(x.apex_frame.weights.data(),
                                                    x.apex_frame.weights.data() + x.apex_frame.weights.size())},
                    {"offset", x.apex_frame.offset},
                    {"angle", x.angle}};
    };
    return json{{"ridge", t.ridge},         {"sub_ridge", t.sub_ridge}, {"phi_star", t.phi_star},
                {"epsilon", t.epsilon},     {"t_begin", t.t_begin},     {"t_end", t.t_end},
                {"scale", t.scale},         {"y", tent(t.y)},           {"z", tent(t.z)},
                {"subdivision", t.subdivision}};
}

TentSpec tent_from_json(const json& j) {
    const auto tent = [](const json& x) {
        Tent t;
        t.facet = x.at("facet").get<int>();
        t.simplex = x.at("simplex").get<std::array<int, 3>>();
        t.apex = x.at("apex").get<int>();
        t.apex_frame.frame = x.at("frame").get<std::vector<int>>();
        const auto w = x.at("weights").get<std::vector<double>>();
        t.apex_frame.weights = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
        t.apex_frame.offset = x.at("offset").get<double>();
        t.angle = x.at("angle").get<double>();
        return t;
    };
    TentSpec t;
    t.ridge = j.at("ridge").get<std::vector<int>>();
    t.sub_ridge = j.at("sub_ridge").get<std::array<int, 2>>();
    t.phi_star = j.at("phi_star").get<double>();
    t.epsilon = j.at("epsilon").get<double>();
    t.t_begin = j.at("t_begin").get<double>();
    t.t_end = j.at("t_end").get<double>();
    t.scale = j.at("scale").get<double>();
    t.y = tent(j.at("y"));
    t.z = tent(j.at("z"));
    t.subdivision = j.at("subdivision").get<std::vector<Facet>>();
    return t;
}

// ---- commands -------------------------------------------------------------

int cmd_flex_sample(const ExperimentConfig& cfg) {
    const FlexFamily f = load_family(cfg.family);
    const int d = f.dimension();
    std::vector<std::string> cols{"s[1]", "vertex[id]"};
    for (const char* axis : {"x[L]", "y[L]", "z[L]"}) {
        if (static_cast<int>(cols.size()) - 2 < d) cols.emplace_back(axis);
    }
    cols.emplace_back("edge_residual[1]");
    cols.emplace_back("branch_point[bool]");
    Csv csv(cfg, cols);
    FlexContext ctx(f);
    double worst = 0.0;
    for (double s : parameters_for(f, cfg.samples)) {
        const FlexState st = ctx.state(s);
        worst = std::max(worst, st.residual);
        for (Eigen::Index v = 0; v < st.vertices.cols(); ++v) {
            std::vector<double> row{s, static_cast<double>(v)};
            for (int k = 0; k < d; ++k) row.push_back(st.vertices(k, v));
            row.push_back(st.residual);
            row.push_back(st.branch_point ? 1.0 : 0.0);
            csv.row(row);
        }
    }
    csv.save(output_path(cfg, "flex-sample.csv"));
    write_summary(cfg, "ok", {{"max_edge_residual", worst}, {"vertices", f.vertex_count()}});
    return 0;
}

int cmd_flex_export(const ExperimentConfig& cfg) {
    const FlexFamily f = load_family(cfg.family);
    json j = json::parse(family_to_json(f));
    FlexContext ctx(f);
    double worst = 0.0;
    for (double s : parameters_for(f, cfg.samples)) worst = std::max(worst, ctx.state(s).residual);
    json construction{{"samples", cfg.samples}, {"max_corrector_residual", worst}};
    if (cfg.family == "steffen") {
        const SteffenParameters p = steffen_parameters();
        construction["frame_height"] = p.frame_height;
        construction["axis_point"] = {p.axis_point.x(), p.axis_point.y(), p.axis_point.z()};
        construction["axis_direction"] = {p.axis_direction.x(), p.axis_direction.y(), p.axis_direction.z()};
        construction["driver_ridge"] = p.driver_ridge;
        construction["driver_span"] = p.driver_span;
    }
    j["construction"] = construction;
    write_file(output_path(cfg, "family.json"), j.dump(2) + "\n");
    write_summary(cfg, "ok", construction);
    return 0;
}

int cmd_invariants(const ExperimentConfig& cfg) {
    const FlexFamily f = load_family(cfg.family);
    const int d = f.dimension();
    Csv csv(cfg, {"s[1]", "volume[L^" + std::to_string(d) + "]", "area[L^" + std::to_string(d - 1) + "]",
                  "mean_curvature[L^" + std::to_string(d - 2) + "]", "min_angle[rad]", "max_angle[rad]",
                  "embedded[bool]", "edge_residual[1]"});
    FlexContext ctx(f);
    std::vector<double> vol, area, curv;
    double residual = 0.0;
    for (double s : parameters_for(f, cfg.samples)) {
        const FlexState st = ctx.state(s);
        const SimplicialSurface surf = f.surface(st.vertices);
        double lo = 2.0 * std::numbers::pi, hi = 0.0;
        for (const auto& r : dihedral_angles(surf)) {
            lo = std::min(lo, r.angle);
            hi = std::max(hi, r.angle);
        }
        vol.push_back(oriented_volume(surf));
        area.push_back(surface_area(surf));
        curv.push_back(d == 3 ? integral_mean_curvature(surf) : 0.0);
        residual = std::max(residual, st.residual);
        csv.row({s, vol.back(), area.back(), curv.back(), lo, hi, is_embedded(surf) ? 1.0 : 0.0, st.residual});
    }
    // Scale-aware normalisers: the value itself, or the natural size when it vanishes.
    const SimplicialSurface ref = f.reference_surface();
    double edge_total = 0.0;
    for (double len : f.edge_lengths()) edge_total += len;
    const double diam = ref.diameter();
    json results{{"rows", csv.rows()},
                 {"volume_variation", relative_spread(vol, std::max(std::abs(vol[0]), std::pow(diam, d)))},
                 {"area_variation", relative_spread(area, area[0])},
                 {"mean_curvature_variation", relative_spread(curv, std::max(std::abs(curv[0]), edge_total))},
                 {"max_edge_residual", residual}};
    csv.save(output_path(cfg, "invariants.csv"));
    write_summary(cfg, "ok", results);
    return 0;
}

int cmd_coeffs_track(const ExperimentConfig& cfg) {
    const FlexFamily f = load_family(cfg.family);
    const CoefficientTrack t = track_coefficients(f, cfg.bc, cfg.samples);
    const int d = f.dimension();
    Csv csv(cfg, {"s[1]", "a_d[L^" + std::to_string(d) + "]", "a_{d-1}[L^" + std::to_string(d - 1) + "]",
                  "a_{d-2}[L^" + std::to_string(d - 2) + "]", "min_angle[rad]", "max_angle[rad]", "embedded[bool]"});
    for (const auto& r : t.rows) {
        csv.row({r.s, r.c.a_d, r.c.a_dm1, r.c.a_dm2, r.min_angle, r.max_angle, r.embedded ? 1.0 : 0.0});
    }
    csv.save(output_path(cfg, "coeffs.csv"));
    write_summary(cfg, "ok", {{"variation", t.variation}, {"bc", std::string(to_string(cfg.bc))}});
    return 0;
}

int cmd_tent_build(const ExperimentConfig& cfg) {
    const FlexFamily f = load_family(cfg.family);
    const TentSpec spec = make_tent_spec(f, cfg.epsilon, cfg.delta);
    const TentedFamily tf = subdivide_and_tent(f, spec, cfg.samples);
    json j = json::parse(family_to_json(tf.family));
    j["tent"] = tent_to_json(tf.spec);
    write_file(output_path(cfg, "tent-family.json"), j.dump(2) + "\n");
    write_summary(cfg, "ok", {{"tent", tent_to_json(tf.spec)}});
    return 0;
}

json sigma_csv(const ExperimentConfig& cfg, const SigmaReport& r, const fs::path& path) {
    Csv csv(cfg, {"s[1]", "apex_inside[bool]", "tents_clear[bool]", "angle_sum_residual[rad]", "hausdorff_bound[L]",
                  "embedded[bool]", "phi_ridge[rad]", "phi_tilde[rad]", "bookkeeping_residual[rad]",
                  "other_min[rad]", "other_max[rad]"});
    double worst_sum = 0.0, worst_book = 0.0, lo = 2.0 * std::numbers::pi, hi = 0.0;
    for (const SigmaRow& row : r.rows) {
        csv.row({row.s, row.apex_inside ? 1.0 : 0.0, row.tents_clear ? 1.0 : 0.0, row.angle_sum_residual,
                 row.hausdorff_bound, row.embedded ? 1.0 : 0.0, row.phi_ridge, row.phi_tilde,
                 row.bookkeeping_residual, row.other_min, row.other_max});
        worst_sum = std::max(worst_sum, std::abs(row.angle_sum_residual));
        worst_book = std::max(worst_book, row.bookkeeping_residual);
        lo = std::min(lo, row.other_min);
        hi = std::max(hi, row.other_max);
    }
    csv.save(path);
    return {{"all_pass", r.all_pass()},
            {"subdivision_ok", r.subdivision_ok},
            {"hausdorff_to_start", r.hausdorff_to_start},
            {"max_angle_sum_residual", worst_sum},
            {"max_bookkeeping_residual", worst_book},
            {"phi_tilde_last", r.rows.empty() ? 0.0 : r.rows.back().phi_tilde},
            {"other_angle_window", {lo, hi}}};
}

int cmd_tent_verify(const ExperimentConfig& cfg) {
    if (is_builtin_family(cfg.family)) {
        throw Error(ErrorKind::invalid_argument, "tent verify needs a family file written by tent build");
    }
    const json j = json::parse(read_file(cfg.family));
    if (!j.contains("tent")) throw Error(ErrorKind::invalid_argument, "family file carries no tent description");
    const FlexFamily f = family_from_json(j.dump());
    const TentSpec spec = tent_from_json(j.at("tent"));
    const SigmaReport r = verify_sigma_conditions(f, spec, cfg.samples);
    const json results = sigma_csv(cfg, r, output_path(cfg, "tent-verify.csv"));
    write_summary(cfg, r.all_pass() ? "pass" : "fail", results);
    return r.all_pass() ? 0 : kExitFail;
}

int cmd_spectrum_solve(const ExperimentConfig& cfg) {
    const TwoMeshSpectrum two = two_mesh_spectrum(load_polygon(cfg.polygon), cfg.bc, cfg.h, cfg.n);
    const Spectrum ex = richardson(two.coarse, two.fine);
    Csv csv(cfg, {"index[1]", "lambda_h[1/L^2]", "lambda_h2[1/L^2]", "lambda_extrapolated[1/L^2]", "error_bar[1/L^2]"});
    for (int i = 0; i < cfg.n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        csv.row({static_cast<double>(i + 1), two.coarse.eigenvalues[k], two.fine.eigenvalues[k], ex.eigenvalues[k],
                 std::abs(two.fine.eigenvalues[k] - two.coarse.eigenvalues[k])});
    }
    csv.save(output_path(cfg, "spectrum.csv"));
    write_summary(cfg, "ok",
                  {{"nodes_coarse", two.coarse.nodes},
                   {"nodes_fine", two.fine.nodes},
                   {"max_residual", std::max(two.coarse.max_residual, two.fine.max_residual)}});
    return 0;
}

int cmd_spectrum_sweep(const ExperimentConfig& cfg) {
    const FlexFamily f = load_family(cfg.family);
    const SweepResult r = flex_spectrum_sweep(f, cfg.bc, cfg.h, cfg.n, cfg.samples);
    Csv csv(cfg, {"s[1]", "index[1]", "lambda[1/L^2]", "error_bar[1/L^2]", "simple[bool]"});
    for (const SweepRow& row : r.rows) {
        for (std::size_t i = 0; i < row.eigenvalues.size(); ++i) {
            csv.row({row.s, static_cast<double>(i + 1), row.eigenvalues[i], row.error_bar[i], row.simple ? 1.0 : 0.0});
        }
    }
    csv.save(output_path(cfg, "sweep.csv"));
    write_summary(cfg, "ok", {{"variation", r.variation}, {"error_bar", r.error_bar}});
    return 0;
}

int cmd_spectrum_weyl(const ExperimentConfig& cfg) {
    const Eigen::Matrix2Xd poly = load_polygon(cfg.polygon);
    const SimplicialSurface boundary = polygon_surface(poly);
    // Enough eigenvalues that the trust threshold clears k_max^2.
    const double k_need = 1.05 * cfg.k_max / std::sqrt(0.8);
    const int n = static_cast<int>(std::ceil(weyl_counting_prediction(boundary, BoundaryCondition::neumann, k_need))) + 10;
    const Spectrum sp = solve_eigs(triangulate(poly, cfg.h), cfg.bc, n);
    Csv csv(cfg, {"k[1/L]", "count[1]", "prediction[1]", "remainder[1]", "bound[1]"});
    bool ok = true;
    double worst = 0.0;
    for (double k = cfg.k_min; k <= cfg.k_max + 1e-12; k += 0.25) {
        const double c = counting_function(sp, k);
        const double p = weyl_counting_prediction(boundary, cfg.bc, k);
        ok = ok && std::abs(c - p) <= 1.5 * k;
        worst = std::max(worst, std::abs(c - p) / k);
        csv.row({k, c, p, c - p, 1.5 * k});
    }
    csv.save(output_path(cfg, "weyl.csv"));
    write_summary(cfg, ok ? "pass" : "fail", {{"eigenvalues", n}, {"max_remainder_over_k", worst}});
    return ok ? 0 : kExitFail;
}

int cmd_spectrum_corner(const ExperimentConfig& cfg) {
    const CornerFit fit = fit_corner_coefficient(cfg.h);
    Csv csv(cfg, {"k[1/L]", "riesz_remainder[1]"});
    for (const auto& [k, r] : fit.remainder) csv.row({k, r});
    csv.save(output_path(cfg, "corner-fit.csv"));
    const bool ok = fit.c * fit.target > 0.0 && std::abs(fit.c - fit.target) <= 0.4 * std::abs(fit.target);
    write_summary(cfg, ok ? "pass" : "fail",
                  {{"c", fit.c}, {"target", fit.target}, {"eigenvalues", fit.eigenvalues},
                   {"lambda_max", fit.lambda_max}});
    return ok ? 0 : kExitFail;
}

int cmd_theorem1_demo(const ExperimentConfig& cfg) {
    std::string stage = "load";
    try {
        const FlexFamily f = load_family(cfg.family);
        stage = "select_variable_ridge";
        const RidgeProfile profile = select_variable_ridge(f, cfg.delta);
        stage = "compute_phi_star";
        const PhiStar ps = compute_phi_star(f, profile, cfg.epsilon, cfg.delta);
        TentSpec spec;
        spec.ridge = profile.ridge;
        spec.phi_star = ps.phi_star;
        spec.epsilon = cfg.epsilon;
        spec.t_begin = ps.t_begin;
        spec.t_end = ps.t_end;
        stage = "subdivide_and_tent";
        const TentedFamily tf = subdivide_and_tent(f, spec, cfg.samples);
        stage = "verify_sigma_conditions";
        const SigmaReport report = verify_sigma_conditions(tf.family, tf.spec, cfg.samples);
        json sigma = sigma_csv(cfg, report, cfg.out_dir / "theorem1-sigma.csv");
        stage = "track_coefficients";
        const CoefficientTrack track = track_coefficients(tf.family, cfg.bc, cfg.samples);
        Csv csv(cfg, {"s[1]", "a_d[L^3]", "a_{d-1}[L^2]", "a_{d-2}[L]", "phi_tilde[rad]"});
        bool increasing = true;
        for (std::size_t i = 0; i < track.rows.size(); ++i) {
            const auto& r = track.rows[i];
            csv.row({r.s, r.c.a_d, r.c.a_dm1, r.c.a_dm2, report.rows[i].phi_tilde});
            if (i > 0 && report.rows[i].phi_tilde < 0.1 && report.rows[i].phi_tilde < report.rows[i - 1].phi_tilde) {
                increasing = increasing && std::abs(r.c.a_dm2) > std::abs(track.rows[i - 1].c.a_dm2);
            }
        }
        csv.save(cfg.out_dir / "theorem1-coeffs.csv");

        const bool volume_const = track.variation[0] < 1e-7;
        const bool area_const = track.variation[1] < 1e-7;
        const bool corner_moves = track.variation[2] > 1.0;
        const bool pass = volume_const && area_const && corner_moves && increasing && report.all_pass();
        write_summary(cfg, pass ? "pass" : "fail",
                      {{"sigma", sigma},
                       {"tent", tent_to_json(tf.spec)},
                       {"variation", track.variation},
                       {"assertions",
                        {{"a_d_constant", volume_const},
                         {"a_dm1_constant", area_const},
                         {"a_dm2_varies", corner_moves},
                         {"a_dm2_grows_as_phi_tilde_shrinks", increasing},
                         {"sigma_conditions", report.all_pass()}}}});
        std::cout << "theorem1-demo: " << (pass ? "pass" : "fail") << " (a_d " << number(track.variation[0])
                  << ", a_{d-1} " << number(track.variation[1]) << ", a_{d-2} " << number(track.variation[2])
                  << ")\n";
        return pass ? 0 : kExitFail;
    } catch (const Error& e) {
        write_summary(cfg, "error", {{"stage", stage}, {"error", e.what()}});
        std::cerr << "flexspec: theorem1-demo failed at stage " << stage << ": " << e.what() << '\n';
        return kExitError;
    }
}

}  // namespace

json ExperimentConfig::to_json() const {
    return json{{"command", command},
                {"family", family},
                {"polygon", polygon},
                {"epsilon", epsilon},
                {"delta", delta},
                {"h", h},
                {"k_min", k_min},
                {"k_max", k_max},
                {"samples", samples},
                {"n", n},
                {"bc", std::string(to_string(bc))},
                {"seed", seed},
                {"out_dir", out_dir.generic_string()},
                {"out", out}};
}

void ExperimentConfig::merge(const json& j) {
    for (const auto& [key, value] : j.items()) {
        if (key == "command") command = value.get<std::string>();
        else if (key == "family") family = value.get<std::string>();
        else if (key == "polygon") polygon = value.get<std::string>();
        else if (key == "epsilon") epsilon = value.get<double>();
        else if (key == "delta") delta = value.get<double>();
        else if (key == "h") h = value.get<double>();
        else if (key == "k_min") k_min = value.get<double>();
        else if (key == "k_max") k_max = value.get<double>();
        else if (key == "samples") samples = value.get<int>();
        else if (key == "n") n = value.get<int>();
        else if (key == "bc") bc = parse_bc(value.get<std::string>());
        else if (key == "seed") seed = value.get<std::uint64_t>();
        else if (key == "out_dir") out_dir = value.get<std::string>();
        else if (key == "out") out = value.get<std::string>();
        else throw Error(ErrorKind::invalid_argument, "config: unknown key '" + key + "'");
    }
}

void ExperimentConfig::validate() const {
    const auto bad = [](const std::string& what) { throw Error(ErrorKind::invalid_argument, "config: " + what); };
    if (!(epsilon > 0.0)) bad("epsilon must be > 0");
    if (!(delta > 0.0 && delta <= 1.0)) bad("delta must lie in (0, 1]");
    if (!(h > 0.0 && h <= 1.0)) bad("h must lie in (0, 1]");
    if (samples < 2 || samples > 100000) bad("samples must lie in [2, 100000]");
    if (n < 1 || n > 5000) bad("n must lie in [1, 5000]");
    if (!(k_min > 0.0 && k_min < k_max)) bad("need 0 < k_min < k_max");
    if (!family.empty() && !is_builtin_family(family) && !fs::exists(family)) bad("family file not found: " + family);
    if (!polygon.empty() && !is_builtin_polygon(polygon) && !fs::exists(polygon)) {
        bad("polygon file not found: " + polygon);
    }
}

std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string config_hash(const ExperimentConfig& config) {
    // Output locations do not change results and stay out of the hash.
    json j = config.to_json();
    j.erase("out_dir");
    j.erase("out");
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(j.dump())));
    return buf;
}

FlexFamily load_family(const std::string& name) {
    if (name == "steffen") return make_steffen();
    if (name == "bricard1") return make_bricard1();
    if (name == "cube") return make_rigid_cube();
    if (name == "four-bar") {
        const std::vector<double> lengths{2.0, 1.0, 2.0, 1.0};
        return make_flex_polygon(lengths);
    }
    if (name.empty()) throw Error(ErrorKind::invalid_argument, "config: no family given");
    return family_from_json(read_file(name));
}

Eigen::Matrix2Xd load_polygon(const std::string& name) {
    Eigen::Matrix2Xd p;
    if (name == "square") {
        p.resize(2, 4);
        p << 0, 1, 1, 0, 0, 0, 1, 1;
    } else if (name == "l-shape") {
        // Side 2, re-entrant corner at the origin.
        p.resize(2, 6);
        p << -1, 1, 1, 0, 0, -1, -1, -1, 0, 0, 1, 1;
    } else {
        if (name.empty()) throw Error(ErrorKind::invalid_argument, "config: no polygon given");
        try {
            const auto pts = json::parse(read_file(name)).at("vertices").get<std::vector<std::array<double, 2>>>();
            p.resize(2, static_cast<Eigen::Index>(pts.size()));
            for (std::size_t i = 0; i < pts.size(); ++i) p.col(static_cast<Eigen::Index>(i)) << pts[i][0], pts[i][1];
        } catch (const json::exception& e) {
            throw Error(ErrorKind::io_error, name + ": " + e.what());
        }
    }
    return p;
}

int run(int argc, char** argv) {
    CLI::App app{"Flexible polyhedra, tent construction and Laplace spectra"};
    app.require_subcommand(1);
    app.set_help_flag("--help", "Print this help message and exit");  // --h is the mesh size

    std::string config_file, out_dir;
    std::uint64_t seed = 1;
    app.add_option("--config", config_file, "JSON experiment config; command-line knobs override it");
    app.add_option("--out-dir", out_dir, "Directory for CSV and JSON outputs");
    app.add_option("--seed", seed, "Seed recorded in the config hash");

    ExperimentConfig knobs;
    std::string bc = "dirichlet";
    const auto add_knobs = [&](CLI::App* sub) {
        sub->add_option("--family", knobs.family, "Family JSON file or steffen|bricard1|cube|four-bar");
        sub->add_option("--polygon", knobs.polygon, "Polygon JSON file or square|l-shape");
        sub->add_option("--samples", knobs.samples, "Number of flex parameters");
        sub->add_option("--bc", bc, "dirichlet or neumann");
        sub->add_option("--epsilon", knobs.epsilon, "Hausdorff budget of the tent construction");
        sub->add_option("--delta", knobs.delta, "Ridge-selection window as a fraction of the family interval");
        sub->add_option("--h", knobs.h, "Mesh size");
        sub->add_option("--n", knobs.n, "Number of eigenvalues");
        sub->add_option("--kmin", knobs.k_min, "Lower end of the Weyl window");
        sub->add_option("--kmax", knobs.k_max, "Upper end of the Weyl window");
        sub->add_option("--out", knobs.out, "Primary output file");
        sub->add_option("--out-dir", out_dir, "Directory for CSV and JSON outputs");
        sub->add_option("--seed", seed, "Seed recorded in the config hash");
        sub->add_option("--config", config_file, "JSON experiment config; command-line knobs override it");
    };

    struct Leaf {
        CLI::App* app;
        std::string command;
        int (*fn)(const ExperimentConfig&);
    };
    std::vector<Leaf> leaves;
    const auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& help, const std::string& command,
                          int (*fn)(const ExperimentConfig&)) {
        CLI::App* sub = parent->add_subcommand(name, help);
        add_knobs(sub);
        leaves.push_back({sub, command, fn});
    };

    CLI::App* flex = app.add_subcommand("flex", "Flex families");
    flex->require_subcommand(1);
    leaf(flex, "sample", "Vertex positions along a family", "flex sample", cmd_flex_sample);
    leaf(flex, "export", "Write a family as JSON with its corrector residual", "flex export", cmd_flex_export);
    CLI::App* tent = app.add_subcommand("tent", "Tent construction");
    tent->require_subcommand(1);
    leaf(tent, "build", "Build the tent-modified family", "tent build", cmd_tent_build);
    leaf(tent, "verify", "Check the tent conditions on samples", "tent verify", cmd_tent_verify);
    CLI::App* coeffs = app.add_subcommand("coeffs", "Asymptotic coefficients");
    coeffs->require_subcommand(1);
    leaf(coeffs, "track", "Coefficients along a family", "coeffs track", cmd_coeffs_track);
    CLI::App* spectrum = app.add_subcommand("spectrum", "Finite-element spectra");
    spectrum->require_subcommand(1);
    leaf(spectrum, "solve", "Two-mesh eigenvalues of a polygon", "spectrum solve", cmd_spectrum_solve);
    leaf(spectrum, "sweep", "Eigenvalues along a planar family", "spectrum sweep", cmd_spectrum_sweep);
    leaf(spectrum, "verify-weyl", "Counting function against the two-term law", "spectrum verify-weyl",
         cmd_spectrum_weyl);
    leaf(spectrum, "corner-fit", "k^2 coefficient of the p = 2 Riesz mean on the square", "spectrum corner-fit",
         cmd_spectrum_corner);
    leaf(&app, "invariants", "Volume, area, mean curvature and angle range along a family", "invariants",
         cmd_invariants);
    leaf(&app, "theorem1-demo", "Tent construction followed by coefficient tracking", "theorem1-demo",
         cmd_theorem1_demo);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitError;
    }

    try {
        const auto chosen = std::find_if(leaves.begin(), leaves.end(), [](const Leaf& l) { return l.app->parsed(); });
        if (chosen == leaves.end()) throw Error(ErrorKind::invalid_argument, "no command given");

        ExperimentConfig cfg;
        if (!config_file.empty()) {
            try {
                cfg.merge(json::parse(read_file(config_file)));
            } catch (const json::exception& e) {
                throw Error(ErrorKind::io_error, config_file + ": " + e.what());
            }
        }
        cfg.command = chosen->command;
        const CLI::App* sub = chosen->app;
        const auto given = [&](const char* opt) { return sub->count(opt) > 0; };
        if (given("--family")) cfg.family = knobs.family;
        if (given("--polygon")) cfg.polygon = knobs.polygon;
        if (given("--samples")) cfg.samples = knobs.samples;
        if (given("--bc")) cfg.bc = parse_bc(bc);
        if (given("--epsilon")) cfg.epsilon = knobs.epsilon;
        if (given("--delta")) cfg.delta = knobs.delta;
        if (given("--h")) cfg.h = knobs.h;
        if (given("--n")) cfg.n = knobs.n;
        if (given("--kmin")) cfg.k_min = knobs.k_min;
        if (given("--kmax")) cfg.k_max = knobs.k_max;
        if (given("--out")) cfg.out = knobs.out;
        if (given("--out-dir") || app.count("--out-dir") > 0) cfg.out_dir = out_dir;
        if (given("--seed") || app.count("--seed") > 0) cfg.seed = seed;
        cfg.validate();
        fs::create_directories(cfg.out_dir);
        return chosen->fn(cfg);
    } catch (const Error& e) {
        std::cerr << "flexspec: " << e.what() << '\n';
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "flexspec: " << e.what() << '\n';
        return kExitError;
    }
}

}  // namespace flexspec::cli
