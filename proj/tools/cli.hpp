#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "flexspec/flex.hpp"
#include "flexspec/spectrum.hpp"

namespace flexspec::cli {

// Everything that determines the output of one run. The hash of its JSON
// form is stamped on every CSV and summary.
struct ExperimentConfig {
    std::string command;  // "coeffs track", "theorem1-demo", ...
    std::string family;   // JSON file or built-in name
    std::string polygon;  // JSON file or built-in name
    double epsilon = 0.05;
    double delta = 0.1;
    double h = 0.05;
    double k_min = 10.0;
    double k_max = 40.0;
    int samples = 50;
    int n = 10;
    BoundaryCondition bc = BoundaryCondition::dirichlet;
    std::uint64_t seed = 1;
    std::filesystem::path out_dir = ".";
    std::string out;  // primary output file, relative to out_dir unless absolute

    [[nodiscard]] nlohmann::json to_json() const;
    // Applies the keys present in `j`; unknown keys are rejected.
    void merge(const nlohmann::json& j);
    // Throws invalid_argument naming the offending knob or missing file.
    void validate() const;
};

[[nodiscard]] std::uint64_t fnv1a(std::string_view bytes);
[[nodiscard]] std::string config_hash(const ExperimentConfig& config);

// Built-in names: steffen, bricard1, cube, four-bar. Anything else is read as a file.
[[nodiscard]] FlexFamily load_family(const std::string& name);
// Built-in names: square, l-shape. Files hold {"vertices": [[x, y], ...]}.
[[nodiscard]] Eigen::Matrix2Xd load_polygon(const std::string& name);

// Exit codes: 0 success, 1 a reported check failed, 2 configuration or module error.
int run(int argc, char** argv);

}  // namespace flexspec::cli
