#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace flexspec {

enum class ErrorKind {
    invalid_surface,
    unsupported_dimension,
    dimension_mismatch,
    invalid_argument,
    continuation_failure,
    not_flexible,
    resolution_exhausted,
    construction_failure,
    invalid_domain,
    mesh_failure,
    factorization_failure,
    no_convergence,
    untrusted_range,
    io_error,
};

[[nodiscard]] std::string_view to_string(ErrorKind kind) noexcept;

// All library failures are reported through this type; `kind()` lets callers
// branch on the failure class without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::invalid_surface: return "invalid-surface";
        case ErrorKind::unsupported_dimension: return "unsupported-dimension";
        case ErrorKind::dimension_mismatch: return "dimension-mismatch";
        case ErrorKind::invalid_argument: return "invalid-argument";
        case ErrorKind::continuation_failure: return "continuation-failure";
        case ErrorKind::not_flexible: return "not-flexible";
        case ErrorKind::resolution_exhausted: return "resolution-exhausted";
        case ErrorKind::construction_failure: return "construction-failure";
        case ErrorKind::invalid_domain: return "invalid-domain";
        case ErrorKind::mesh_failure: return "mesh-failure";
        case ErrorKind::factorization_failure: return "factorization-failure";
        case ErrorKind::no_convergence: return "no-convergence";
        case ErrorKind::untrusted_range: return "untrusted-range";
        case ErrorKind::io_error: return "io-error";
    }
    return "unknown";
}

}  // namespace flexspec
