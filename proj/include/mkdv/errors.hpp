#pragma once

#include <stdexcept>
#include <string>

namespace mkdv {

/// Invalid or inconsistent configuration (bad grid metadata, unknown config
/// keys, non-integral step counts, ...). Maps to CLI exit code 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// The implicit solve did not converge within the iteration budget.
/// Carries the last residual norm and the iterations spent. Exit code 1.
struct StepFailure : std::runtime_error {
    StepFailure(const std::string& what, double residual_norm_, int iterations_)
        : std::runtime_error(what),
          residual_norm(residual_norm_),
          iterations(iterations_) {}
    double residual_norm;
    int iterations;
};

/// The linear system of a Newton iteration was singular to working precision.
/// Exit code 1.
struct SingularMatrixError : std::runtime_error {
    explicit SingularMatrixError(const std::string& what)
        : std::runtime_error(what) {}
};

}  // namespace mkdv
