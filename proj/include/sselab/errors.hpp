#pragma once

#include <stdexcept>
#include <string>

namespace sselab {

struct DimensionMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Non-finite state detected while integrating; names the failing step.
struct BlowUpError : std::runtime_error {
    long step;
    long trajectory;
    BlowUpError(long step_, long trajectory_, const std::string& what_)
        : std::runtime_error(what_), step(step_), trajectory(trajectory_) {}
};

// Zero (or denormal) state norm where a division is required.
struct DegenerateStateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StepFailureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonUniqueSteadyState : std::runtime_error {
    int kernel_dim;
    NonUniqueSteadyState(int kernel_dim_, const std::string& what_)
        : std::runtime_error(what_), kernel_dim(kernel_dim_) {}
};

// The Lyapunov quadratic form keeps growing with the truncation level, so no
// dimension-independent (alpha, beta) pair exists.
struct UnboundedFormError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    int line;
    ConfigError(int line_, const std::string& what_)
        : std::runtime_error(what_), line(line_) {}
};

struct IntegrationFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace sselab
