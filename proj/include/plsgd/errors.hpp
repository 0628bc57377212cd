#pragma once

#include <stdexcept>
#include <string>

namespace plsgd {

struct InvalidInputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NumericalFailureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PreconditionViolationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InsufficientProbesError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotInterpolatedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonContractiveError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EnumerationTooLargeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DivergenceError : std::runtime_error {
    int run;
    int step;
    DivergenceError(const std::string& what, int run_, int step_)
        : std::runtime_error(what), run(run_), step(step_) {}
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace plsgd
