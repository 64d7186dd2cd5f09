#pragma once

#include <stdexcept>
#include <string>

namespace gmsfem {

/// Invalid run/experiment configuration (bad grid pair, unknown kind, ...).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Bad runtime parameter value (wrong arity, non-positive mu, empty sample set).
struct ParameterError : std::invalid_argument {
    explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

/// A caller broke an API precondition (non-nested regions, missing data).
struct ContractError : std::logic_error {
    explicit ContractError(const std::string& what) : std::logic_error(what) {}
};

/// Index out of the valid range.
struct RangeError : std::out_of_range {
    explicit RangeError(const std::string& what) : std::out_of_range(what) {}
};

/// Input that makes the requested computation degenerate (all-boundary system,
/// zero reference norm, too few samples).
struct DegenerateInputError : std::invalid_argument {
    explicit DegenerateInputError(const std::string& what) : std::invalid_argument(what) {}
};

/// Numerical failure; carries the residual that triggered it when available.
struct NumericError : std::runtime_error {
    double residual;
    explicit NumericError(const std::string& what, double res = -1.0)
        : std::runtime_error(what), residual(res) {}
};

} // namespace gmsfem
