#pragma once

#include <stdexcept>
#include <string>

namespace qrmrecon {

/// Bad user input: malformed files, invalid grids, out-of-range parameters.
class InputError : public std::invalid_argument {
public:
    explicit InputError(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Numerical failure: singular system, non-SPD normal equations, divergence guard.
class SolverError : public std::runtime_error {
public:
    explicit SolverError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Data carries no usable signal (e.g. an all-zero spectrum).
class DegenerateDataError : public std::runtime_error {
public:
    explicit DegenerateDataError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace qrmrecon
