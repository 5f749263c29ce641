#pragma once

#include <stdexcept>
#include <string>

namespace exitmoments {

/// Bad geometry, out-of-range argument, malformed file. CLI exit code 2.
class InvalidInput : public std::invalid_argument {
public:
    explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

/// An iterative solver stopped before meeting its tolerance. CLI exit code 3.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double achieved)
        : std::runtime_error(what), achieved_(achieved) {}

    /// Residual (or error estimate) reached when the iteration gave up.
    double achieved() const { return achieved_; }

private:
    double achieved_;
};

} // namespace exitmoments
