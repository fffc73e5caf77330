#pragma once

#include <stdexcept>
#include <string>

namespace glag {

/// Bad argument to a generator or solver (sizes, ranges, invariant violations).
class parameter_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed input file. Carries the 1-based line number when known (-1 otherwise).
class format_error : public std::runtime_error {
public:
    explicit format_error(const std::string& msg, long line = -1)
        : std::runtime_error(line >= 0 ? msg + " (line " + std::to_string(line) + ")" : msg),
          line_(line) {}

    long line() const noexcept { return line_; }

private:
    long line_;
};

/// An iterative scheme exhausted its iteration budget. Carries the last residual.
class convergence_error : public std::runtime_error {
public:
    convergence_error(const std::string& msg, double residual)
        : std::runtime_error(msg + " (last residual " + std::to_string(residual) + ")"),
          residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

} // namespace glag
