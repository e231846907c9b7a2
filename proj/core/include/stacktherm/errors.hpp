#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace stacktherm {

/// Raised for geometrically or physically inconsistent inputs (bad stacks,
/// unknown blocks in a power map, non-positive material values).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A malformed input file. Carries the role of the file ("flp", "lcf",
/// "ptrace", ...) and the 1-based line where the problem was found.
class ParseError : public std::runtime_error {
public:
    ParseError(std::string role, std::size_t line, const std::string& message)
        : std::runtime_error(role + ":" + std::to_string(line) + ": " + message),
          role_(std::move(role)),
          line_(line < 1 ? 1 : line),
          message_(message) {}

    const std::string& role() const noexcept { return role_; }
    std::size_t line() const noexcept { return line_; }
    const std::string& message() const noexcept { return message_; }

private:
    std::string role_;
    std::size_t line_;
    std::string message_;
};

class SolverError : public std::runtime_error {
public:
    enum class Kind { TooLarge, FloatingNetwork, NotConverged };

    SolverError(Kind kind, const std::string& what,
                std::vector<double> best_iterate = {}, double residual = 0.0)
        : std::runtime_error(what),
          kind_(kind),
          best_iterate_(std::move(best_iterate)),
          residual_(residual) {}

    Kind kind() const noexcept { return kind_; }
    /// Temperatures (kelvin) of the best iterate; only set for NotConverged.
    const std::vector<double>& best_iterate() const noexcept { return best_iterate_; }
    double residual() const noexcept { return residual_; }

private:
    Kind kind_;
    std::vector<double> best_iterate_;
    double residual_;
};

}  // namespace stacktherm
