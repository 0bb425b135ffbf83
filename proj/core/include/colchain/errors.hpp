// errors.hpp: Exception types shared by every colchain module

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace colchain {

// Invalid user-facing configuration (bad spectral density, empty table, ...)
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Malformed input file; carries the 1-based row that failed to parse
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t row)
        : std::runtime_error(what + " (row " + std::to_string(row) + ")"), row_(row) {}

    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

// A numerical routine failed to reach its tolerance; `achieved` is the best
// error estimate it produced.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, double achieved)
        : std::runtime_error(what + " (achieved tolerance " + std::to_string(achieved) + ")"),
          achieved_(achieved) {}

    double achieved() const noexcept { return achieved_; }

private:
    double achieved_;
};

// Loss of positivity in a recurrence; `index` names the failing step
class InstabilityError : public std::runtime_error {
public:
    InstabilityError(const std::string& what, std::size_t index)
        : std::runtime_error(what + " at index " + std::to_string(index)), index_(index) {}

    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

// Tensor shapes or site indices that do not fit together
class StructuralError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace colchain
