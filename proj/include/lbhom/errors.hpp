#pragma once

#include <stdexcept>
#include <string>

namespace lbhom {

// Quadrature / root-finding failure. Carries the abscissa (or parameter)
// where convergence was lost so callers can report it.
class NumericError : public std::runtime_error {
public:
    NumericError(const std::string& what, double where)
        : std::runtime_error(what + " (at t = " + std::to_string(where) + ")"),
          where_(where) {}
    double where() const { return where_; }

private:
    double where_;
};

// Too few samples/survivors to produce the requested statistic.
class StatisticsError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid geometry or run configuration.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace lbhom
