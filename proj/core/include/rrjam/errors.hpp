#ifndef RRJAM_ERRORS_HPP
#define RRJAM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace rrjam {

// Bad inputs: malformed configs, parameter ranges, topologies whose chains
// degenerate. CLI exit code 1.
class ValidationError : public std::runtime_error {
public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// A computation that started from valid inputs broke down numerically
// (residual too large, closed form outside [0,1], ...). CLI exit code 2.
class NumericalError : public std::runtime_error {
public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// An independent cross-check (Monte Carlo oracle, grid search) disagreed with
// the implementation it guards. CLI exit code 3.
class OracleError : public std::runtime_error {
public:
  explicit OracleError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace rrjam

#endif
