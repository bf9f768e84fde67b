#ifndef VFE_ERRORS_HPP
#define VFE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace vfe {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Numeric evaluation failure: missing coordinate or analytic singularity
/// (division by zero, log of non-positive, sqrt of negative). The message
/// names the offending subexpression.
struct EvalError : Error {
  using Error::Error;
};

/// Expression-text or config-file syntax error with 1-based position.
struct ParseError : Error {
  int line = 1;
  int column = 1;
  ParseError(const std::string& msg, int line_, int column_)
      : Error(msg + " (line " + std::to_string(line_) + ", column " +
              std::to_string(column_) + ")"),
        line(line_),
        column(column_) {}
};

/// Singular Lagrangian / Hessian / Jacobian where regularity is required.
struct SingularError : Error {
  using Error::Error;
};

/// Iteration limit exceeded in Newton-type loops.
struct ConvergenceError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace vfe

#endif
