#ifndef MCPOIS_ERRORS_HPP
#define MCPOIS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mcpois {

// Bad input data or configuration (CLI exit code 2).
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Solver failed to converge (CLI exit code 3).
struct ConvergenceError : std::runtime_error {
  explicit ConvergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

// Data-integrity violation, e.g. route distance shorter than haversine (CLI exit code 4).
struct IntegrityError : std::runtime_error {
  explicit IntegrityError(const std::string& msg) : std::runtime_error(msg) {}
};

struct SingularDesignError : ValidationError {
  explicit SingularDesignError(const std::string& msg) : ValidationError(msg) {}
};

struct SeparationError : ConvergenceError {
  explicit SeparationError(const std::string& msg) : ConvergenceError(msg) {}
};

}  // namespace mcpois

#endif
