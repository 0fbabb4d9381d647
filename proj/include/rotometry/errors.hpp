#ifndef ROTOMETRY_ERRORS_HPP
#define ROTOMETRY_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace rotometry {

// Base class for everything thrown by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad parameters, mismatched bases, unknown mode labels. CLI exit code 2.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// Requested basis would exceed the configured dimension cap.
class DimensionCapError : public ConfigError {
 public:
  explicit DimensionCapError(const std::string& msg) : ConfigError(msg) {}
};

// Numerical failures: non-Hermitian assembly, eigensolver breakdown,
// bad minimization brackets. CLI exit code 3.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& msg) : Error(msg) {}
};

class AssemblyError : public NumericalError {
 public:
  explicit AssemblyError(const std::string& msg) : NumericalError(msg) {}
};

class SolverError : public NumericalError {
 public:
  explicit SolverError(const std::string& msg) : NumericalError(msg) {}
};

class BracketError : public NumericalError {
 public:
  explicit BracketError(const std::string& msg) : NumericalError(msg) {}
};

}  // namespace rotometry

#endif  // ROTOMETRY_ERRORS_HPP
