#pragma once

#include <stdexcept>
#include <string>

namespace phasekit {

/// Process exit codes shared by the CLI and the error hierarchy below.
enum class ExitCode : int {
  ok = 0,
  config = 2,
  admissibility = 3,
  bounds = 4,
  no_convergence = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ExitCode code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

/// Invalid argument or violated precondition (non-finite input, bad interval, ...).
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ExitCode::config, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ExitCode::config, what) {}
};

class AdmissibilityError : public Error {
 public:
  explicit AdmissibilityError(const std::string& what) : Error(ExitCode::admissibility, what) {}
};

/// Guard-rail violation or NaN/Inf in a running simulation.
class BoundsError : public Error {
 public:
  explicit BoundsError(const std::string& what) : Error(ExitCode::bounds, what) {}
};

class ConvergenceError : public Error {
 public:
  explicit ConvergenceError(const std::string& what) : Error(ExitCode::no_convergence, what) {}
};

}  // namespace phasekit
