#pragma once

#include <stdexcept>
#include <string>

namespace pnm {

// Base for every error raised by the library. kind() is a stable, machine
// readable tag used by the CLI when it serialises failures.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

class ContractViolation : public Error {
 public:
  explicit ContractViolation(const std::string& what) : Error("contract_violation", what) {}
};

class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& what) : Error("dimension_error", what) {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error("domain_error", what) {}
};

class ResolutionError : public Error {
 public:
  explicit ResolutionError(const std::string& what) : Error("resolution_error", what) {}
};

class RegimeError : public Error {
 public:
  explicit RegimeError(const std::string& what) : Error("regime_error", what) {}
};

// Steady state is not unique (Liouvillian kernel has dimension > 1).
class AmbiguityError : public Error {
 public:
  AmbiguityError(const std::string& what, int nullity)
      : Error("ambiguity_error", what), nullity_(nullity) {}
  int nullity() const noexcept { return nullity_; }

 private:
  int nullity_;
};

class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, double last_good_time = 0.0)
      : Error("numerical_error", what), last_good_time_(last_good_time) {}
  double last_good_time() const noexcept { return last_good_time_; }

 private:
  double last_good_time_;
};

class FitError : public Error {
 public:
  explicit FitError(const std::string& what) : Error("fit_error", what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error("config_error", what) {}
};

}  // namespace pnm
