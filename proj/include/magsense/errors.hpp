#pragma once

#include <stdexcept>
#include <string>

namespace magsense {

/// Physics-domain violation: invalid parameter ranges, non-Hurwitz drift,
/// unstable integrator steps.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Reconstruction input set does not match the calibration plan.
class PlanError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Reconstruction stage produced an inconsistent estimate.
class EstimationError : public std::runtime_error {
 public:
  EstimationError(const std::string& what, std::string diagnostics)
      : std::runtime_error(what), diagnostics_(std::move(diagnostics)) {}

  const std::string& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::string diagnostics_;
};

}  // namespace magsense
