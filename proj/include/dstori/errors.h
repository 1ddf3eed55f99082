#pragma once

#include <stdexcept>
#include <string>

#include "json.hpp"

namespace dstori {

enum class ErrorCode {
  DegenerateTriple,
  DegenerateTuple,
  OrientationMismatch,
  InvalidMatrix,
  NotHyperbolic,
  NonPositiveAngle,
  DegenerateRectangle,
  ChartFailure,
  DomainError,
  OutsideDomain,
  BoundaryCase,
  NotBoundary,
  OutOfInterval,
  InvalidHiet,
  DuplicatePoints,
  BudgetExceeded,
  InconsistentPairing,
  InvalidSpec,
  NonStandardQuadrants,
  EllipticHolonomy,
  NotFixingBase,
  NoReturn,
  NoRoot,
  VerificationFailed,
  IncompatibleCircle,
};

const char* to_string(ErrorCode c);

/// Every library failure is reported through this type. `payload` carries
/// structured context, e.g. the best estimate when a budget runs out.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what, nlohmann::json payload = {})
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code),
        payload_(std::move(payload)) {}

  ErrorCode code() const { return code_; }
  const nlohmann::json& payload() const { return payload_; }

  /// Validation-type failures map to CLI exit code 2, budget to 3.
  bool is_validation() const;

 private:
  ErrorCode code_;
  nlohmann::json payload_;
};

}  // namespace dstori
