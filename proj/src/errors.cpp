#include "dstori/errors.h"

namespace dstori {

const char* to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::DegenerateTriple: return "DegenerateTriple";
    case ErrorCode::DegenerateTuple: return "DegenerateTuple";
    case ErrorCode::OrientationMismatch: return "OrientationMismatch";
    case ErrorCode::InvalidMatrix: return "InvalidMatrix";
    case ErrorCode::NotHyperbolic: return "NotHyperbolic";
    case ErrorCode::NonPositiveAngle: return "NonPositiveAngle";
    case ErrorCode::DegenerateRectangle: return "DegenerateRectangle";
    case ErrorCode::ChartFailure: return "ChartFailure";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::OutsideDomain: return "OutsideDomain";
    case ErrorCode::BoundaryCase: return "BoundaryCase";
    case ErrorCode::NotBoundary: return "NotBoundary";
    case ErrorCode::OutOfInterval: return "OutOfInterval";
    case ErrorCode::InvalidHiet: return "InvalidHiet";
    case ErrorCode::DuplicatePoints: return "DuplicatePoints";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::InconsistentPairing: return "InconsistentPairing";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::NonStandardQuadrants: return "NonStandardQuadrants";
    case ErrorCode::EllipticHolonomy: return "EllipticHolonomy";
    case ErrorCode::NotFixingBase: return "NotFixingBase";
    case ErrorCode::NoReturn: return "NoReturn";
    case ErrorCode::NoRoot: return "NoRoot";
    case ErrorCode::VerificationFailed: return "VerificationFailed";
    case ErrorCode::IncompatibleCircle: return "IncompatibleCircle";
  }
  return "Unknown";
}

bool Error::is_validation() const {
  switch (code_) {
    case ErrorCode::BudgetExceeded:
    case ErrorCode::NoRoot:
    case ErrorCode::VerificationFailed:
      return false;
    default:
      return true;
  }
}

}  // namespace dstori
