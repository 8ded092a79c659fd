#include "swss/errors.hpp"

namespace swss {

auto to_string(ErrorKind kind) -> std::string_view {
  switch (kind) {
    case ErrorKind::SpecParseError: return "SpecParseError";
    case ErrorKind::NotATree: return "NotATree";
    case ErrorKind::NonPositiveParameter: return "NonPositiveParameter";
    case ErrorKind::EdgeRateMissing: return "EdgeRateMissing";
    case ErrorKind::NotCriticallyLoaded: return "NotCriticallyLoaded";
    case ErrorKind::CRPViolated: return "CRPViolated";
    case ErrorKind::InvalidP: return "InvalidP";
    case ErrorKind::SamePool: return "SamePool";
    case ErrorKind::AnchorNotEdge: return "AnchorNotEdge";
    case ErrorKind::BalanceViolated: return "BalanceViolated";
    case ErrorKind::NotASimplexPoint: return "NotASimplexPoint";
    case ErrorKind::NTooSmall: return "NTooSmall";
    case ErrorKind::ModeMismatch: return "ModeMismatch";
    case ErrorKind::EmptyTrajectory: return "EmptyTrajectory";
    case ErrorKind::PreconditionFailed: return "PreconditionFailed";
    case ErrorKind::SingularSystem: return "SingularSystem";
    case ErrorKind::NotTransientRegime: return "NotTransientRegime";
    case ErrorKind::MarginNonPositive: return "MarginNonPositive";
    case ErrorKind::NotFound: return "NotFound";
    case ErrorKind::InequalityFailed: return "InequalityFailed";
    case ErrorKind::NonFiniteState: return "NonFiniteState";
  }
  return "Unknown";
}

auto category_of(ErrorKind kind) -> ErrorCategory {
  switch (kind) {
    case ErrorKind::SpecParseError:
      return ErrorCategory::Parse;
    case ErrorKind::SingularSystem:
    case ErrorKind::MarginNonPositive:
    case ErrorKind::NotFound:
    case ErrorKind::InequalityFailed:
    case ErrorKind::NonFiniteState:
      return ErrorCategory::Check;
    default:
      return ErrorCategory::Model;
  }
}

}  // namespace swss
