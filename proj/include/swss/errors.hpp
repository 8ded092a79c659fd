#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace swss {

enum class ErrorKind {
  // input / parsing
  SpecParseError,
  // model validity
  NotATree,
  NonPositiveParameter,
  EdgeRateMissing,
  NotCriticallyLoaded,
  CRPViolated,
  InvalidP,
  SamePool,
  AnchorNotEdge,
  BalanceViolated,
  NotASimplexPoint,
  NTooSmall,
  ModeMismatch,
  EmptyTrajectory,
  PreconditionFailed,
  // numerical / certificate failures
  SingularSystem,
  NotTransientRegime,
  MarginNonPositive,
  NotFound,
  InequalityFailed,
  NonFiniteState,
};

auto to_string(ErrorKind kind) -> std::string_view;

/// Coarse grouping used by the command line front end to pick exit codes.
enum class ErrorCategory { Parse, Model, Check };

auto category_of(ErrorKind kind) -> ErrorCategory;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind) {}

  [[nodiscard]] auto kind() const noexcept -> ErrorKind { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace swss
