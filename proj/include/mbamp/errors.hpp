#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mbamp {

enum class ErrorKind {
  NonConvergence,
  BoundaryZero,
  Diverged,
  StepUnderflow,
  Overflow,
  DomainError,
  InvalidPulse,
  DivisionNearZero,
  FitRejected,
  AssumptionViolated,
  AmbiguousMatch,
  WrongRegion,
  NoRoot,
  ReflectionZero,
  CFLViolation,
  NonPhysical,
  OutOfDomain,
  InvalidConfig,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries one of the kinds above so that
/// callers (and the CLI) can react to the category without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

}  // namespace mbamp
