#include "mbamp/errors.hpp"

namespace mbamp {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::BoundaryZero: return "BoundaryZero";
    case ErrorKind::Diverged: return "Diverged";
    case ErrorKind::StepUnderflow: return "StepUnderflow";
    case ErrorKind::Overflow: return "Overflow";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::InvalidPulse: return "InvalidPulse";
    case ErrorKind::DivisionNearZero: return "DivisionNearZero";
    case ErrorKind::FitRejected: return "FitRejected";
    case ErrorKind::AssumptionViolated: return "AssumptionViolated";
    case ErrorKind::AmbiguousMatch: return "AmbiguousMatch";
    case ErrorKind::WrongRegion: return "WrongRegion";
    case ErrorKind::NoRoot: return "NoRoot";
    case ErrorKind::ReflectionZero: return "ReflectionZero";
    case ErrorKind::CFLViolation: return "CFLViolation";
    case ErrorKind::NonPhysical: return "NonPhysical";
    case ErrorKind::OutOfDomain: return "OutOfDomain";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace mbamp
