#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace traceform {

enum class ErrorKind {
  CoincidentPoints,
  DimensionMismatch,
  NonpositiveRadius,
  NonpositiveWeight,
  DuplicatePoint,
  EmptyMeasure,
  CutoffExceedsLimit,
  NotDominated,
  PolarAtomicSupport,
  UnsupportedMeasure,
  SingularSystem,
  NonpositiveEigenvalue,
  ConvergenceFailure,
  BoundaryHitsEigenvalue,
  ShrinkingSupport,
  SingularMass,
  BracketFailure,
  QuadratureUnderflow,
  PointTooCloseToSupport,
  InvalidArgument,
  ConfigParse,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::CoincidentPoints: return "CoincidentPoints";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NonpositiveRadius: return "NonpositiveRadius";
    case ErrorKind::NonpositiveWeight: return "NonpositiveWeight";
    case ErrorKind::DuplicatePoint: return "DuplicatePoint";
    case ErrorKind::EmptyMeasure: return "EmptyMeasure";
    case ErrorKind::CutoffExceedsLimit: return "CutoffExceedsLimit";
    case ErrorKind::NotDominated: return "NotDominated";
    case ErrorKind::PolarAtomicSupport: return "PolarAtomicSupport";
    case ErrorKind::UnsupportedMeasure: return "UnsupportedMeasure";
    case ErrorKind::SingularSystem: return "SingularSystem";
    case ErrorKind::NonpositiveEigenvalue: return "NonpositiveEigenvalue";
    case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorKind::BoundaryHitsEigenvalue: return "BoundaryHitsEigenvalue";
    case ErrorKind::ShrinkingSupport: return "ShrinkingSupport";
    case ErrorKind::SingularMass: return "SingularMass";
    case ErrorKind::BracketFailure: return "BracketFailure";
    case ErrorKind::QuadratureUnderflow: return "QuadratureUnderflow";
    case ErrorKind::PointTooCloseToSupport: return "PointTooCloseToSupport";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ConfigParse: return "ConfigParse";
  }
  return "Unknown";
}

/// Single exception type for the library; `kind()` carries the failure class.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace traceform
