#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace egocorridor {

enum class ErrorKind {
  BoundaryCrossing,
  InsufficientBoundary,
  SensorOutOfGrid,
  SensorInsideObstacle,
  EmptySamples,
  BehindCamera,
  ShapeMismatch,
  EmptyEvaluation,
  SchemaError,
  UnknownScenarioKind,
  IoError,
  InvalidArgument,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Error carrying a machine-readable kind. Per-frame failures in a batch are
/// recorded by kind in the run report.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace egocorridor
