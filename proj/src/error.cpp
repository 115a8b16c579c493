#include "egocorridor/error.hpp"

namespace egocorridor {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::BoundaryCrossing: return "BoundaryCrossing";
    case ErrorKind::InsufficientBoundary: return "InsufficientBoundary";
    case ErrorKind::SensorOutOfGrid: return "SensorOutOfGrid";
    case ErrorKind::SensorInsideObstacle: return "SensorInsideObstacle";
    case ErrorKind::EmptySamples: return "EmptySamples";
    case ErrorKind::BehindCamera: return "BehindCamera";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::EmptyEvaluation: return "EmptyEvaluation";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::UnknownScenarioKind: return "UnknownScenarioKind";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace egocorridor
