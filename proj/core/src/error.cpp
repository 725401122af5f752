#include "superdiff/error.hpp"

namespace superdiff {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::OverlappingScatterers: return "OverlappingScatterers";
    case ErrorCode::EmptyConfig: return "EmptyConfig";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::FlightCapExceeded: return "FlightCapExceeded";
    case ErrorCode::TangentialGrazing: return "TangentialGrazing";
    case ErrorCode::InsufficientTail: return "InsufficientTail";
    case ErrorCode::DegenerateData: return "DegenerateData";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::LevelTooSmall: return "LevelTooSmall";
    case ErrorCode::RegimeViolation: return "RegimeViolation";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::CorruptCheckpoint: return "CorruptCheckpoint";
    case ErrorCode::LayoutMismatch: return "LayoutMismatch";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

bool is_validation_error(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::OverlappingScatterers:
    case ErrorCode::EmptyConfig:
    case ErrorCode::InvalidArgument:
    case ErrorCode::LevelTooSmall:
    case ErrorCode::RegimeViolation:
    case ErrorCode::VersionMismatch:
    case ErrorCode::CorruptCheckpoint:
    case ErrorCode::LayoutMismatch:
      return true;
    default:
      return false;
  }
}

}  // namespace superdiff
