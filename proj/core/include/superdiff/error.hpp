#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace superdiff {

/// Classifies every failure the library can report. The command-line tool
/// maps these onto exit codes, so validation problems stay distinguishable
/// from runtime failures.
enum class ErrorCode {
  OverlappingScatterers,
  EmptyConfig,
  InvalidArgument,
  FlightCapExceeded,
  TangentialGrazing,
  InsufficientTail,
  DegenerateData,
  InsufficientData,
  LevelTooSmall,
  RegimeViolation,
  VersionMismatch,
  CorruptCheckpoint,
  LayoutMismatch,
  Io,
};

const char* to_string(ErrorCode code) noexcept;

/// True for errors caused by bad user input (configs, flags, files).
bool is_validation_error(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// A collision-map failure raised while iterating a trajectory; carries the
/// step at which it happened.
class StepError : public Error {
 public:
  StepError(const Error& cause, std::uint64_t step)
      : Error(cause.code(), std::string("at step ") + std::to_string(step) + " (" + cause.what() + ")"),
        step_(step) {}

  std::uint64_t step() const noexcept { return step_; }

 private:
  std::uint64_t step_;
};

}  // namespace superdiff
