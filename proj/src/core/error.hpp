#pragma once

#include <stdexcept>
#include <string>

namespace tg {

enum class ErrorCode {
  InvalidArgument,
  DegenerateData,
  FitFailure,
  InsufficientTrainingData,
  PadsNotFound,
  AmbiguousAxis,
  Geometry,
  Parse,
};

const char* error_code_name(ErrorCode code);

/// Library-wide exception type. Every failure carries a stable code plus a
/// human-readable message describing the offending input or stage.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace tg
