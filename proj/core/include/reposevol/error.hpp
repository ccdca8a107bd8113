#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace reposevol {

enum class ErrorCode {
  MalformedJson,
  SchemaViolation,
  DegeneratePolygon,
  SelfIntersecting,
  OutOfBounds,
  IoError,
  UnsupportedFormat,
  NonPositiveInput,
  InvalidAngle,
  InvalidSpec,
  AngleOutOfRange,
  InvalidPerturbation,
  InsufficientPoints,
  FactorTooLarge,
  EmptyInput,
  ConfigError,
  InputError,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries one of the codes above so that
// callers (the CLI in particular) can map it onto an exit status or a per-pile
// status field without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace reposevol
