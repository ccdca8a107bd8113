#include "reposevol/error.hpp"

namespace reposevol {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MalformedJson: return "MalformedJson";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::DegeneratePolygon: return "DegeneratePolygon";
    case ErrorCode::SelfIntersecting: return "SelfIntersecting";
    case ErrorCode::OutOfBounds: return "OutOfBounds";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::NonPositiveInput: return "NonPositiveInput";
    case ErrorCode::InvalidAngle: return "InvalidAngle";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::AngleOutOfRange: return "AngleOutOfRange";
    case ErrorCode::InvalidPerturbation: return "InvalidPerturbation";
    case ErrorCode::InsufficientPoints: return "InsufficientPoints";
    case ErrorCode::FactorTooLarge: return "FactorTooLarge";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::InputError: return "InputError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace reposevol
