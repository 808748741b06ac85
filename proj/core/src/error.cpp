#include "bilat/error.hpp"

namespace bilat {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::NonSimpleSpectrum: return "NonSimpleSpectrum";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::DegenerateWindow: return "DegenerateWindow";
    case ErrorKind::StepTooLarge: return "StepTooLarge";
    case ErrorKind::EmptyInterval: return "EmptyInterval";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::DelayBoundViolation: return "DelayBoundViolation";
    case ErrorKind::InvalidParam: return "InvalidParam";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::UnsupportedForm: return "UnsupportedForm";
    case ErrorKind::NegativeArgument: return "NegativeArgument";
    case ErrorKind::RangeMismatch: return "RangeMismatch";
    case ErrorKind::HorizonUncovered: return "HorizonUncovered";
    case ErrorKind::AllBad: return "AllBad";
    case ErrorKind::DegenerateDirection: return "DegenerateDirection";
    case ErrorKind::UnknownPreset: return "UnknownPreset";
    case ErrorKind::ConfigParse: return "ConfigParse";
    case ErrorKind::SchemaMismatch: return "SchemaMismatch";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

}  // namespace bilat
