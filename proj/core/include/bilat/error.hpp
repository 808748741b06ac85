#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bilat {

/// Failure categories surfaced by the library. Each maps to a named error
/// condition of one of the modules.
enum class ErrorKind {
  NonSimpleSpectrum,
  NonFinite,
  DegenerateWindow,
  StepTooLarge,
  EmptyInterval,
  OutOfRange,
  DelayBoundViolation,
  InvalidParam,
  DimensionMismatch,
  UnsupportedForm,
  NegativeArgument,
  RangeMismatch,
  HorizonUncovered,
  AllBad,
  DegenerateDirection,
  UnknownPreset,
  ConfigParse,
  SchemaMismatch,
};

[[nodiscard]] std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace bilat
