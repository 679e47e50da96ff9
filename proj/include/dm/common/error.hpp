// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dm {

// Wire names (to_string) are the stable identifiers used in JSON responses,
// logs and CLI diagnostics.
enum class ErrorCode {
  EmptyRaster,
  DegenerateContour,
  PipCountOutOfRange,
  BadPgm,
  OutOfBounds,
  InvalidConfig,
  TooManyTokens,
  InvalidPath,
  NotYourTurn,
  StalePath,
  BadDieValue,
  NoRating,
  NotReady,
  PhaseMismatch,
  OutOfEnvelope,
  WrongMarker,
  CorrectionTooLarge,
  AlreadyDamaged,
  GripFailed,
  DeviceFault,
  InterpreterFault,
  ParseFailed,
  SchemaError,
  CorruptLog,
  ScriptExhausted,
  ScriptMismatch,
  IoError,
  Internal,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace dm
