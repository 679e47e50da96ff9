// SPDX-License-Identifier: Apache-2.0
#include "dm/common/error.hpp"

namespace dm {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyRaster: return "EMPTY_RASTER";
    case ErrorCode::DegenerateContour: return "DEGENERATE_CONTOUR";
    case ErrorCode::PipCountOutOfRange: return "PIP_COUNT_OUT_OF_RANGE";
    case ErrorCode::BadPgm: return "BAD_PGM";
    case ErrorCode::OutOfBounds: return "OUT_OF_BOUNDS";
    case ErrorCode::InvalidConfig: return "INVALID_CONFIG";
    case ErrorCode::TooManyTokens: return "TOO_MANY_TOKENS";
    case ErrorCode::InvalidPath: return "INVALID_PATH";
    case ErrorCode::NotYourTurn: return "NOT_YOUR_TURN";
    case ErrorCode::StalePath: return "STALE_PATH";
    case ErrorCode::BadDieValue: return "BAD_DIE_VALUE";
    case ErrorCode::NoRating: return "NO_RATING";
    case ErrorCode::NotReady: return "NOT_READY";
    case ErrorCode::PhaseMismatch: return "PHASE_MISMATCH";
    case ErrorCode::OutOfEnvelope: return "OUT_OF_ENVELOPE";
    case ErrorCode::WrongMarker: return "WRONG_MARKER";
    case ErrorCode::CorrectionTooLarge: return "CORRECTION_TOO_LARGE";
    case ErrorCode::AlreadyDamaged: return "ALREADY_DAMAGED";
    case ErrorCode::GripFailed: return "GRIP_FAILED";
    case ErrorCode::DeviceFault: return "DEVICE_FAULT";
    case ErrorCode::InterpreterFault: return "INTERPRETER_FAULT";
    case ErrorCode::ParseFailed: return "PARSE_FAILED";
    case ErrorCode::SchemaError: return "SCHEMA_ERROR";
    case ErrorCode::CorruptLog: return "CORRUPT_LOG";
    case ErrorCode::ScriptExhausted: return "SCRIPT_EXHAUSTED";
    case ErrorCode::ScriptMismatch: return "SCRIPT_MISMATCH";
    case ErrorCode::IoError: return "IO_ERROR";
    case ErrorCode::Internal: return "INTERNAL";
  }
  return "INTERNAL";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace dm
