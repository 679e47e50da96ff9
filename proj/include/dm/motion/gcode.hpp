// SPDX-License-Identifier: Apache-2.0
#pragma once
// G-code dialect: one statement per line, uppercase words, `;` comments.
//   G90 / G21            absolute mode, millimetres (program header)
//   G0 / G1 X Y Z F      rapid / linear move, F in mm/min
//   G4 P<ms>             dwell
//   M810 S1 / M810 S0    electromagnet on / off
//   M811 A<deg>          gripper servo angle
//   M3 S<power> / M5     laser on / off
//   ; STAGE <NAME>       marks the start of a job stage

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dm/board/config.hpp"
#include "dm/common/json.hpp"

namespace dm::motion {

enum class StageKind { GotoCell, SenseMarker, Correct, Grip, Lift, Traverse, Lower, Release, Cut };
std::string_view to_string(StageKind k);
std::optional<StageKind> stage_from_string(std::string_view s);

enum class ProgramKind { PickPlace, Cut };
std::string_view to_string(ProgramKind k);

struct GCodeProgram {
  ProgramKind kind = ProgramKind::PickPlace;
  std::vector<std::string> lines;
  Json metadata = Json::object();
  std::string text() const;  // lines joined with '\n', trailing newline
};

/// One parsed line. `command` is empty for blank and comment-only lines.
struct Statement {
  std::string command;              // e.g. "G1", "M810"
  std::map<char, double> params;    // parameter letter -> value
  std::optional<StageKind> stage;   // set by a "; STAGE" comment
  std::string comment;
};

/// Throws ParseFailed on malformed words, lowercase letters, repeated
/// parameters or an unknown stage name.
Statement parse_line(const std::string& line);

struct Violation {
  int line = 0;  // 1-based
  std::string code;
  std::string message;
  friend bool operator==(const Violation&, const Violation&) = default;
};
Json to_json(const Violation& v);

/// Static safety check; never throws. Codes: PARSE, UNKNOWN_WORD, MODE,
/// ENVELOPE, FEED_LIMIT, LASER_POWER, LASER_OUTSIDE_CUT, MAGNET_MISUSE,
/// TRAVERSE_BELOW_CLEARANCE, MAGNET_ON_AT_END, LASER_ON_AT_END.
std::vector<Violation> validate_program(const GCodeProgram& p, const board::MachineConfig& m);

/// Fixed-precision coordinate formatting used by the compiler.
std::string fmt(double v);

}  // namespace dm::motion
