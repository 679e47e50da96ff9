// SPDX-License-Identifier: Apache-2.0
#include "dm/motion/gcode.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

namespace dm::motion {

namespace {

constexpr std::array<std::pair<StageKind, std::string_view>, 9> kStageNames{{
    {StageKind::GotoCell, "GOTO_CELL"},
    {StageKind::SenseMarker, "SENSE_MARKER"},
    {StageKind::Correct, "CORRECT"},
    {StageKind::Grip, "GRIP"},
    {StageKind::Lift, "LIFT"},
    {StageKind::Traverse, "TRAVERSE"},
    {StageKind::Lower, "LOWER"},
    {StageKind::Release, "RELEASE"},
    {StageKind::Cut, "CUT"},
}};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

// Allowed parameter letters per command.
const std::map<std::string, std::string>& command_table() {
  static const std::map<std::string, std::string> t{
      {"G0", "XYZF"}, {"G1", "XYZF"}, {"G4", "P"},    {"G21", ""}, {"G90", ""},
      {"M3", "S"},    {"M5", ""},     {"M810", "S"},  {"M811", "A"},
  };
  return t;
}

}  // namespace

std::string_view to_string(StageKind k) {
  for (const auto& [kind, name] : kStageNames) {
    if (kind == k) return name;
  }
  return "?";
}

std::optional<StageKind> stage_from_string(std::string_view s) {
  for (const auto& [kind, name] : kStageNames) {
    if (name == s) return kind;
  }
  return std::nullopt;
}

std::string_view to_string(ProgramKind k) { return k == ProgramKind::Cut ? "CUT" : "PICK_PLACE"; }

std::string GCodeProgram::text() const {
  std::string out;
  for (const auto& l : lines) {
    out += l;
    out += '\n';
  }
  return out;
}

std::string fmt(double v) {
  if (std::fabs(v) < 5e-4) v = 0.0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

Statement parse_line(const std::string& line) {
  Statement st;
  std::string body = line;
  if (const auto pos = line.find(';'); pos != std::string::npos) {
    st.comment = trim(std::string_view(line).substr(pos + 1));
    body = line.substr(0, pos);
    if (st.comment.rfind("STAGE", 0) == 0) {
      const std::string name = trim(std::string_view(st.comment).substr(5));
      st.stage = stage_from_string(name);
      if (!st.stage) throw Error(ErrorCode::ParseFailed, "unknown stage '" + name + "'");
    }
  }
  std::istringstream in(body);
  std::string word;
  while (in >> word) {
    const char letter = word[0];
    if (letter < 'A' || letter > 'Z') {
      throw Error(ErrorCode::ParseFailed, "word '" + word + "' must start with an uppercase letter");
    }
    double value = 0;
    const char* first = word.data() + 1;
    const char* last = word.data() + word.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (first == last || ec != std::errc() || ptr != last || !std::isfinite(value)) {
      throw Error(ErrorCode::ParseFailed, "malformed number in '" + word + "'");
    }
    if (st.command.empty()) {
      if (letter != 'G' && letter != 'M') {
        throw Error(ErrorCode::ParseFailed, "statement must start with a G or M word, got '" + word + "'");
      }
      if (value != std::floor(value) || value < 0) {
        throw Error(ErrorCode::ParseFailed, "non-integer command '" + word + "'");
      }
      st.command = std::string(1, letter) + std::to_string(static_cast<long>(value));
    } else {
      if (!st.params.emplace(letter, value).second) {
        throw Error(ErrorCode::ParseFailed, std::string("repeated parameter ") + letter);
      }
    }
  }
  return st;
}

Json to_json(const Violation& v) { return Json{{"line", v.line}, {"code", v.code}, {"message", v.message}}; }

std::vector<Violation> validate_program(const GCodeProgram& p, const board::MachineConfig& m) {
  std::vector<Violation> out;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  double z = nan;
  bool absolute = false;
  bool magnet = false;
  bool laser = false;
  std::optional<StageKind> stage;
  const auto add = [&](int line, std::string code, std::string msg) {
    out.push_back({line, std::move(code), std::move(msg)});
  };

  for (std::size_t i = 0; i < p.lines.size(); ++i) {
    const int ln = static_cast<int>(i) + 1;
    Statement st;
    try {
      st = parse_line(p.lines[i]);
    } catch (const Error& e) {
      add(ln, "PARSE", e.what());
      continue;
    }
    if (st.stage) stage = st.stage;
    if (st.command.empty()) continue;

    const auto it = command_table().find(st.command);
    if (it == command_table().end()) {
      add(ln, "UNKNOWN_WORD", "unsupported command " + st.command);
      continue;
    }
    bool bad_param = false;
    for (const auto& [letter, _] : st.params) {
      if (it->second.find(letter) == std::string::npos) {
        add(ln, "UNKNOWN_WORD", std::string("parameter ") + letter + " not allowed on " + st.command);
        bad_param = true;
      }
    }
    if (bad_param) continue;
    const auto param = [&](char c) -> std::optional<double> {
      const auto f = st.params.find(c);
      if (f == st.params.end()) return std::nullopt;
      return f->second;
    };
    const std::string& cmd = st.command;

    if (cmd == "G90") {
      absolute = true;
    } else if (cmd == "G0" || cmd == "G1") {
      if (!absolute) add(ln, "MODE", "motion before G90 absolute mode");
      const auto x = param('X'), y = param('Y'), nz = param('Z'), f = param('F');
      if (x && (*x < 0 || *x > board::kEnvelopeX)) add(ln, "ENVELOPE", "X" + fmt(*x) + " outside [0, 400]");
      if (y && (*y < 0 || *y > board::kEnvelopeY)) add(ln, "ENVELOPE", "Y" + fmt(*y) + " outside [0, 280]");
      if (nz && (*nz < 0 || *nz > m.z_max)) add(ln, "ENVELOPE", "Z" + fmt(*nz) + " outside [0, z_max]");
      if (f && (*f <= 0 || *f > m.max_feed)) add(ln, "FEED_LIMIT", "F" + fmt(*f) + " exceeds feed limit");
      if (nz) z = *nz;
      if (stage == StageKind::Traverse && (std::isnan(z) || z < m.travel_z - 1e-9)) {
        add(ln, "TRAVERSE_BELOW_CLEARANCE", "traverse motion below clearance height");
      }
    } else if (cmd == "G4") {
      const auto ms = param('P');
      if (ms && *ms < 0) add(ln, "PARSE", "negative dwell");
    } else if (cmd == "M3") {
      const double s = param('S').value_or(0);
      if (s < 0 || s > m.max_laser_power) add(ln, "LASER_POWER", "laser power S" + fmt(s) + " out of range");
      if (s > 0 && (p.kind != ProgramKind::Cut || stage != StageKind::Cut)) {
        add(ln, "LASER_OUTSIDE_CUT", "laser enabled outside a CUT stage");
      }
      laser = s > 0;
    } else if (cmd == "M5") {
      laser = false;
    } else if (cmd == "M810") {
      const auto s = param('S');
      if (!s || (*s != 0 && *s != 1)) {
        add(ln, "MAGNET_MISUSE", "M810 requires S0 or S1");
      } else if (*s == 1) {
        if (p.kind != ProgramKind::PickPlace || stage != StageKind::Grip) {
          add(ln, "MAGNET_MISUSE", "magnet enabled outside GRIP");
        }
        magnet = true;
      } else {
        if (p.kind != ProgramKind::PickPlace || stage != StageKind::Release) {
          add(ln, "MAGNET_MISUSE", "magnet disabled outside RELEASE");
        }
        magnet = false;
      }
    }
  }
  const int end = static_cast<int>(p.lines.size());
  if (magnet) add(end, "MAGNET_ON_AT_END", "magnet still on at program end");
  if (laser) add(end, "LASER_ON_AT_END", "laser still on at program end");
  return out;
}

}  // namespace dm::motion
