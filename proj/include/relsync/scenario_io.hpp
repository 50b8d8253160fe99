#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "relsync/io.hpp"
#include "relsync/scenario.hpp"
#include "relsync/trajectory.hpp"

namespace relsync {

class ScenarioParseError : public std::runtime_error {
 public:
  ScenarioParseError(int line, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

namespace detail {

struct IniEntry {
  int line = 0;
  std::string value;
  bool used = false;
};

struct IniSection {
  int line = 0;
  std::map<std::string, IniEntry> entries;
};

inline std::string trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

inline std::map<std::string, IniSection> parse_ini(const std::string& text) {
  std::map<std::string, IniSection> sections;
  std::string current;
  int line_no = 0;
  size_t start = 0;
  while (start <= text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) {
      if (start > text.size()) break;
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']') throw ScenarioParseError(line_no, "unterminated section header");
      current = trim(line.substr(1, line.size() - 2));
      if (current.empty()) throw ScenarioParseError(line_no, "empty section name");
      if (sections.count(current))
        throw ScenarioParseError(line_no, "duplicate section [" + current + "]");
      sections[current].line = line_no;
    } else {
      const size_t eq = line.find('=');
      if (eq == std::string::npos)
        throw ScenarioParseError(line_no, "expected 'key = value' or a [section]");
      if (current.empty()) throw ScenarioParseError(line_no, "key before any section");
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty()) throw ScenarioParseError(line_no, "empty key");
      if (value.empty()) throw ScenarioParseError(line_no, "empty value for '" + key + "'");
      auto& sec = sections[current];
      if (sec.entries.count(key))
        throw ScenarioParseError(line_no, "duplicate key '" + key + "'");
      sec.entries[key] = IniEntry{line_no, value, false};
    }
    if (start > text.size()) break;
  }
  return sections;
}

inline double parse_num(const IniEntry& e) {
  size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(e.value, &pos);
  } catch (const std::exception&) {
    throw ScenarioParseError(e.line, "not a number: '" + e.value + "'");
  }
  if (trim(e.value.substr(pos)).size() != 0)
    throw ScenarioParseError(e.line, "trailing junk after number: '" + e.value + "'");
  return v;
}

inline long parse_int(const IniEntry& e) {
  const double v = parse_num(e);
  const long n = static_cast<long>(v);
  if (static_cast<double>(n) != v) throw ScenarioParseError(e.line, "expected an integer");
  return n;
}

inline bool parse_bool(const IniEntry& e) {
  if (e.value == "true" || e.value == "1") return true;
  if (e.value == "false" || e.value == "0") return false;
  throw ScenarioParseError(e.line, "expected true/false: '" + e.value + "'");
}

// name(arg, arg, ...) with numeric args
struct Call {
  std::string name;
  std::vector<double> args;
};

inline Call parse_call(const IniEntry& e) {
  const std::string& s = e.value;
  const size_t open = s.find('(');
  if (open == std::string::npos || s.back() != ')')
    throw ScenarioParseError(e.line, "expected name(...): '" + s + "'");
  Call c;
  c.name = trim(s.substr(0, open));
  std::string body = s.substr(open + 1, s.size() - open - 2);
  size_t start = 0;
  if (!trim(body).empty()) {
    while (true) {
      size_t comma = body.find(',', start);
      std::string tok = trim(comma == std::string::npos ? body.substr(start)
                                                        : body.substr(start, comma - start));
      size_t pos = 0;
      double v = 0.0;
      try {
        v = std::stod(tok, &pos);
      } catch (const std::exception&) {
        throw ScenarioParseError(e.line, "bad argument '" + tok + "' in " + c.name + "(...)");
      }
      if (pos != tok.size())
        throw ScenarioParseError(e.line, "bad argument '" + tok + "' in " + c.name + "(...)");
      c.args.push_back(v);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  }
  return c;
}

inline TrajectorySpec parse_trajectory(const IniEntry& e) {
  const Call c = parse_call(e);
  auto want = [&](size_t n) {
    if (c.args.size() != n)
      throw ScenarioParseError(e.line, c.name + " takes " + std::to_string(n) + " arguments");
  };
  if (c.name == "static") {
    want(2);
    return TrajectorySpec::fixed_point({c.args[0], c.args[1]});
  }
  if (c.name == "linear") {
    want(4);
    return TrajectorySpec::linear_path({c.args[0], c.args[1]}, {c.args[2], c.args[3]});
  }
  if (c.name == "circular") {
    want(5);
    return TrajectorySpec::circle({c.args[0], c.args[1]}, c.args[2], c.args[3], c.args[4]);
  }
  if (c.name == "waypoints") {
    if (c.args.size() < 5 || (c.args.size() - 1) % 2 != 0)
      throw ScenarioParseError(e.line, "waypoints takes a speed then at least two x,y pairs");
    std::vector<Vec2> pts;
    for (size_t i = 1; i + 1 < c.args.size(); i += 2) pts.push_back({c.args[i], c.args[i + 1]});
    try {
      return TrajectorySpec::waypoint_path(std::move(pts), c.args[0]);
    } catch (const std::invalid_argument& ex) {
      throw ScenarioParseError(e.line, ex.what());
    }
  }
  throw ScenarioParseError(e.line,
                           "unknown trajectory '" + c.name +
                               "' (want static/linear/circular/waypoints)");
}

// either a plain number (fixed) or uniform(lo, hi)
inline std::pair<double, double> parse_range(const IniEntry& e) {
  if (e.value.find('(') == std::string::npos) {
    const double v = parse_num(e);
    return {v, v};
  }
  const Call c = parse_call(e);
  if (c.name != "uniform" || c.args.size() != 2)
    throw ScenarioParseError(e.line, "expected a number or uniform(lo, hi)");
  return {c.args[0], c.args[1]};
}

}  // namespace detail

inline Scenario parse_scenario(const std::string& text) {
  using detail::IniEntry;
  auto sections = detail::parse_ini(text);

  auto take = [&](const std::string& sec, const std::string& key) -> IniEntry* {
    auto sit = sections.find(sec);
    if (sit == sections.end()) return nullptr;
    auto eit = sit->second.entries.find(key);
    if (eit == sit->second.entries.end()) return nullptr;
    eit->second.used = true;
    return &eit->second;
  };

  Scenario sc;
  auto sit = sections.find("scenario");
  if (sit == sections.end()) throw ScenarioParseError(1, "missing [scenario] section");
  if (IniEntry* e = take("scenario", "name")) sc.name = e->value;
  if (IniEntry* e = take("scenario", "num_parents"))
    sc.num_parents = static_cast<int>(detail::parse_int(*e));
  if (IniEntry* e = take("scenario", "num_children"))
    sc.num_children = static_cast<int>(detail::parse_int(*e));
  if (IniEntry* e = take("scenario", "slot_interval")) sc.slot_interval = detail::parse_num(*e);
  if (IniEntry* e = take("scenario", "duration")) sc.duration = detail::parse_num(*e);
  if (IniEntry* e = take("scenario", "seed")) {
    const long v = detail::parse_int(*e);
    if (v < 0) throw ScenarioParseError(e->line, "seed must be nonnegative");
    sc.seed = static_cast<std::uint64_t>(v);
  }
  if (IniEntry* e = take("scenario", "warmup")) sc.warmup = detail::parse_num(*e);
  if (IniEntry* e = take("scenario", "reference"))
    sc.reference = static_cast<int>(detail::parse_int(*e));
  if (IniEntry* e = take("scenario", "jlas_use_skew_term"))
    sc.jlas_use_skew_term = detail::parse_bool(*e);

  if (IniEntry* e = take("clock", "s_nT")) sc.clock.noise.s_nT = detail::parse_num(*e);
  if (IniEntry* e = take("clock", "s_nW")) sc.clock.noise.s_nW = detail::parse_num(*e);
  if (IniEntry* e = take("clock", "initial_offset")) {
    auto [lo, hi] = detail::parse_range(*e);
    sc.clock.initial_offset_lo = lo;
    sc.clock.initial_offset_hi = hi;
  }
  if (IniEntry* e = take("clock", "initial_skew_ppm")) {
    auto [lo, hi] = detail::parse_range(*e);
    sc.clock.initial_skew_ppm_lo = lo;
    sc.clock.initial_skew_ppm_hi = hi;
  }

  if (IniEntry* e = take("radio", "xi")) sc.radio.xi = detail::parse_num(*e);
  if (IniEntry* e = take("radio", "loss_prob")) sc.radio.loss_prob = detail::parse_num(*e);
  if (IniEntry* e = take("radio", "airtime")) sc.radio.airtime = detail::parse_num(*e);
  if (IniEntry* e = take("radio", "antenna_delay_tx"))
    sc.radio.antenna_delay_tx = detail::parse_num(*e);
  if (IniEntry* e = take("radio", "antenna_delay_rx"))
    sc.radio.antenna_delay_rx = detail::parse_num(*e);

  if (IniEntry* e = take("protocol", "listen_window"))
    sc.protocol.listen_window = detail::parse_num(*e);
  if (IniEntry* e = take("protocol", "cov_threshold"))
    sc.protocol.cov_threshold = detail::parse_num(*e);

  const bool has_step = sections.count("fault") != 0;
  if (has_step) {
    IniEntry* ag = take("fault", "clock_step_agent");
    IniEntry* at = take("fault", "clock_step_t");
    IniEntry* ad = take("fault", "clock_step_delta");
    if (!ag || !at || !ad)
      throw ScenarioParseError(sections["fault"].line,
                               "[fault] needs clock_step_agent, clock_step_t, clock_step_delta");
    ClockStepFault f;
    f.agent = static_cast<int>(detail::parse_int(*ag));
    f.t = detail::parse_num(*at);
    f.delta = detail::parse_num(*ad);
    sc.clock_step = f;
  }

  sc.agents.resize(static_cast<size_t>(std::max(sc.total_agents(), 0)));
  for (auto& [name, sec] : sections) {
    if (name.rfind("agent ", 0) != 0) continue;
    IniEntry fake{sec.line, name.substr(6), false};
    const long id = detail::parse_int(fake);
    if (id < 1 || id > sc.total_agents())
      throw ScenarioParseError(sec.line, "agent id " + std::to_string(id) + " out of range");
    AgentConfig& cfg = sc.agents[static_cast<size_t>(id - 1)];
    if (IniEntry* e = take(name, "trajectory")) cfg.trajectory = detail::parse_trajectory(*e);
    if (IniEntry* e = take(name, "initial_offset")) cfg.initial_offset = detail::parse_num(*e);
    if (IniEntry* e = take(name, "initial_skew_ppm"))
      cfg.initial_skew_ppm = detail::parse_num(*e);
    if (IniEntry* e = take(name, "power_on")) cfg.power_on = detail::parse_num(*e);
  }

  static const char* known[] = {"scenario", "clock", "radio", "protocol", "fault"};
  for (const auto& [name, sec] : sections) {
    bool ok = name.rfind("agent ", 0) == 0;
    for (const char* k : known) ok = ok || name == k;
    if (!ok) throw ScenarioParseError(sec.line, "unknown section [" + name + "]");
    for (const auto& [key, entry] : sec.entries)
      if (!entry.used)
        throw ScenarioParseError(entry.line, "unknown key '" + key + "' in [" + name + "]");
  }

  try {
    validate_scenario(sc);
  } catch (const std::invalid_argument& ex) {
    throw ScenarioParseError(sit->second.line, ex.what());
  }
  return sc;
}

namespace detail {

inline std::string trajectory_text(const TrajectorySpec& t) {
  switch (t.kind) {
    case TrajectoryKind::fixed:
      return "static(" + format_double(t.start.x()) + ", " + format_double(t.start.y()) + ")";
    case TrajectoryKind::linear:
      return "linear(" + format_double(t.start.x()) + ", " + format_double(t.start.y()) + ", " +
             format_double(t.velocity.x()) + ", " + format_double(t.velocity.y()) + ")";
    case TrajectoryKind::circular:
      return "circular(" + format_double(t.center.x()) + ", " + format_double(t.center.y()) +
             ", " + format_double(t.radius) + ", " + format_double(t.rate) + ", " +
             format_double(t.phase) + ")";
    case TrajectoryKind::waypoints: {
      std::string out = "waypoints(" + format_double(t.speed);
      for (const Vec2& p : t.points)
        out += ", " + format_double(p.x()) + ", " + format_double(p.y());
      return out + ")";
    }
  }
  return "static(0, 0)";
}

}  // namespace detail

inline std::string scenario_text(const Scenario& sc) {
  std::string out;
  out += "# broadcast sync/localization scenario\n";
  out += "[scenario]\n";
  out += "name = " + sc.name + "\n";
  out += "num_parents = " + std::to_string(sc.num_parents) + "\n";
  out += "num_children = " + std::to_string(sc.num_children) + "\n";
  out += "slot_interval = " + format_double(sc.slot_interval) + "   # seconds per TDMA slot\n";
  out += "duration = " + format_double(sc.duration) + "\n";
  out += "seed = " + std::to_string(sc.seed) + "\n";
  out += "warmup = " + format_double(sc.warmup) + "   # seconds dropped from metrics\n";
  out += "reference = " + std::to_string(sc.reference) + "\n";
  out += std::string("jlas_use_skew_term = ") + (sc.jlas_use_skew_term ? "true" : "false") +
         "\n\n";
  out += "[clock]\n";
  out += "s_nT = " + format_double(sc.clock.noise.s_nT) + "   # offset noise spectrum\n";
  out += "s_nW = " + format_double(sc.clock.noise.s_nW) + "   # skew noise spectrum\n";
  out += "initial_offset = uniform(" + format_double(sc.clock.initial_offset_lo) + ", " +
         format_double(sc.clock.initial_offset_hi) + ")   # seconds\n";
  out += "initial_skew_ppm = uniform(" + format_double(sc.clock.initial_skew_ppm_lo) + ", " +
         format_double(sc.clock.initial_skew_ppm_hi) + ")\n\n";
  out += "[radio]\n";
  out += "xi = " + format_double(sc.radio.xi) + "   # TOA stamping noise std, seconds\n";
  out += "loss_prob = " + format_double(sc.radio.loss_prob) + "\n";
  out += "airtime = " + format_double(sc.radio.airtime) + "\n";
  out += "antenna_delay_tx = " + format_double(sc.radio.antenna_delay_tx) + "\n";
  out += "antenna_delay_rx = " + format_double(sc.radio.antenna_delay_rx) + "\n\n";
  out += "[protocol]\n";
  out += "listen_window = " + format_double(sc.protocol.listen_window) +
         "   # 0 means two full cycles\n";
  out += "cov_threshold = " + format_double(sc.protocol.cov_threshold) + "\n";
  if (sc.clock_step) {
    out += "\n[fault]\n";
    out += "clock_step_agent = " + std::to_string(sc.clock_step->agent) + "\n";
    out += "clock_step_t = " + format_double(sc.clock_step->t) + "\n";
    out += "clock_step_delta = " + format_double(sc.clock_step->delta) + "\n";
  }
  for (int i = 0; i < sc.total_agents(); ++i) {
    const AgentConfig& a = sc.agents[static_cast<size_t>(i)];
    out += "\n[agent " + std::to_string(i + 1) + "]";
    out += i < sc.num_parents ? "   # parent\n" : "   # child\n";
    out += "trajectory = " + detail::trajectory_text(a.trajectory) + "\n";
    if (a.initial_offset) out += "initial_offset = " + format_double(*a.initial_offset) + "\n";
    if (a.initial_skew_ppm)
      out += "initial_skew_ppm = " + format_double(*a.initial_skew_ppm) + "\n";
    if (a.power_on) out += "power_on = " + format_double(*a.power_on) + "\n";
  }
  return out;
}

// Bundled scenario close to the published simulation settings: five mobile
// parents and three children at 200 Hz.
inline Scenario table1_scenario() {
  Scenario sc;
  sc.name = "table1";
  sc.num_parents = 5;
  sc.num_children = 3;
  sc.slot_interval = 0.001;
  sc.duration = 60.0;
  sc.seed = 1;
  sc.warmup = 5.0;
  sc.clock.noise = ClockNoiseSpec{4.7e-20, 7.5e-20};
  sc.clock.initial_offset_lo = -5e-7;
  sc.clock.initial_offset_hi = 5e-7;
  sc.clock.initial_skew_ppm_lo = -5.0;
  sc.clock.initial_skew_ppm_hi = 5.0;
  sc.radio.xi = 1.5e-10;
  sc.agents.resize(8);
  sc.agents[0].trajectory = TrajectorySpec::fixed_point({0.0, 0.0});
  sc.agents[1].trajectory = TrajectorySpec::circle({45.0, 15.0}, 5.0, 0.2, 0.0);
  sc.agents[2].trajectory = TrajectorySpec::circle({35.0, 56.4}, 5.0, 0.2, 0.0);
  sc.agents[3].trajectory = TrajectorySpec::linear_path({40.0, 0.0}, {0.1, 0.0});
  sc.agents[4].trajectory = TrajectorySpec::circle({17.0, 42.5}, 4.0, 0.25, 3.141592653589793);
  sc.agents[5].trajectory = TrajectorySpec::circle({28.8, 25.0}, 4.0, 0.25, 0.0);
  sc.agents[6].trajectory =
      TrajectorySpec::circle({21.0, 27.0}, 6.0, 1.0 / 6.0, 3.141592653589793);
  sc.agents[7].trajectory = TrajectorySpec::waypoint_path(
      {{33.0, 15.0}, {23.0, 28.0}, {32.0, 34.0}, {37.0, 19.0}, {33.0, 15.0}}, 1.0);
  return sc;
}

// Square parent cell with two children on a small shared circle, mirroring
// the rotating-platform experiment geometry.
inline Scenario turntable_scenario() {
  Scenario sc;
  sc.name = "turntable";
  sc.num_parents = 4;
  sc.num_children = 2;
  sc.slot_interval = 0.001;
  sc.duration = 60.0;
  sc.seed = 1;
  sc.warmup = 5.0;
  sc.clock.noise = ClockNoiseSpec{4.7e-20, 7.5e-20};
  sc.radio.xi = 1.5e-10;
  sc.agents.resize(6);
  sc.agents[0].trajectory = TrajectorySpec::fixed_point({0.0, 0.0});
  sc.agents[1].trajectory = TrajectorySpec::fixed_point({5.0, 0.0});
  sc.agents[2].trajectory = TrajectorySpec::fixed_point({5.0, 7.0});
  sc.agents[3].trajectory = TrajectorySpec::fixed_point({0.0, 7.0});
  sc.agents[4].trajectory = TrajectorySpec::circle({2.5, 3.5}, 0.8665, 0.14, 0.0);
  sc.agents[5].trajectory =
      TrajectorySpec::circle({2.5, 3.5}, 0.8665, 0.14, 3.141592653589793);
  return sc;
}

inline std::optional<Scenario> scenario_template(const std::string& name) {
  if (name == "table1") return table1_scenario();
  if (name == "turntable") return turntable_scenario();
  return std::nullopt;
}

inline std::vector<std::string> scenario_template_names() { return {"table1", "turntable"}; }

}  // namespace relsync
