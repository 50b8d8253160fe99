#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "relsync/io.hpp"
#include "relsync/types.hpp"

namespace relsync {

// One per agent per completed frame. Estimates live in the anchor frame
// (agent 1 at the origin, agent 2 on the positive x axis); truth columns are
// expressed in the same frame so rows compare directly.
struct AgentFrameRecord {
  long frame = 0;
  double t = 0.0;  // absolute simulation time of the frame close
  AgentId agent = 0;
  bool is_parent = true;
  bool valid = false;  // estimate columns are populated
  bool held = false;   // populated from an earlier frame (no fresh solve)
  double pos_x_est = 0.0, pos_y_est = 0.0;
  double offset_est = 0.0, skew_est = 0.0;  // relative to the reference agent
  double pos_x_true = 0.0, pos_y_true = 0.0;
  double offset_true = 0.0, skew_true = 0.0;
};

struct RangeRecord {
  long frame = 0;
  double t = 0.0;
  AgentId observer = 0;
  AgentId a = 0, b = 0;  // a is the observer, b the broadcaster
  double range_est = 0.0;
  double range_true = 0.0;
  double quality = 0.0;  // predicted error variance, m^2
  bool clamped = false;
};

enum class SimEventKind : int { power_on = 0, broadcast = 1, reception = 2, loss = 3 };

inline const char* to_string(SimEventKind k) {
  switch (k) {
    case SimEventKind::power_on: return "power_on";
    case SimEventKind::broadcast: return "broadcast";
    case SimEventKind::reception: return "reception";
    case SimEventKind::loss: return "loss";
  }
  return "?";
}

struct SimEventRecord {
  double t = 0.0;
  SimEventKind kind = SimEventKind::power_on;
  AgentId agent = 0;  // acting agent (receiver for reception/loss)
  AgentId peer = 0;   // broadcaster, 0 when not applicable
  long frame = 0;
};

struct RunLogMeta {
  std::string scenario_name;
  int num_parents = 0;
  int num_children = 0;
  double slot_interval = 0.0;
  double duration = 0.0;
  double warmup = 0.0;
  std::uint64_t seed = 0;
  long frames_completed = 0;
  double frequency_hz = 0.0;
};

struct RunLog {
  RunLogMeta meta;
  std::vector<AgentFrameRecord> records;
  std::vector<RangeRecord> ranges;
  std::vector<SimEventRecord> events;
};

inline std::string runlog_csv(const RunLog& log) {
  std::string out = "frame,t,agent,is_parent,valid,held,pos_x,pos_y,offset,skew\n";
  for (const AgentFrameRecord& r : log.records) {
    out += std::to_string(r.frame);
    out += ',';
    out += format_double(r.t);
    out += ',';
    out += std::to_string(r.agent);
    out += ',';
    out += r.is_parent ? '1' : '0';
    out += ',';
    out += r.valid ? '1' : '0';
    out += ',';
    out += r.held ? '1' : '0';
    out += ',';
    out += format_double(r.pos_x_est);
    out += ',';
    out += format_double(r.pos_y_est);
    out += ',';
    out += format_double(r.offset_est);
    out += ',';
    out += format_double(r.skew_est);
    out += '\n';
  }
  return out;
}

// Same row keys as runlog_csv so the two files join line by line.
inline std::string truth_csv(const RunLog& log) {
  std::string out = "frame,t,agent,is_parent,pos_x,pos_y,offset,skew\n";
  for (const AgentFrameRecord& r : log.records) {
    out += std::to_string(r.frame);
    out += ',';
    out += format_double(r.t);
    out += ',';
    out += std::to_string(r.agent);
    out += ',';
    out += r.is_parent ? '1' : '0';
    out += ',';
    out += format_double(r.pos_x_true);
    out += ',';
    out += format_double(r.pos_y_true);
    out += ',';
    out += format_double(r.offset_true);
    out += ',';
    out += format_double(r.skew_true);
    out += '\n';
  }
  return out;
}

inline std::string ranges_csv(const RunLog& log) {
  std::string out = "frame,t,observer,a,b,range_est,range_true,quality,clamped\n";
  for (const RangeRecord& r : log.ranges) {
    out += std::to_string(r.frame);
    out += ',';
    out += format_double(r.t);
    out += ',';
    out += std::to_string(r.observer);
    out += ',';
    out += std::to_string(r.a);
    out += ',';
    out += std::to_string(r.b);
    out += ',';
    out += format_double(r.range_est);
    out += ',';
    out += format_double(r.range_true);
    out += ',';
    out += format_double(r.quality);
    out += ',';
    out += r.clamped ? '1' : '0';
    out += '\n';
  }
  return out;
}

inline std::string events_csv(const RunLog& log) {
  std::string out = "t,kind,agent,peer,frame\n";
  for (const SimEventRecord& e : log.events) {
    out += format_double(e.t);
    out += ',';
    out += to_string(e.kind);
    out += ',';
    out += std::to_string(e.agent);
    out += ',';
    out += std::to_string(e.peer);
    out += ',';
    out += std::to_string(e.frame);
    out += '\n';
  }
  return out;
}

inline std::string meta_csv(const RunLogMeta& m) {
  std::string out = "key,value\n";
  out += "scenario," + m.scenario_name + '\n';
  out += "num_parents," + std::to_string(m.num_parents) + '\n';
  out += "num_children," + std::to_string(m.num_children) + '\n';
  out += "slot_interval," + format_double(m.slot_interval) + '\n';
  out += "duration," + format_double(m.duration) + '\n';
  out += "warmup," + format_double(m.warmup) + '\n';
  out += "seed," + std::to_string(m.seed) + '\n';
  out += "frames_completed," + std::to_string(m.frames_completed) + '\n';
  out += "frequency_hz," + format_double(m.frequency_hz) + '\n';
  return out;
}

// Canonical byte image of a run, used for determinism checks.
inline std::string serialize_runlog(const RunLog& log) {
  return meta_csv(log.meta) + runlog_csv(log) + truth_csv(log) + ranges_csv(log) +
         events_csv(log);
}

inline std::uint64_t runlog_hash(const RunLog& log) { return fnv1a64(serialize_runlog(log)); }

}  // namespace relsync
