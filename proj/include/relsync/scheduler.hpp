#pragma once

#include <limits>
#include <optional>
#include <stdexcept>
#include <variant>

#include "relsync/types.hpp"

namespace relsync {

// Decentralized TDMA slot scheduler. All times are the owning agent's local
// clock seconds. A fresh agent listens until it hears any neighbor (anchoring
// its slot relative to that sender) or until the listen window expires (then
// it broadcasts immediately and seeds the cycle). Every reception re-anchors
// the next transmit time; every own broadcast pushes it one full frame ahead.

inline double tdma_adjust_delay(AgentId i, AgentId j, int num_parents, double slot_interval) {
  if (i == j) throw std::invalid_argument("tdma_adjust_delay: i == j");
  if (j < i) return (i - j) * slot_interval;
  return (i + num_parents - j) * slot_interval;
}

inline double tdma_initial_delay(AgentId i, std::optional<AgentId> heard_from, int num_parents,
                                 double slot_interval) {
  if (!heard_from) return num_parents * slot_interval;
  return tdma_adjust_delay(i, *heard_from, num_parents, slot_interval);
}

struct SchedulerConfig {
  AgentId my_id = 0;
  int num_parents = 0;
  double slot_interval = 0.0;
  double listen_window = 0.0;  // <= 0 means 2 * P * slot_interval
};

enum class SchedulerPhase { listening, joined };

struct SchedulerState {
  SchedulerConfig cfg;
  SchedulerPhase phase = SchedulerPhase::listening;
  double next_tx = std::numeric_limits<double>::infinity();
  double listen_deadline = std::numeric_limits<double>::infinity();
};

struct SchedOwnBroadcast {
  double local_time;
};
struct SchedReception {
  AgentId sender;
  double local_time;
};
struct SchedTimer {
  double local_time;
};
using SchedulerEvent = std::variant<SchedOwnBroadcast, SchedReception, SchedTimer>;

struct BroadcastCommand {
  double local_time;
};

inline SchedulerState make_scheduler(const SchedulerConfig& cfg, double local_now) {
  if (cfg.my_id < 1 || cfg.my_id > cfg.num_parents)
    throw std::invalid_argument("make_scheduler: my_id out of range");
  if (!(cfg.slot_interval > 0.0))
    throw std::invalid_argument("make_scheduler: slot_interval must be > 0");
  SchedulerState s;
  s.cfg = cfg;
  if (!(s.cfg.listen_window > 0.0))
    s.cfg.listen_window = 2.0 * cfg.num_parents * cfg.slot_interval;
  s.phase = SchedulerPhase::listening;
  s.listen_deadline = local_now + s.cfg.listen_window;
  return s;
}

// Local time at which the engine should next probe the scheduler with a timer.
inline double scheduler_wakeup(const SchedulerState& s) {
  return s.phase == SchedulerPhase::listening ? s.listen_deadline : s.next_tx;
}

inline std::optional<BroadcastCommand> scheduler_step(SchedulerState& s,
                                                      const SchedulerEvent& ev) {
  if (const auto* own = std::get_if<SchedOwnBroadcast>(&ev)) {
    s.phase = SchedulerPhase::joined;
    s.next_tx = own->local_time + s.cfg.num_parents * s.cfg.slot_interval;
    return std::nullopt;
  }
  if (const auto* rx = std::get_if<SchedReception>(&ev)) {
    const double delay =
        tdma_adjust_delay(s.cfg.my_id, rx->sender, s.cfg.num_parents, s.cfg.slot_interval);
    s.phase = SchedulerPhase::joined;
    s.next_tx = rx->local_time + delay;
    return std::nullopt;
  }
  const auto& timer = std::get<SchedTimer>(ev);
  if (s.phase == SchedulerPhase::listening) {
    if (timer.local_time >= s.listen_deadline) {
      // Heard nobody: seed the cycle right away.
      s.phase = SchedulerPhase::joined;
      s.next_tx = timer.local_time;
      return BroadcastCommand{timer.local_time};
    }
    return std::nullopt;
  }
  if (timer.local_time >= s.next_tx) return BroadcastCommand{timer.local_time};
  return std::nullopt;  // stale timer, superseded by a re-anchor
}

}  // namespace relsync
