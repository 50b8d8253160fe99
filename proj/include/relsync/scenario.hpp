#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "relsync/channel.hpp"
#include "relsync/clock.hpp"
#include "relsync/pseudo_clock_filter.hpp"
#include "relsync/trajectory.hpp"
#include "relsync/types.hpp"

namespace relsync {

struct AgentConfig {
  TrajectorySpec trajectory = TrajectorySpec::fixed_point({0.0, 0.0});
  std::optional<double> initial_offset;    // seconds; unset draws from the scenario range
  std::optional<double> initial_skew_ppm;  // parts per million
  std::optional<double> power_on;          // absolute seconds; unset staggers by id
};

struct ClockSetup {
  ClockNoiseSpec noise{4.7e-20, 7.5e-20};
  double initial_offset_lo = -5e-7;
  double initial_offset_hi = 5e-7;
  double initial_skew_ppm_lo = -5.0;
  double initial_skew_ppm_hi = 5.0;
};

struct ProtocolConfig {
  double listen_window = 0.0;  // <= 0 means twice a full cycle
  double cov_threshold = kDefaultCovThreshold;
};

// Offset jump injected into one agent's hardware clock at a fixed time.
struct ClockStepFault {
  AgentId agent = 0;
  double t = 0.0;
  double delta = 0.0;  // seconds added to the offset
};

// Extra propagation delay on one directed link (obstructed-path hook).
struct LinkBias {
  AgentId from = 0;
  AgentId to = 0;
  double delay = 0.0;  // seconds
};

struct Scenario {
  std::string name = "unnamed";
  int num_parents = 0;
  int num_children = 0;
  double slot_interval = 0.0;
  double duration = 0.0;
  std::uint64_t seed = 1;
  double warmup = 5.0;
  ClockSetup clock;
  RadioSpec radio;
  ProtocolConfig protocol;
  AgentId reference = 1;
  bool jlas_use_skew_term = true;
  std::optional<ClockStepFault> clock_step;
  std::vector<LinkBias> link_bias;
  std::vector<AgentConfig> agents;  // index id-1, parents first

  int total_agents() const { return num_parents + num_children; }
  bool is_parent(AgentId id) const { return id >= 1 && id <= num_parents; }
};

inline void validate_scenario(const Scenario& sc) {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("scenario: " + msg); };
  if (sc.num_parents < 3) fail("at least 3 parents required");
  if (sc.num_children < 0) fail("negative child count");
  if (sc.num_children > 0 && sc.num_parents < 4)
    fail("children require at least 4 parents");
  if (sc.total_agents() > 254) fail("too many agents for the packet id space");
  if (!(sc.slot_interval > 0.0)) fail("slot_interval must be positive");
  if (sc.duration < 0.0) fail("duration must be nonnegative");
  if (sc.warmup < 0.0) fail("warmup must be nonnegative");
  if (sc.clock.noise.s_nT < 0.0 || sc.clock.noise.s_nW < 0.0) fail("negative noise spectrum");
  if (sc.clock.initial_offset_hi < sc.clock.initial_offset_lo) fail("bad initial offset range");
  if (sc.clock.initial_skew_ppm_hi < sc.clock.initial_skew_ppm_lo) fail("bad initial skew range");
  if (sc.radio.xi < 0.0) fail("negative stamping noise");
  if (sc.radio.loss_prob < 0.0 || sc.radio.loss_prob >= 1.0) fail("loss_prob outside [0,1)");
  if (!(sc.radio.airtime >= 0.0)) fail("negative airtime");
  if (sc.radio.antenna_delay_tx < 0.0 || sc.radio.antenna_delay_rx < 0.0)
    fail("negative antenna delay");
  if (sc.protocol.cov_threshold <= 0.0) fail("cov_threshold must be positive");
  if (sc.reference < 1 || sc.reference > sc.num_parents) fail("reference must be a parent id");
  if (static_cast<int>(sc.agents.size()) != sc.total_agents())
    fail("agent list size does not match num_parents + num_children");
  for (int i = 0; i < sc.total_agents(); ++i) {
    const AgentConfig& a = sc.agents[static_cast<size_t>(i)];
    if (a.power_on && *a.power_on < 0.0)
      fail("agent " + std::to_string(i + 1) + " power_on must be nonnegative");
  }
  if (sc.clock_step) {
    if (sc.clock_step->agent < 1 || sc.clock_step->agent > sc.total_agents())
      fail("clock_step agent out of range");
    if (sc.clock_step->t <= 0.0) fail("clock_step time must be positive");
  }
  for (const LinkBias& lb : sc.link_bias) {
    if (lb.from < 1 || lb.from > sc.total_agents() || lb.to < 1 || lb.to > sc.total_agents() ||
        lb.from == lb.to)
      fail("link_bias ids out of range");
    if (lb.delay < 0.0) fail("link_bias delay must be nonnegative");
  }
}

}  // namespace relsync
