#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>

#include "relsync/clock.hpp"
#include "relsync/random.hpp"
#include "relsync/trajectory.hpp"
#include "relsync/types.hpp"

namespace relsync {

struct RadioSpec {
  double xi = 0.0;                 // TOA stamping noise std, seconds
  double loss_prob = 0.0;          // i.i.d. drop probability per directed link
  double airtime = 0.0003;         // seconds a broadcast occupies the medium
  double antenna_delay_tx = 0.0;   // seconds
  double antenna_delay_rx = 0.0;   // seconds
};

struct ToaObservation {
  AgentId sender = 0;
  AgentId receiver = 0;
  double toa = 0.0;           // rx stamp minus tx stamp, seconds
  double tx_timestamp = 0.0;  // sender local clock at transmit
  double rx_timestamp = 0.0;  // receiver local clock at arrival
  double t_tx = 0.0;          // true absolute transmit time
  double t_rx = 0.0;          // true absolute arrival time
};

// True arrival instant of a broadcast sent at t_tx: transmit antenna delay,
// flight time, receive antenna delay. The receiver position is evaluated at
// the arrival instant itself, so the flight time is solved by fixed point
// (converges at ratio v/c per iteration).
inline double arrival_time(const TrajectorySpec& tx, const TrajectorySpec& rx, double t_tx,
                           const RadioSpec& spec) {
  const Vec2 p_tx = position_at(tx, t_tx);
  double t_rx = t_tx + spec.antenna_delay_tx + spec.antenna_delay_rx;
  for (int k = 0; k < 3; ++k) {
    const double d = (position_at(rx, t_rx) - p_tx).norm();
    t_rx = t_tx + spec.antenna_delay_tx + d / kSpeedOfLight + spec.antenna_delay_rx;
  }
  return t_rx;
}

// Worst-case TOA model error from ignoring skew accumulation over the flight.
inline double toa_error_budget(double skew, double distance_m) {
  return std::abs(skew) * distance_m / kSpeedOfLight;
}

// Reference composition of one broadcast leg: loss draw, true flight
// geometry, both clock stamps, stamping noise. Clock states are given at t_tx
// and the receiver's is extrapolated noiselessly over the sub-microsecond
// flight. Returns nullopt when the packet is lost (one loss draw consumed; no
// stamping draw in that case).
inline std::optional<ToaObservation> propagate(AgentId tx_id, const TrajectorySpec& tx_traj,
                                               const ClockState& tx_clock, AgentId rx_id,
                                               const TrajectorySpec& rx_traj,
                                               const ClockState& rx_clock, double t_tx,
                                               const RadioSpec& spec, RandomStream& loss_rng,
                                               RandomStream& stamp_rng) {
  if (tx_id == rx_id) throw std::invalid_argument("propagate: sender == receiver");
  // One loss draw per transmission on the link, delivered or not.
  if (loss_rng.uniform01() < spec.loss_prob) return std::nullopt;
  ToaObservation obs;
  obs.sender = tx_id;
  obs.receiver = rx_id;
  obs.t_tx = t_tx;
  obs.t_rx = arrival_time(tx_traj, rx_traj, t_tx, spec);
  obs.tx_timestamp = read_clock(tx_clock, t_tx);
  obs.rx_timestamp = read_clock(advance_noiseless(rx_clock, obs.t_rx - t_tx), obs.t_rx);
  obs.toa = obs.rx_timestamp - obs.tx_timestamp + spec.xi * stamp_rng.normal();
  return obs;
}

}  // namespace relsync
