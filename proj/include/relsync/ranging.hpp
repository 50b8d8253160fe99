#pragma once

#include <stdexcept>

#include "relsync/clock.hpp"
#include "relsync/packet.hpp"
#include "relsync/types.hpp"

namespace relsync {

struct RangeResult {
  double meters = 0.0;
  bool clamped = false;  // raw two-way sum came out negative
};

// Two-way range from the pair of pseudo-clock offsets tracked on each side of
// a link: the relative clock offsets cancel in the average and the shared
// propagation delay remains. Antenna delays are subtracted out.
inline RangeResult estimate_range(double local_pseudo_offset, double remote_pseudo_offset,
                                  double antenna_tx, double antenna_rx,
                                  double v_c = kSpeedOfLight) {
  const double tof = 0.5 * (local_pseudo_offset + remote_pseudo_offset) - antenna_tx - antenna_rx;
  if (tof < 0.0) return {0.0, true};
  return {v_c * tof, false};
}

// Linear extrapolation of a received table entry across the slot gap between
// the broadcast it was embedded in and the instant it is consumed at.
inline double propagate_remote_offset(double pseudo_offset, double skew, double slot_gap) {
  if (slot_gap < 0.0)
    throw std::invalid_argument("propagate_remote_offset: slot_gap must be >= 0");
  return pseudo_offset + skew * slot_gap;
}

struct RangeEstimate {
  AgentId a = 0;
  AgentId b = 0;
  double range_m = 0.0;
  double quality = 0.0;  // variance proxy, m^2; grows with extrapolation gap
  bool clamped = false;
};

// Full range record between agents a and b. local_var is the a-side filter's
// pseudo-offset variance; the remote side's variance is unknown (covariances
// are not broadcast) and is proxied by the same value plus the process noise
// accumulated over the extrapolation gap of the remote entry.
inline RangeEstimate make_range_estimate(AgentId a, AgentId b, double local_pseudo_offset,
                                         double local_var, double remote_pseudo_offset,
                                         double extrapolation_gap, const ClockNoiseSpec& noise,
                                         double antenna_tx, double antenna_rx) {
  RangeEstimate est;
  est.a = a;
  est.b = b;
  const RangeResult r =
      estimate_range(local_pseudo_offset, remote_pseudo_offset, antenna_tx, antenna_rx);
  est.range_m = r.meters;
  est.clamped = r.clamped;
  double remote_var = local_var;
  if (extrapolation_gap > 0.0) {
    const ClockNoiseSpec doubled{2.0 * noise.s_nT, 2.0 * noise.s_nW};
    remote_var += process_noise_cov(doubled, extrapolation_gap)(0, 0);
  }
  const double half_c = 0.5 * kSpeedOfLight;
  est.quality = half_c * half_c * (local_var + remote_var);
  return est;
}

}  // namespace relsync
