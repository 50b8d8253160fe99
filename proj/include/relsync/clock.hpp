#pragma once

#include <Eigen/Core>
#include <cmath>
#include <stdexcept>

#include "relsync/random.hpp"

namespace relsync {

// Two-state oscillator model: local time T(t) = t + offset(t), with the offset
// driven by the skew and both states driven by white noise.
struct ClockState {
  double offset = 0.0;  // seconds
  double skew = 0.0;    // dimensionless rate error (1e-6 == 1 ppm)
};

// One-sided power spectral densities of the offset and skew driving noises.
// Field names mirror the scenario file keys.
struct ClockNoiseSpec {
  double s_nT = 0.0;
  double s_nW = 0.0;
};

inline double read_clock(const ClockState& c, double t) { return t + c.offset; }

// Componentwise difference: the clock of a as seen against the clock of b.
inline ClockState relative_clock(const ClockState& a, const ClockState& b) {
  return {a.offset - b.offset, a.skew - b.skew};
}

// Discrete process noise covariance over an interval dt for the [offset, skew]
// state. Off-diagonal and skew terms use the single spectra; the offset term
// carries the doubled spectra of the difference-clock dynamics.
inline Eigen::Matrix2d process_noise_cov(const ClockNoiseSpec& n, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("process_noise_cov: dt must be > 0");
  if (n.s_nT < 0.0 || n.s_nW < 0.0)
    throw std::invalid_argument("process_noise_cov: spectral densities must be >= 0");
  Eigen::Matrix2d q;
  q(0, 0) = 2.0 * n.s_nT * dt + 2.0 * n.s_nW * dt * dt * dt / 3.0;
  q(0, 1) = n.s_nW * dt * dt;
  q(1, 0) = q(0, 1);
  q(1, 1) = n.s_nW * dt;
  return q;
}

// Deterministic part of the propagation only.
inline ClockState advance_noiseless(const ClockState& c, double dt) {
  return {c.offset + c.skew * dt, c.skew};
}

// Exact discrete propagation over dt: noiseless integration plus one joint
// draw from the interval covariance. Always consumes exactly two normal
// variates from rng, in a fixed order, even when the noise is zero.
inline ClockState propagate_clock(const ClockState& c, double dt, const ClockNoiseSpec& n,
                                  RandomStream& rng) {
  if (!(dt > 0.0)) throw std::invalid_argument("propagate_clock: dt must be > 0");
  const Eigen::Matrix2d q = process_noise_cov(n, dt);
  // Lower Cholesky factor with radicands clamped at zero so inputs outside the
  // formula's PSD domain still produce a finite draw.
  const double l00 = std::sqrt(std::max(q(0, 0), 0.0));
  const double l10 = l00 > 0.0 ? q(1, 0) / l00 : 0.0;
  const double l11 = std::sqrt(std::max(q(1, 1) - l10 * l10, 0.0));
  const auto [z0, z1] = rng.normal_pair();
  ClockState out = advance_noiseless(c, dt);
  out.offset += l00 * z0;
  out.skew += l10 * z0 + l11 * z1;
  return out;
}

}  // namespace relsync
