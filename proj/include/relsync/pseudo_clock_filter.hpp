#pragma once

#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "relsync/clock.hpp"
#include "relsync/packet.hpp"
#include "relsync/types.hpp"

namespace relsync {

// Per-neighbor Kalman filter over [pseudo-clock offset, skew]. The pseudo
// offset is the relative clock offset plus the one-way propagation delay, so
// a TOA measurement of a packet from the neighbor observes it directly.
struct PseudoClockFilter {
  AgentId neighbor = 0;
  Eigen::Vector2d state = Eigen::Vector2d::Zero();  // [seconds, ratio]
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  std::optional<double> last_rx_timestamp;  // local seconds of the last update
};

inline Eigen::Matrix2d default_filter_init_cov() {
  Eigen::Matrix2d p;
  p << 0.1, 0.0, 0.0, 1.0;
  return p;
}

// Pseudo-offset variance above which a tracked neighbor is no longer
// advertised as valid. 100x the converged variance (4.23e-21) at the default
// noise figures and a 5 ms update cadence; scenario files can override it.
inline constexpr double kDefaultCovThreshold = 4.2e-19;

inline PseudoClockFilter filter_init(AgentId neighbor, const Eigen::Vector2d& state0,
                                     const Eigen::Matrix2d& cov0) {
  if ((cov0 - cov0.transpose()).cwiseAbs().maxCoeff() > 0.0)
    throw std::invalid_argument("filter_init: covariance must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov0);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw std::invalid_argument("filter_init: covariance must be positive definite");
  PseudoClockFilter f;
  f.neighbor = neighbor;
  f.state = state0;
  f.cov = cov0;
  return f;
}

// One predict/update cycle for a received TOA. The prediction interval is the
// local time elapsed since the previous update; the first update after init
// has no interval and applies the measurement alone. Process noise uses the
// doubled spectra of relative clock dynamics.
inline void filter_step(PseudoClockFilter& f, double toa, double rx_timestamp,
                        const ClockNoiseSpec& noise, double xi) {
  if (f.last_rx_timestamp) {
    const double dt = rx_timestamp - *f.last_rx_timestamp;
    if (!(dt > 0.0))
      throw std::invalid_argument("filter_step: rx_timestamp must increase between updates");
    Eigen::Matrix2d fd;
    fd << 1.0, dt, 0.0, 1.0;
    const ClockNoiseSpec doubled{2.0 * noise.s_nT, 2.0 * noise.s_nW};
    f.state = fd * f.state;
    f.cov = fd * f.cov * fd.transpose() + process_noise_cov(doubled, dt);
  }
  const double s = f.cov(0, 0) + xi * xi;
  // fully collapsed prior against an exact measurement: the limit gain is
  // unity on the offset (PSD forces the cross term to zero with it)
  Eigen::Vector2d k(1.0, 0.0);
  if (s > 0.0) k = f.cov.col(0) / s;
  f.state += k * (toa - f.state(0));
  // closed-form posterior for the optimal gain:
  //   c00 = p00 r, c01 = p01 r, c11 = (det P + p11 xi^2) / s with r = xi^2 / s.
  // Every entry is a sum of nonnegative terms, unlike the Joseph product,
  // which cancels the skew variance to fp noise once a wide prior collapses
  // to near rank one after a single exact-ish measurement. det P >= 0 for a
  // PSD prior, so the fp-negative sliver is clamped, and the correlation is
  // capped a hair inside Cauchy-Schwarz to keep the matrix strictly PD.
  if (s > 0.0) {
    const double det = std::max(f.cov.determinant(), 0.0);
    const double r = (xi * xi) / s;
    const double c00 = f.cov(0, 0) * r;
    const double c11 = (det + f.cov(1, 1) * xi * xi) / s;
    double c01 = f.cov(0, 1) * r;
    const double cap = (1.0 - 1e-9) * std::sqrt(c00 * c11);
    c01 = std::clamp(c01, -cap, cap);
    f.cov << c00, c01, c01, c11;
  } else {
    const double c11 = f.cov(1, 1);
    f.cov << 0.0, 0.0, 0.0, c11;
  }
  f.last_rx_timestamp = rx_timestamp;
}

// Linear extrapolation of the filtered pseudo-clock to the broadcast instant;
// this pair is what goes on the wire.
inline ClockTableEntry propagate_for_broadcast(const PseudoClockFilter& f, double local_now) {
  ClockTableEntry e;
  e.neighbor_id = f.neighbor;
  const double gap = f.last_rx_timestamp ? local_now - *f.last_rx_timestamp : 0.0;
  e.pseudo_offset = f.state(0) + f.state(1) * gap;
  e.skew = f.state(1);
  e.valid = f.last_rx_timestamp.has_value();
  return e;
}

// A neighbor is stale once the pseudo-offset variance, grown by the process
// noise accumulated since the last update, exceeds the threshold.
inline bool staleness_check(const PseudoClockFilter& f, double cov_threshold, double local_now,
                            const ClockNoiseSpec& noise) {
  if (!f.last_rx_timestamp) return true;
  const double elapsed = local_now - *f.last_rx_timestamp;
  double grown = f.cov(0, 0);
  if (elapsed > 0.0) {
    const ClockNoiseSpec doubled{2.0 * noise.s_nT, 2.0 * noise.s_nW};
    grown += process_noise_cov(doubled, elapsed)(0, 0);
  }
  return grown > cov_threshold;
}

}  // namespace relsync
