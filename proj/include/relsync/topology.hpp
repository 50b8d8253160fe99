#pragma once

#include <Eigen/Core>
#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "relsync/types.hpp"

namespace relsync {

// Symmetric pairwise distance table over agents 1..n with availability mask.
class DistanceMatrix {
 public:
  explicit DistanceMatrix(int n) : n_(n), d_(n * n, 0.0), has_(n * n, 0) {
    if (n < 2) throw std::invalid_argument("DistanceMatrix: need n >= 2");
  }
  int size() const { return n_; }
  void set(AgentId i, AgentId j, double meters) {
    check(i, j);
    d_[idx(i, j)] = d_[idx(j, i)] = meters;
    has_[idx(i, j)] = has_[idx(j, i)] = 1;
  }
  void clear(AgentId i, AgentId j) {
    check(i, j);
    has_[idx(i, j)] = has_[idx(j, i)] = 0;
  }
  bool has(AgentId i, AgentId j) const { check(i, j); return has_[idx(i, j)] != 0; }
  double get(AgentId i, AgentId j) const {
    check(i, j);
    if (!has_[idx(i, j)]) throw std::out_of_range("DistanceMatrix: pair not set");
    return d_[idx(i, j)];
  }

 private:
  void check(AgentId i, AgentId j) const {
    if (i < 1 || i > n_ || j < 1 || j > n_ || i == j)
      throw std::out_of_range("DistanceMatrix: bad pair");
  }
  std::size_t idx(AgentId i, AgentId j) const {
    return static_cast<std::size_t>(i - 1) * n_ + (j - 1);
  }
  int n_;
  std::vector<double> d_;
  std::vector<char> has_;
};

// Positions of agents 1..n in the common frame: agent 1 at the origin, agent 2
// on the +x axis, agent 3 in the upper half plane.
struct Topology {
  std::vector<Vec2> positions;  // positions[i-1] is agent i
  Vec2 of(AgentId i) const { return positions[static_cast<std::size_t>(i - 1)]; }
};

enum class TopologyError { none, missing_pair, degenerate, inconsistent };

struct InitOutcome {
  Topology topo;
  TopologyError error = TopologyError::none;
  bool ok() const { return error == TopologyError::none; }
};

// Tolerance on the lateration radicand: slightly negative values (noise) clamp
// to zero, anything below -kRadicandEps means the distances are inconsistent.
inline constexpr double kRadicandEps = 1e-6;  // m^2

// Closed-form trilateration seed. Requires distances from every agent to
// agents 1 and 2, plus to agent 3 for agents beyond 3 (sign disambiguation).
inline InitOutcome closed_form_init(const DistanceMatrix& dm) {
  const int n = dm.size();
  InitOutcome out;
  out.topo.positions.assign(static_cast<std::size_t>(n), Vec2::Zero());
  if (!dm.has(2, 1)) { out.error = TopologyError::missing_pair; return out; }
  const double d21 = dm.get(2, 1);
  if (!(d21 > 0.0)) { out.error = TopologyError::degenerate; return out; }
  out.topo.positions[1] = Vec2(d21, 0.0);

  auto lateral = [&](double di1, double di2) -> std::pair<double, double> {
    const double x = (d21 * d21 + di1 * di1 - di2 * di2) / (2.0 * d21);
    return {x, di1 * di1 - x * x};
  };

  if (n >= 3) {
    if (!dm.has(3, 1) || !dm.has(3, 2)) { out.error = TopologyError::missing_pair; return out; }
    const auto [x, rad] = lateral(dm.get(3, 1), dm.get(3, 2));
    if (rad < -kRadicandEps) { out.error = TopologyError::inconsistent; return out; }
    out.topo.positions[2] = Vec2(x, std::sqrt(std::max(rad, 0.0)));
  }
  for (AgentId i = 4; i <= n; ++i) {
    if (!dm.has(i, 1) || !dm.has(i, 2) || !dm.has(i, 3)) {
      out.error = TopologyError::missing_pair;
      return out;
    }
    const auto [x, rad] = lateral(dm.get(i, 1), dm.get(i, 2));
    if (rad < -kRadicandEps) { out.error = TopologyError::inconsistent; return out; }
    const double y = std::sqrt(std::max(rad, 0.0));
    const Vec2 p3 = out.topo.positions[2];
    const double di3 = dm.get(i, 3);
    const double err_pos = std::abs((Vec2(x, y) - p3).norm() - di3);
    const double err_neg = std::abs((Vec2(x, -y) - p3).norm() - di3);
    out.topo.positions[static_cast<std::size_t>(i - 1)] =
        Vec2(x, err_pos <= err_neg ? y : -y);
  }
  return out;
}

struct RefineOptions {
  int max_sweeps = 5;
  double step_tol = 1e-10;   // meters; sweep loop stops below this
  double min_lambda = 1e-4;  // line search floor
};

struct RefineOutcome {
  Topology topo;
  bool converged = false;
  int sweeps = 0;
  double cost = 0.0;  // sum of squared range residuals over available pairs
};

inline double topology_cost(const DistanceMatrix& dm, const Topology& t) {
  double c = 0.0;
  const int n = dm.size();
  for (AgentId i = 1; i <= n; ++i)
    for (AgentId j = i + 1; j <= n; ++j)
      if (dm.has(i, j)) {
        const double r = dm.get(i, j) - (t.of(i) - t.of(j)).norm();
        c += r * r;
      }
  return c;
}

// Block-coordinate Gauss-Newton on the squared range residuals. The gauge
// coordinates (agent 1 entirely, agent 2's y) are never written. Each block
// step is accepted only if it does not increase that agent's local cost, via
// a halving line search, so the total cost is monotone.
inline RefineOutcome refine_topology(const DistanceMatrix& dm, Topology init,
                                     const RefineOptions& opt = {}) {
  const int n = dm.size();
  if (static_cast<int>(init.positions.size()) != n)
    throw std::invalid_argument("refine_topology: init size mismatch");
  RefineOutcome out;
  out.topo = std::move(init);

  auto local_cost = [&](AgentId i, const Vec2& pi) {
    double c = 0.0;
    for (AgentId j = 1; j <= n; ++j)
      if (j != i && dm.has(i, j)) {
        const double r = dm.get(i, j) - (pi - out.topo.of(j)).norm();
        c += r * r;
      }
    return c;
  };

  for (int sweep = 1; sweep <= opt.max_sweeps; ++sweep) {
    double moved = 0.0;
    for (AgentId i = 2; i <= n; ++i) {
      const bool x_only = (i == 2);
      const Vec2 pi = out.topo.of(i);
      Eigen::Matrix2d ata = Eigen::Matrix2d::Zero();
      Vec2 atb = Vec2::Zero();
      int rows = 0;
      for (AgentId j = 1; j <= n; ++j) {
        if (j == i || !dm.has(i, j)) continue;
        const Vec2 diff = pi - out.topo.of(j);
        const double dist = diff.norm();
        if (dist < 1e-9) continue;
        const Vec2 grad = diff / dist;  // d(dist)/d(pi)
        const double r = dm.get(i, j) - dist;
        ata += grad * grad.transpose();
        atb += grad * r;
        ++rows;
      }
      if (rows == 0) continue;
      Vec2 step = Vec2::Zero();
      if (x_only) {
        if (ata(0, 0) <= 0.0) continue;
        step.x() = atb.x() / ata(0, 0);
      } else {
        if (std::abs(ata.determinant()) < 1e-15) continue;
        step = ata.ldlt().solve(atb);
      }
      const double before = local_cost(i, pi);
      double lambda = 1.0;
      while (lambda >= opt.min_lambda) {
        const Vec2 cand = pi + lambda * step;
        if (local_cost(i, cand) <= before) {
          out.topo.positions[static_cast<std::size_t>(i - 1)] = cand;
          moved = std::max(moved, lambda * step.norm());
          break;
        }
        lambda *= 0.5;
      }
    }
    out.sweeps = sweep;
    if (moved < opt.step_tol) {
      out.converged = true;
      break;
    }
  }
  out.cost = topology_cost(dm, out.topo);
  return out;
}

// Map from world coordinates into the estimator's frame: agent 1 at the
// origin, agent 2 on the +x axis, agent 3 with y >= 0.
struct GaugeFrame {
  Vec2 origin{0.0, 0.0};
  Vec2 u{1.0, 0.0};
  Vec2 v{0.0, 1.0};

  Vec2 apply(const Vec2& p) const {
    const Vec2 q = p - origin;
    return {q.dot(u), q.dot(v)};
  }
};

inline GaugeFrame make_gauge(const Vec2& p1, const Vec2& p2, const Vec2& p3) {
  GaugeFrame g;
  g.origin = p1;
  g.u = p2 - p1;
  const double norm = g.u.norm();
  if (!(norm > 0.0)) throw std::invalid_argument("make_gauge: agents 1 and 2 coincide");
  g.u /= norm;
  g.v = Vec2(-g.u.y(), g.u.x());
  if ((p3 - p1).dot(g.v) < 0.0) g.v = -g.v;
  return g;
}

// Express true positions in the estimator's frame.
inline Topology gauge_align(const std::vector<Vec2>& truth) {
  if (truth.size() < 3) throw std::invalid_argument("gauge_align: need at least 3 positions");
  const GaugeFrame g = make_gauge(truth[0], truth[1], truth[2]);
  Topology out;
  out.positions.reserve(truth.size());
  for (const Vec2& p : truth) out.positions.push_back(g.apply(p));
  return out;
}

}  // namespace relsync
