#pragma once

#include <Eigen/Core>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <optional>
#include <vector>

#include "relsync/packet.hpp"
#include "relsync/types.hpp"

namespace relsync {

// One parent broadcast captured by a listening child within a frame.
struct ChildObservation {
  AgentId slot = 0;       // sender id
  double toa = 0.0;       // seconds
  double rx_timestamp = 0.0;
  Vec2 parent_position = Vec2::Zero();
  std::vector<ClockTableEntry> clock_table;
};

// One TDMA round as a child saw it: slot ids strictly increasing.
struct Frame {
  long index = 0;
  AgentId reference = 1;
  std::vector<ChildObservation> obs;
  const ChildObservation* find(AgentId slot) const {
    for (const auto& o : obs)
      if (o.slot == slot) return &o;
    return nullptr;
  }
};

inline double pseudorange(double toa, double v_c = kSpeedOfLight) { return v_c * toa; }

namespace detail {
inline const ClockTableEntry* table_entry(const ChildObservation& o, AgentId neighbor) {
  for (const auto& e : o.clock_table)
    if (e.neighbor_id == neighbor && e.valid) return &e;
  return nullptr;
}
// Entry value aligned across a (signed) local-clock gap.
inline double align_entry(const ClockTableEntry& e, double gap) {
  return e.pseudo_offset + e.skew * gap;
}
}  // namespace detail

// Relative clock offset of the reference parent against parent j, evaluated at
// the transmit instant of slot j in this frame. The delay term cancels in the
// half-difference of the two directions of a pair; the direct ref<->j path is
// averaged with the two-hop compositions through every other observed parent.
// Returns nullopt when no path has valid entries.
inline std::optional<double> recover_relative_offset(const Frame& frame, AgentId j) {
  const AgentId i = frame.reference;
  if (j == i) return 0.0;
  const ChildObservation* oi = frame.find(i);
  const ChildObservation* oj = frame.find(j);
  if (!oi || !oj) return std::nullopt;
  const double gap_i = oj->rx_timestamp - oi->rx_timestamp;

  double sum = 0.0;
  int paths = 0;
  if (const auto* e_ij = detail::table_entry(*oi, j)) {
    if (const auto* e_ji = detail::table_entry(*oj, i)) {
      sum += 0.5 * (detail::align_entry(*e_ij, gap_i) - e_ji->pseudo_offset);
      ++paths;
    }
  }
  for (const auto& om : frame.obs) {
    const AgentId m = om.slot;
    if (m == i || m == j) continue;
    const auto* e_im = detail::table_entry(*oi, m);
    const auto* e_mi = detail::table_entry(om, i);
    const auto* e_mj = detail::table_entry(om, j);
    const auto* e_jm = detail::table_entry(*oj, m);
    if (!e_im || !e_mi || !e_mj || !e_jm) continue;
    const double gap_m = oj->rx_timestamp - om.rx_timestamp;
    const double t_im = 0.5 * (detail::align_entry(*e_im, gap_i) - detail::align_entry(*e_mi, gap_m));
    const double t_mj = 0.5 * (detail::align_entry(*e_mj, gap_m) - e_jm->pseudo_offset);
    sum += t_im + t_mj;
    ++paths;
  }
  if (paths == 0) return std::nullopt;
  return sum / paths;
}

// One row of the child's joint localization/synchronization problem.
struct ChildSolveRow {
  AgentId slot = 0;
  double pseudorange_m = 0.0;  // v_c * toa
  double dt = 0.0;             // local seconds after the reference observation
  double rel_offset = 0.0;     // reference-vs-slot clock offset at this slot's tx
  Vec2 parent_position = Vec2::Zero();
  double antenna_tx = 0.0;     // known sender-side antenna delay, seconds
};

// Child state relative to the reference parent. The child's own antenna delay
// is not separable from the offset and is absorbed into it.
struct ChildState {
  double offset = 0.0;  // seconds
  double skew = 0.0;    // ratio
  Vec2 position = Vec2::Zero();
};

struct ChildSolveOptions {
  int max_iters = 25;
  double step_tol_m = 1e-9;    // on the range-scaled step norm
  double cond_limit = 1e10;    // on the scaled normal matrix
  bool use_skew_term = true;   // ablation switch: drop the skew*dt model term
};

enum class ChildSolveStatus { ok, too_few_observations, ill_conditioned, diverged };

struct ChildSolveResult {
  ChildState state;
  ChildSolveStatus status = ChildSolveStatus::ok;
  bool ok() const { return status == ChildSolveStatus::ok; }
  int iters = 0;
  double cost = 0.0;  // sum of squared pseudorange residuals, m^2
  double cond = 0.0;
};

// Predicted pseudorange for one row.
inline double jlas_model(const ChildState& s, const ChildSolveRow& row,
                         bool use_skew_term = true) {
  const double clock = s.offset + (use_skew_term ? s.skew * row.dt : 0.0) + row.rel_offset +
                       row.antenna_tx;
  return kSpeedOfLight * clock + (row.parent_position - s.position).norm();
}

// Analytic gradient of the model against [offset, skew, x, y].
inline Eigen::Vector4d jlas_jacobian_row(const ChildState& s, const ChildSolveRow& row) {
  const Vec2 diff = s.position - row.parent_position;
  const double dist = std::max(diff.norm(), 1e-12);
  Eigen::Vector4d g;
  g(0) = kSpeedOfLight;
  g(1) = kSpeedOfLight * row.dt;
  g(2) = diff.x() / dist;
  g(3) = diff.y() / dist;
  return g;
}

// Gauss-Newton over [offset, skew, position] (or [offset, position] with the
// skew term ablated). Solved internally in range units so the conditioning
// reflects geometry rather than unit scale. Halving line search; the frame is
// rejected when fewer than 4 rows are usable, when the scaled normal matrix
// condition number exceeds the limit, or when no descent step exists while
// far from convergence.
inline ChildSolveResult jlas_solve(const std::vector<ChildSolveRow>& rows,
                                   const ChildState& init, const ChildSolveOptions& opt = {}) {
  ChildSolveResult out;
  out.state = init;
  const int dim = opt.use_skew_term ? 4 : 3;
  if (static_cast<int>(rows.size()) < 4) {
    out.status = ChildSolveStatus::too_few_observations;
    return out;
  }

  auto cost_of = [&](const ChildState& s) {
    double c = 0.0;
    for (const auto& r : rows) {
      const double res = r.pseudorange_m - jlas_model(s, r, opt.use_skew_term);
      c += res * res;
    }
    return c;
  };

  ChildState cur = init;
  if (!opt.use_skew_term) cur.skew = 0.0;
  double cur_cost = cost_of(cur);

  for (int it = 1; it <= opt.max_iters; ++it) {
    out.iters = it;
    Eigen::MatrixXd jac(rows.size(), dim);
    Eigen::VectorXd res(rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const auto& r = rows[k];
      res(static_cast<Eigen::Index>(k)) = r.pseudorange_m - jlas_model(cur, r, opt.use_skew_term);
      const Vec2 diff = cur.position - r.parent_position;
      const double dist = std::max(diff.norm(), 1e-12);
      // Scaled columns: [v_c*offset, v_c*skew, x, y] -> [1, dt, unit].
      int col = 0;
      jac(static_cast<Eigen::Index>(k), col++) = 1.0;
      if (opt.use_skew_term) jac(static_cast<Eigen::Index>(k), col++) = r.dt;
      jac(static_cast<Eigen::Index>(k), col++) = diff.x() / dist;
      jac(static_cast<Eigen::Index>(k), col) = diff.y() / dist;
    }
    const Eigen::MatrixXd normal = jac.transpose() * jac;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(normal);
    const double emin = es.eigenvalues().minCoeff();
    const double emax = es.eigenvalues().maxCoeff();
    out.cond = emin > 0.0 ? emax / emin : std::numeric_limits<double>::infinity();
    if (!(emin > 0.0) || out.cond > opt.cond_limit) {
      out.status = ChildSolveStatus::ill_conditioned;
      out.state = cur;
      out.cost = cur_cost;
      return out;
    }
    const Eigen::VectorXd step = normal.ldlt().solve(jac.transpose() * res);

    double lambda = 1.0;
    bool accepted = false;
    while (lambda >= 1e-4) {
      ChildState cand = cur;
      int col = 0;
      cand.offset += lambda * step(col++) / kSpeedOfLight;
      if (opt.use_skew_term) cand.skew += lambda * step(col++) / kSpeedOfLight;
      cand.position.x() += lambda * step(col++);
      cand.position.y() += lambda * step(col);
      const double c = cost_of(cand);
      if (c <= cur_cost) {
        cur = cand;
        cur_cost = c;
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!accepted) {
      if (step.norm() > 1e-6) {
        out.status = ChildSolveStatus::diverged;
        out.state = cur;
        out.cost = cur_cost;
        return out;
      }
      break;  // stuck at numerical floor but effectively converged
    }
    if (lambda * step.norm() < opt.step_tol_m) break;
  }
  out.state = cur;
  out.cost = cur_cost;
  return out;
}

// Assemble solver rows from a frame: the reference observation anchors the
// epoch; rows exist only for slots whose relative offset is recoverable from
// the broadcast tables. Gaps come from the child's own receive timestamps.
inline std::vector<ChildSolveRow> assemble_child_rows(const Frame& frame, double antenna_tx) {
  std::vector<ChildSolveRow> rows;
  const ChildObservation* ref = frame.find(frame.reference);
  if (!ref) return rows;
  for (const auto& o : frame.obs) {
    const auto rel = recover_relative_offset(frame, o.slot);
    if (!rel) continue;
    ChildSolveRow r;
    r.slot = o.slot;
    r.pseudorange_m = pseudorange(o.toa);
    r.dt = o.rx_timestamp - ref->rx_timestamp;
    r.rel_offset = *rel;
    r.parent_position = o.parent_position;
    r.antenna_tx = antenna_tx;
    rows.push_back(r);
  }
  return rows;
}

}  // namespace relsync
