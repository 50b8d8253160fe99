#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iterator>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <utility>
#include <vector>

#include "relsync/channel.hpp"
#include "relsync/child_solver.hpp"
#include "relsync/clock.hpp"
#include "relsync/packet.hpp"
#include "relsync/pseudo_clock_filter.hpp"
#include "relsync/random.hpp"
#include "relsync/ranging.hpp"
#include "relsync/runlog.hpp"
#include "relsync/scenario.hpp"
#include "relsync/scheduler.hpp"
#include "relsync/topology.hpp"
#include "relsync/trajectory.hpp"
#include "relsync/types.hpp"

namespace relsync {
namespace detail {

// True hardware clock of one agent, advanced lazily to each of the agent's
// own event instants. Never advanced from another agent's event, so the
// noise draw sequence depends only on this agent's event times.
struct TruthClock {
  ClockState state{};
  double t_last = 0.0;
  RandomStream rng{0};
  ClockNoiseSpec noise{};
  std::optional<ClockStepFault> pending_step;

  void advance(double t) {
    if (pending_step && t >= pending_step->t) {
      advance_noisy(pending_step->t);
      state.offset += pending_step->delta;
      pending_step.reset();
    }
    advance_noisy(t);
  }

  // State as of an instant at or before t_last, linear backward projection.
  ClockState state_before(double t) const {
    ClockState s = state;
    s.offset -= s.skew * (t_last - t);
    return s;
  }

 private:
  void advance_noisy(double t) {
    if (t > t_last) {
      state = propagate_clock(state, t - t_last, noise, rng);
      t_last = t;
    }
  }
};

enum SimEvKind : int { kEvPowerOn = 0, kEvReception = 1, kEvTimer = 2, kEvStep = 3 };

struct SimEvent {
  double t = 0.0;
  int kind = kEvPowerOn;
  AgentId agent = 0;
  std::uint64_t seq = 0;
  // reception payload
  AgentId sender = 0;
  std::shared_ptr<const std::vector<std::uint8_t>> bytes;
  double t_tx = 0.0;
  long frame = 0;
  double sender_offset = 0.0;  // sender truth at t_tx
  double sender_skew = 0.0;
  // timer payload
  std::uint64_t generation = 0;
};

struct SimEventAfter {
  bool operator()(const SimEvent& a, const SimEvent& b) const {
    if (a.t != b.t) return a.t > b.t;
    if (a.kind != b.kind) return a.kind > b.kind;
    if (a.agent != b.agent) return a.agent > b.agent;
    return a.seq > b.seq;
  }
};

struct ReceivedPacket {
  Packet pkt;
  double rx_ts = 0.0;  // receiver local
  double toa = 0.0;
  double t_tx = 0.0;
  double t_rx = 0.0;
};

struct OwnRange {
  RangeEstimate est;
  double range_true = 0.0;
  double t = 0.0;
};

struct RefClockStats {
  double offset_est = 0.0, skew_est = 0.0;
  double offset_true = 0.0, skew_true = 0.0;
  bool present = false;
};

struct ParentRt {
  bool powered = false;
  SchedulerState sched{};
  std::uint64_t timer_gen = 0;
  std::map<AgentId, PseudoClockFilter> filters;
  AgentId last_slot = 0;
  std::map<AgentId, ReceivedPacket> pkts;
  std::map<AgentId, OwnRange> own_ranges;
  RefClockStats ref_now;
  RefClockStats ref_last;
  Topology topo;
  bool topo_valid = false;
  long frames = 0;
};

struct ChildRt {
  bool powered = false;
  AgentId last_slot = 0;
  std::vector<ChildObservation> obs;
  struct RefObs {
    bool present = false;
    double t_tx = 0.0, t_rx = 0.0;
    double rx_ts = 0.0;  // child local
    double offset_true = 0.0, skew_true = 0.0;
  } ref;
  ChildState state{};
  bool has_state = false;
  double state_epoch = 0.0;  // child-local rx timestamp of the solving frame
  long frames = 0;
};

class SimEngine {
 public:
  explicit SimEngine(const Scenario& sc) : sc_(sc) {
    validate_scenario(sc_);
    const int n = sc_.total_agents();
    clocks_.resize(static_cast<size_t>(n) + 1);
    traj_.resize(static_cast<size_t>(n) + 1, TrajectorySpec::fixed_point({0.0, 0.0}));
    parents_.resize(static_cast<size_t>(sc_.num_parents) + 1);
    children_.resize(static_cast<size_t>(n) + 1);
    for (AgentId id = 1; id <= n; ++id) {
      const AgentConfig& cfg = sc_.agents[static_cast<size_t>(id - 1)];
      traj_[static_cast<size_t>(id)] = cfg.trajectory;
      RandomStream init =
          RandomStream::derive(sc_.seed, stream_purpose::kInitialState, static_cast<
              std::uint64_t>(id));
      double offset = init.uniform(sc_.clock.initial_offset_lo, sc_.clock.initial_offset_hi);
      double skew_ppm =
          init.uniform(sc_.clock.initial_skew_ppm_lo, sc_.clock.initial_skew_ppm_hi);
      if (cfg.initial_offset) offset = *cfg.initial_offset;
      if (cfg.initial_skew_ppm) skew_ppm = *cfg.initial_skew_ppm;
      TruthClock& c = clocks_[static_cast<size_t>(id)];
      c.state = ClockState{offset, skew_ppm * 1e-6};
      c.rng = RandomStream::derive(sc_.seed, stream_purpose::kClockNoise,
                                   static_cast<std::uint64_t>(id));
      c.noise = sc_.clock.noise;
      if (sc_.clock_step && sc_.clock_step->agent == id) {
        c.pending_step = sc_.clock_step;
        SimEvent ev;
        ev.t = sc_.clock_step->t;
        ev.kind = kEvStep;
        ev.agent = id;
        ev.seq = seq_++;
        queue_.push(ev);
      }
      const double on = cfg.power_on.value_or(id * sc_.slot_interval / 10.0);
      push_power_on(on, id);
    }
    for (const LinkBias& lb : sc_.link_bias) bias_[{lb.from, lb.to}] = lb.delay;
  }

  RunLog run() {
    while (!queue_.empty()) {
      SimEvent ev = queue_.top();
      if (ev.t > sc_.duration) break;
      queue_.pop();
      switch (ev.kind) {
        case kEvPowerOn: on_power(ev); break;
        case kEvReception: on_reception(ev); break;
        case kEvTimer: on_timer(ev); break;
        case kEvStep: on_step(ev); break;
      }
    }
    log_.meta.scenario_name = sc_.name;
    log_.meta.num_parents = sc_.num_parents;
    log_.meta.num_children = sc_.num_children;
    log_.meta.slot_interval = sc_.slot_interval;
    log_.meta.duration = sc_.duration;
    log_.meta.warmup = sc_.warmup;
    log_.meta.seed = sc_.seed;
    log_.meta.frames_completed = global_frame_ > 0 ? global_frame_ - 1 : 0;
    // exact in doubles for microsecond-grained slot intervals
    log_.meta.frequency_hz = 1e6 / (sc_.num_parents * (sc_.slot_interval * 1e6));
    return std::move(log_);
  }

 private:
  void push_power_on(double t, AgentId id) {
    SimEvent ev;
    ev.t = t;
    ev.kind = kEvPowerOn;
    ev.agent = id;
    ev.seq = seq_++;
    queue_.push(ev);
  }

  RandomStream& link_stream(std::map<std::pair<AgentId, AgentId>, RandomStream>& pool,
                            std::uint64_t purpose, AgentId from, AgentId to) {
    auto it = pool.find({from, to});
    if (it == pool.end()) {
      it = pool.emplace(std::make_pair(from, to),
                        RandomStream::derive(sc_.seed, purpose, static_cast<std::uint64_t>(from),
                                             static_cast<std::uint64_t>(to)))
               .first;
    }
    return it->second;
  }

  double absolute_for_local(const TruthClock& c, double local_target) const {
    const double local_now = read_clock(c.state, c.t_last);
    return c.t_last + (local_target - local_now) / (1.0 + c.state.skew);
  }

  void schedule_timer(AgentId a, double t_now) {
    ParentRt& rt = parents_[static_cast<size_t>(a)];
    const double wake_local = scheduler_wakeup(rt.sched);
    if (!std::isfinite(wake_local)) return;
    double t_abs = absolute_for_local(clocks_[static_cast<size_t>(a)], wake_local);
    if (t_abs < t_now) t_abs = t_now;
    SimEvent ev;
    ev.t = t_abs;
    ev.kind = kEvTimer;
    ev.agent = a;
    ev.seq = seq_++;
    ev.generation = ++rt.timer_gen;
    queue_.push(ev);
  }

  void log_event(double t, SimEventKind kind, AgentId agent, AgentId peer, long frame) {
    log_.events.push_back(SimEventRecord{t, kind, agent, peer, frame});
  }

  void on_power(const SimEvent& ev) {
    const AgentId a = ev.agent;
    clocks_[static_cast<size_t>(a)].advance(ev.t);
    log_event(ev.t, SimEventKind::power_on, a, 0, global_frame_);
    if (sc_.is_parent(a)) {
      ParentRt& rt = parents_[static_cast<size_t>(a)];
      rt.powered = true;
      SchedulerConfig cfg;
      cfg.my_id = a;
      cfg.num_parents = sc_.num_parents;
      cfg.slot_interval = sc_.slot_interval;
      cfg.listen_window = sc_.protocol.listen_window;
      const double local = read_clock(clocks_[static_cast<size_t>(a)].state, ev.t);
      rt.sched = make_scheduler(cfg, local);
      schedule_timer(a, ev.t);
    } else {
      children_[static_cast<size_t>(a)].powered = true;
    }
  }

  // A step fault moves the local clock under any armed timer. The hardware
  // timer fires at a local instant, so its absolute fire time shifts with the
  // step; re-arming from the unchanged scheduler target reproduces that.
  void on_step(const SimEvent& ev) {
    const AgentId a = ev.agent;
    clocks_[static_cast<size_t>(a)].advance(ev.t);
    if (sc_.is_parent(a) && parents_[static_cast<size_t>(a)].powered)
      schedule_timer(a, ev.t);
  }

  void on_timer(const SimEvent& ev) {
    const AgentId a = ev.agent;
    ParentRt& rt = parents_[static_cast<size_t>(a)];
    if (!rt.powered || ev.generation != rt.timer_gen) return;
    TruthClock& clk = clocks_[static_cast<size_t>(a)];
    clk.advance(ev.t);
    const double local = read_clock(clk.state, ev.t);
    const auto cmd = scheduler_step(rt.sched, SchedTimer{local});
    if (!cmd) {
      schedule_timer(a, ev.t);
      return;
    }
    broadcast(a, ev.t, local);
  }

  void broadcast(AgentId a, double t, double local) {
    ParentRt& rt = parents_[static_cast<size_t>(a)];
    scheduler_step(rt.sched, SchedOwnBroadcast{local});
    if (a <= rt.last_slot) close_parent_frame(a, t);
    rt.last_slot = a;

    Packet pkt;
    pkt.sender_id = static_cast<std::uint8_t>(a);
    pkt.tx_timestamp = local;
    pkt.position = rt.topo_valid ? rt.topo.of(a) : Vec2::Zero();
    for (AgentId j = 1; j <= sc_.num_parents; ++j) {
      if (j == a) continue;
      ClockTableEntry entry{static_cast<std::uint8_t>(j), 0.0, 0.0, false};
      auto it = rt.filters.find(j);
      if (it != rt.filters.end()) {
        entry = propagate_for_broadcast(it->second, local);
        if (entry.valid &&
            staleness_check(it->second, sc_.protocol.cov_threshold, local, sc_.clock.noise))
          entry.valid = false;
      }
      pkt.clock_table.push_back(entry);
    }
    auto bytes = std::make_shared<const std::vector<std::uint8_t>>(encode_packet(pkt));

    if (a <= last_global_sender_) ++global_frame_;
    last_global_sender_ = a;
    log_event(t, SimEventKind::broadcast, a, 0, global_frame_);

    const TruthClock& clk = clocks_[static_cast<size_t>(a)];
    for (AgentId r = 1; r <= sc_.total_agents(); ++r) {
      if (r == a) continue;
      const bool powered = sc_.is_parent(r) ? parents_[static_cast<size_t>(r)].powered
                                            : children_[static_cast<size_t>(r)].powered;
      if (!powered) continue;
      RandomStream& loss = link_stream(loss_streams_, stream_purpose::kPacketLoss, a, r);
      if (loss.uniform01() < sc_.radio.loss_prob) {
        log_event(t, SimEventKind::loss, r, a, global_frame_);
        continue;
      }
      SimEvent rx;
      rx.t = arrival_time(traj_[static_cast<size_t>(a)], traj_[static_cast<size_t>(r)], t,
                          sc_.radio);
      auto b = bias_.find({a, r});
      if (b != bias_.end()) rx.t += b->second;
      rx.kind = kEvReception;
      rx.agent = r;
      rx.seq = seq_++;
      rx.sender = a;
      rx.bytes = bytes;
      rx.t_tx = t;
      rx.frame = global_frame_;
      rx.sender_offset = clk.state.offset;
      rx.sender_skew = clk.state.skew;
      queue_.push(rx);
    }
    schedule_timer(a, t);
  }

  void on_reception(const SimEvent& ev) {
    const AgentId r = ev.agent;
    TruthClock& clk = clocks_[static_cast<size_t>(r)];
    // Read the receiver's truth at the transmit instant on the way to the
    // arrival instant, so truth stamps share the measurement's epochs.
    ClockState truth_at_ttx;
    if (ev.t_tx >= clk.t_last) {
      clk.advance(ev.t_tx);
      truth_at_ttx = clk.state;
      clk.advance(ev.t);
    } else {
      clk.advance(ev.t);
      truth_at_ttx = clk.state_before(ev.t_tx);
    }
    const double rx_ts = read_clock(clk.state, ev.t);
    const Packet pkt = decode_packet(*ev.bytes);
    RandomStream& stamp = link_stream(stamp_streams_, stream_purpose::kStampingNoise, ev.sender,
                                      r);
    const double toa = rx_ts - pkt.tx_timestamp + sc_.radio.xi * stamp.normal();
    log_event(ev.t, SimEventKind::reception, r, ev.sender, ev.frame);
    if (sc_.is_parent(r))
      parent_reception(r, ev, pkt, rx_ts, toa, truth_at_ttx);
    else
      child_reception(r, ev, pkt, rx_ts, toa);
  }

  void parent_reception(AgentId r, const SimEvent& ev, const Packet& pkt, double rx_ts,
                        double toa, const ClockState& truth_at_ttx) {
    ParentRt& rt = parents_[static_cast<size_t>(r)];
    const AgentId s = ev.sender;
    scheduler_step(rt.sched, SchedReception{s, rx_ts});
    schedule_timer(r, ev.t);
    if (s <= rt.last_slot) close_parent_frame(r, ev.t);
    rt.last_slot = s;

    auto fit = rt.filters.find(s);
    if (fit == rt.filters.end())
      fit = rt.filters
                .emplace(s, filter_init(s, Eigen::Vector2d::Zero(), default_filter_init_cov()))
                .first;
    PseudoClockFilter& f = fit->second;
    if (f.last_rx_timestamp && rx_ts <= *f.last_rx_timestamp) return;  // clock fault guard
    filter_step(f, toa, rx_ts, sc_.clock.noise, sc_.radio.xi);

    for (const ClockTableEntry& e : pkt.clock_table) {
      if (e.neighbor_id != r || !e.valid) continue;
      const double gap =
          tdma_adjust_delay(s, r, sc_.num_parents, sc_.slot_interval);
      OwnRange own;
      own.est = make_range_estimate(r, s, f.state(0), f.cov(0, 0), e.pseudo_offset, gap,
                                    sc_.clock.noise, sc_.radio.antenna_delay_tx,
                                    sc_.radio.antenna_delay_rx);
      own.range_true = kSpeedOfLight * (ev.t - ev.t_tx - sc_.radio.antenna_delay_tx -
                                        sc_.radio.antenna_delay_rx);
      own.t = ev.t;
      rt.own_ranges[s] = own;
      break;
    }

    ReceivedPacket rec;
    rec.pkt = pkt;
    rec.rx_ts = rx_ts;
    rec.toa = toa;
    rec.t_tx = ev.t_tx;
    rec.t_rx = ev.t;
    rt.pkts[s] = std::move(rec);

    if (s == sc_.reference) {
      RefClockStats st;
      st.offset_est = f.state(0);
      st.skew_est = f.state(1);
      st.offset_true = (clocks_[static_cast<size_t>(r)].state.offset - ev.sender_offset) +
                       (ev.t - ev.t_tx);
      st.skew_true = clocks_[static_cast<size_t>(r)].state.skew - ev.sender_skew;
      st.present = true;
      rt.ref_now = st;
    }
  }

  void child_reception(AgentId c, const SimEvent& ev, const Packet& pkt, double rx_ts,
                       double toa) {
    ChildRt& rt = children_[static_cast<size_t>(c)];
    const AgentId s = ev.sender;
    if (s <= rt.last_slot) close_child_frame(c);
    rt.last_slot = s;
    ChildObservation obs;
    obs.slot = s;
    obs.toa = toa;
    obs.rx_timestamp = rx_ts;
    obs.parent_position = pkt.position;
    obs.clock_table = pkt.clock_table;
    rt.obs.push_back(std::move(obs));
    if (s == sc_.reference) {
      rt.ref.present = true;
      rt.ref.t_tx = ev.t_tx;
      rt.ref.t_rx = ev.t;
      rt.ref.rx_ts = rx_ts;
      rt.ref.offset_true = (clocks_[static_cast<size_t>(c)].state.offset - ev.sender_offset) +
                           sc_.radio.antenna_delay_rx;
      rt.ref.skew_true = clocks_[static_cast<size_t>(c)].state.skew - ev.sender_skew;
    }
  }

  GaugeFrame truth_gauge(double t) const {
    return make_gauge(position_at(traj_[1], t), position_at(traj_[2], t),
                      position_at(traj_[3], t));
  }

  void close_parent_frame(AgentId a, double t_now) {
    ParentRt& rt = parents_[static_cast<size_t>(a)];
    if (rt.pkts.empty() && rt.own_ranges.empty()) {
      rt.ref_now = RefClockStats{};
      return;
    }
    const long frame_idx = ++rt.frames;
    double t_close = t_now;
    for (const auto& [s, rp] : rt.pkts) t_close = std::max(t_close, rp.t_rx);

    DistanceMatrix dm(sc_.num_parents);
    for (const auto& [j, own] : rt.own_ranges) dm.set(a, j, own.est.range_m);
    for (auto it = rt.pkts.begin(); it != rt.pkts.end(); ++it) {
      for (auto jt = std::next(it); jt != rt.pkts.end(); ++jt) {
        const AgentId i = it->first, j = jt->first;
        const ClockTableEntry* eij = nullptr;
        const ClockTableEntry* eji = nullptr;
        for (const auto& e : it->second.pkt.clock_table)
          if (e.neighbor_id == j && e.valid) eij = &e;
        for (const auto& e : jt->second.pkt.clock_table)
          if (e.neighbor_id == i && e.valid) eji = &e;
        if (!eij || !eji) continue;
        const double gap = jt->second.rx_ts - it->second.rx_ts;
        const double aligned = eij->pseudo_offset + eij->skew * gap;
        const RangeResult rr = estimate_range(aligned, eji->pseudo_offset,
                                              sc_.radio.antenna_delay_tx,
                                              sc_.radio.antenna_delay_rx);
        dm.set(i, j, rr.meters);
      }
    }

    bool fresh_topo = false;
    if (!rt.topo_valid) {
      const InitOutcome init = closed_form_init(dm);
      if (init.ok()) {
        const RefineOutcome ref = refine_topology(dm, init.topo, RefineOptions{});
        rt.topo = ref.topo;
        rt.topo_valid = true;
        fresh_topo = true;
      }
    } else {
      RefineOptions opt;
      opt.max_sweeps = 3;
      RefineOutcome best = refine_topology(dm, rt.topo, opt);
      // a fresh closed-form seed escapes a wrong reflection the warm start
      // can be locked into when the first frames carried transient ranges
      const InitOutcome init = closed_form_init(dm);
      if (init.ok()) {
        const RefineOutcome fresh = refine_topology(dm, init.topo, opt);
        if (std::isfinite(fresh.cost) && !(fresh.cost >= best.cost)) best = fresh;
      }
      if (std::isfinite(best.cost)) {
        rt.topo = best.topo;
        fresh_topo = true;
      }
    }

    AgentFrameRecord rec;
    rec.frame = frame_idx;
    rec.t = t_close;
    rec.agent = a;
    rec.is_parent = true;
    bool clock_ok = false, clock_held = false;
    if (a == sc_.reference) {
      clock_ok = true;
    } else if (rt.ref_now.present) {
      rt.ref_last = rt.ref_now;
      clock_ok = true;
    } else if (rt.ref_last.present) {
      clock_ok = true;
      clock_held = true;
    }
    if (clock_ok && a != sc_.reference) {
      const RefClockStats& st = rt.ref_now.present ? rt.ref_now : rt.ref_last;
      rec.offset_est = st.offset_est;
      rec.skew_est = st.skew_est;
      rec.offset_true = st.offset_true;
      rec.skew_true = st.skew_true;
    }
    rec.valid = rt.topo_valid && clock_ok;
    rec.held = clock_held || (rt.topo_valid && !fresh_topo);
    if (rt.topo_valid) {
      rec.pos_x_est = rt.topo.of(a).x();
      rec.pos_y_est = rt.topo.of(a).y();
    }
    const GaugeFrame g = truth_gauge(t_close);
    const Vec2 pt = g.apply(position_at(traj_[static_cast<size_t>(a)], t_close));
    rec.pos_x_true = pt.x();
    rec.pos_y_true = pt.y();
    log_.records.push_back(rec);

    for (const auto& [j, own] : rt.own_ranges) {
      RangeRecord rr;
      rr.frame = frame_idx;
      rr.t = own.t;
      rr.observer = a;
      rr.a = a;
      rr.b = j;
      rr.range_est = own.est.range_m;
      rr.range_true = own.range_true;
      rr.quality = own.est.quality;
      rr.clamped = own.est.clamped;
      log_.ranges.push_back(rr);
    }

    rt.pkts.clear();
    rt.own_ranges.clear();
    rt.ref_now = RefClockStats{};
  }

  void close_child_frame(AgentId c) {
    ChildRt& rt = children_[static_cast<size_t>(c)];
    if (rt.obs.empty()) {
      rt.ref = ChildRt::RefObs{};
      return;
    }
    const long frame_idx = ++rt.frames;
    bool fresh = false;
    if (rt.ref.present) {
      Frame f;
      f.index = frame_idx;
      f.reference = sc_.reference;
      for (const ChildObservation& o : rt.obs) {
        // A parent without a position fix broadcasts the origin placeholder.
        if (o.slot != sc_.reference && o.parent_position.x() == 0.0 &&
            o.parent_position.y() == 0.0)
          continue;
        f.obs.push_back(o);
      }
      const std::vector<ChildSolveRow> rows =
          assemble_child_rows(f, sc_.radio.antenna_delay_tx);
      if (rows.size() >= 4) {
        ChildSolveOptions opt;
        opt.use_skew_term = sc_.jlas_use_skew_term;
        ChildState cold;
        Vec2 centroid = Vec2::Zero();
        for (const auto& row : rows) centroid += row.parent_position;
        cold.position = centroid / static_cast<double>(rows.size());
        ChildSolveResult res = jlas_solve(rows, rt.has_state ? rt.state : cold, opt);
        if (!res.ok() && rt.has_state) res = jlas_solve(rows, cold, opt);
        if (res.ok()) {
          rt.state = res.state;
          rt.has_state = true;
          rt.state_epoch = rt.ref.rx_ts;
          fresh = true;
        }
      }
    }
    if (rt.ref.present) {
      AgentFrameRecord rec;
      rec.frame = frame_idx;
      rec.t = rt.ref.t_rx;
      rec.agent = c;
      rec.is_parent = false;
      if (rt.has_state) {
        rec.valid = true;
        rec.held = !fresh;
        rec.pos_x_est = rt.state.position.x();
        rec.pos_y_est = rt.state.position.y();
        rec.offset_est = rt.state.offset;
        rec.skew_est = rt.state.skew;
        if (!fresh)  // project the stale offset to the current epoch
          rec.offset_est += rt.state.skew * (rt.ref.rx_ts - rt.state_epoch);
      }
      rec.offset_true = rt.ref.offset_true;
      rec.skew_true = rt.ref.skew_true;
      const GaugeFrame g = truth_gauge(rt.ref.t_rx);
      const Vec2 pt = g.apply(position_at(traj_[static_cast<size_t>(c)], rt.ref.t_rx));
      rec.pos_x_true = pt.x();
      rec.pos_y_true = pt.y();
      log_.records.push_back(rec);
    }
    rt.obs.clear();
    rt.ref = ChildRt::RefObs{};
  }

  Scenario sc_;
  std::vector<TruthClock> clocks_;
  std::vector<TrajectorySpec> traj_;
  std::vector<ParentRt> parents_;
  std::vector<ChildRt> children_;
  std::map<std::pair<AgentId, AgentId>, RandomStream> loss_streams_;
  std::map<std::pair<AgentId, AgentId>, RandomStream> stamp_streams_;
  std::map<std::pair<AgentId, AgentId>, double> bias_;
  std::priority_queue<SimEvent, std::vector<SimEvent>, SimEventAfter> queue_;
  RunLog log_;
  std::uint64_t seq_ = 0;
  long global_frame_ = 0;
  AgentId last_global_sender_ = std::numeric_limits<AgentId>::max();
};

}  // namespace detail

inline RunLog run_simulation(const Scenario& sc) { return detail::SimEngine(sc).run(); }

}  // namespace relsync
