#include <catch2/catch_amalgamated.hpp>

#include "relsync/scheduler.hpp"

using namespace relsync;
using Catch::Matchers::WithinAbs;

TEST_CASE("slot delay places each sender one slot apart", "[scheduler]") {
  // id 3 hearing id 1 in a 5-parent ring waits two slots.
  CHECK_THAT(tdma_adjust_delay(3, 1, 5, 0.001), WithinAbs(0.002, 1e-15));
  // id 3 hearing id 5 wraps around the ring: 3 + 5 - 5 = 3 slots.
  CHECK_THAT(tdma_adjust_delay(3, 5, 5, 0.001), WithinAbs(0.003, 1e-15));
  CHECK_THAT(tdma_adjust_delay(2, 1, 5, 0.001), WithinAbs(0.001, 1e-15));
  CHECK_THAT(tdma_adjust_delay(1, 5, 5, 0.001), WithinAbs(0.001, 1e-15));
  CHECK_THAT(tdma_adjust_delay(4, 3, 10, 0.001), WithinAbs(0.001, 1e-15));
}

TEST_CASE("initial delay defaults to a full frame when nothing was heard", "[scheduler]") {
  CHECK_THAT(tdma_initial_delay(3, std::nullopt, 5, 0.001), WithinAbs(0.005, 1e-15));
  CHECK_THAT(tdma_initial_delay(3, std::optional<AgentId>(1), 5, 0.001),
             WithinAbs(0.002, 1e-15));
}

TEST_CASE("delay is rejected for a self-reception", "[scheduler]") {
  CHECK_THROWS_AS(tdma_adjust_delay(2, 2, 5, 0.001), std::invalid_argument);
}

TEST_CASE("delays over a whole ring cover each slot exactly once", "[scheduler]") {
  const int p = 7;
  const double slot = 0.001;
  for (AgentId i = 1; i <= p; ++i) {
    std::vector<bool> seen(p, false);
    for (AgentId j = 1; j <= p; ++j) {
      if (i == j) continue;
      double d = tdma_adjust_delay(i, j, p, slot);
      int slots = static_cast<int>(d / slot + 0.5);
      REQUIRE(slots >= 1);
      REQUIRE(slots <= p - 1);
      REQUIRE_FALSE(seen[slots]);
      seen[slots] = true;
    }
  }
}

TEST_CASE("scheduler config is validated", "[scheduler]") {
  CHECK_THROWS_AS(make_scheduler({0, 5, 0.001, 0.0}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(make_scheduler({6, 5, 0.001, 0.0}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(make_scheduler({1, 5, 0.0, 0.0}, 0.0), std::invalid_argument);
}

TEST_CASE("listen window defaults to two frames", "[scheduler]") {
  auto s = make_scheduler({2, 5, 0.001, 0.0}, 0.25);
  CHECK(s.phase == SchedulerPhase::listening);
  CHECK_THAT(s.listen_deadline, WithinAbs(0.25 + 0.010, 1e-15));
  CHECK_THAT(scheduler_wakeup(s), WithinAbs(0.26, 1e-15));

  auto custom = make_scheduler({2, 5, 0.001, 0.003}, 0.0);
  CHECK_THAT(custom.listen_deadline, WithinAbs(0.003, 1e-15));
}

TEST_CASE("a reception anchors the next transmit time", "[scheduler]") {
  auto s = make_scheduler({3, 5, 0.001, 0.0}, 0.0);
  auto cmd = scheduler_step(s, SchedReception{1, 0.1});
  CHECK_FALSE(cmd.has_value());
  CHECK(s.phase == SchedulerPhase::joined);
  CHECK_THAT(s.next_tx, WithinAbs(0.102, 1e-15));
  CHECK_THAT(scheduler_wakeup(s), WithinAbs(0.102, 1e-15));

  // A later reception from a different sender re-anchors.
  scheduler_step(s, SchedReception{5, 0.1005});
  CHECK_THAT(s.next_tx, WithinAbs(0.1035, 1e-15));
}

TEST_CASE("own broadcast schedules one frame ahead", "[scheduler]") {
  auto s = make_scheduler({2, 5, 0.001, 0.0}, 0.0);
  scheduler_step(s, SchedReception{1, 0.099});
  auto cmd = scheduler_step(s, SchedOwnBroadcast{0.100});
  CHECK_FALSE(cmd.has_value());
  CHECK_THAT(s.next_tx, WithinAbs(0.105, 1e-15));
}

TEST_CASE("timer at the transmit instant fires a broadcast", "[scheduler]") {
  auto s = make_scheduler({3, 5, 0.001, 0.0}, 0.0);
  scheduler_step(s, SchedReception{1, 0.1});
  CHECK_FALSE(scheduler_step(s, SchedTimer{0.1015}).has_value());
  // Fire at the stored deadline itself; a recomputed 0.102 literal can differ
  // from 0.1 + 0.002 by one ulp.
  auto cmd = scheduler_step(s, SchedTimer{s.next_tx});
  REQUIRE(cmd.has_value());
  CHECK_THAT(cmd->local_time, WithinAbs(0.102, 1e-12));
}

TEST_CASE("stale timers superseded by a re-anchor do nothing", "[scheduler]") {
  auto s = make_scheduler({3, 5, 0.001, 0.0}, 0.0);
  scheduler_step(s, SchedReception{1, 0.1});  // next_tx 0.102
  scheduler_step(s, SchedReception{2, 0.1021});  // re-anchored to 0.1031
  auto cmd = scheduler_step(s, SchedTimer{0.102});
  CHECK_FALSE(cmd.has_value());
  auto cmd2 = scheduler_step(s, SchedTimer{s.next_tx});
  REQUIRE(cmd2.has_value());
  CHECK_THAT(cmd2->local_time, WithinAbs(0.1031, 1e-12));
}

TEST_CASE("listen expiry seeds the cycle immediately", "[scheduler]") {
  auto s = make_scheduler({1, 5, 0.001, 0.0}, 0.0);
  CHECK_FALSE(scheduler_step(s, SchedTimer{0.0099}).has_value());
  auto cmd = scheduler_step(s, SchedTimer{s.listen_deadline});
  REQUIRE(cmd.has_value());
  CHECK_THAT(cmd->local_time, WithinAbs(0.010, 1e-12));
  CHECK(s.phase == SchedulerPhase::joined);
}

TEST_CASE("a reception during the listen window joins without broadcasting", "[scheduler]") {
  auto s = make_scheduler({4, 5, 0.001, 0.0}, 0.0);
  auto cmd = scheduler_step(s, SchedReception{2, 0.0042});
  CHECK_FALSE(cmd.has_value());
  CHECK(s.phase == SchedulerPhase::joined);
  CHECK_THAT(s.next_tx, WithinAbs(0.0042 + 0.002, 1e-15));
  // The old listen deadline timer is now stale.
  CHECK_FALSE(scheduler_step(s, SchedTimer{0.0043}).has_value());
}

TEST_CASE("a full ring settles into collision-free slots", "[scheduler]") {
  // Drive five schedulers with ideal clocks through a few frames and verify
  // the emission order and spacing.
  const int p = 5;
  const double slot = 0.001;
  std::vector<SchedulerState> s;
  for (AgentId id = 1; id <= p; ++id)
    s.push_back(make_scheduler({id, p, slot, 0.0}, 0.0));

  // Agent 1's listen window expires first in a fresh network (same deadline
  // for all here, so seed agent 1 manually at its deadline).
  std::vector<std::pair<double, AgentId>> log;
  double t = 0.010;
  auto cmd = scheduler_step(s[0], SchedTimer{t});
  REQUIRE(cmd.has_value());
  log.push_back({t, 1});
  scheduler_step(s[0], SchedOwnBroadcast{t});
  for (int k = 1; k < p; ++k) scheduler_step(s[k], SchedReception{1, t});

  for (int step = 0; step < 20; ++step) {
    // Next firing is the smallest wakeup among joined agents.
    double best = std::numeric_limits<double>::infinity();
    int who = -1;
    for (int k = 0; k < p; ++k) {
      if (scheduler_wakeup(s[k]) < best) {
        best = scheduler_wakeup(s[k]);
        who = k;
      }
    }
    auto fire = scheduler_step(s[who], SchedTimer{best});
    REQUIRE(fire.has_value());
    log.push_back({best, who + 1});
    scheduler_step(s[who], SchedOwnBroadcast{best});
    for (int k = 0; k < p; ++k)
      if (k != who) scheduler_step(s[k], SchedReception{who + 1, best});
  }

  for (std::size_t k = 1; k < log.size(); ++k) {
    REQUIRE_THAT(log[k].first - log[k - 1].first, WithinAbs(slot, 1e-12));
    REQUIRE(log[k].second == static_cast<AgentId>(log[k - 1].second % p + 1));
  }
}
