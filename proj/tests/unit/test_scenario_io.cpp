#include <catch2/catch_amalgamated.hpp>

#include <string>

#include "relsync/scenario_io.hpp"

using namespace relsync;
using Catch::Matchers::ContainsSubstring;

namespace {

// Smallest parseable scenario: three static parents.
std::string minimal_text() {
  return "[scenario]\n"
         "name = mini\n"
         "num_parents = 3\n"
         "slot_interval = 0.001\n"
         "duration = 1\n"
         "[agent 1]\ntrajectory = static(0, 0)\n"
         "[agent 2]\ntrajectory = static(40, 0)\n"
         "[agent 3]\ntrajectory = static(40, 56.4)\n";
}

int line_of(const std::string& text, void (*check)(const std::string&)) {
  try {
    check(text);
  } catch (const ScenarioParseError& e) {
    return e.line();
  }
  return -1;
}

void parse_discard(const std::string& t) { (void)parse_scenario(t); }

}  // namespace

TEST_CASE("a minimal scenario parses with defaults filled in", "[scenario_io]") {
  Scenario sc = parse_scenario(minimal_text());
  CHECK(sc.name == "mini");
  CHECK(sc.num_parents == 3);
  CHECK(sc.num_children == 0);
  CHECK(sc.slot_interval == 0.001);
  CHECK(sc.duration == 1.0);
  CHECK(sc.seed == 1);
  CHECK(sc.warmup == 5.0);
  CHECK(sc.reference == 1);
  CHECK(sc.jlas_use_skew_term);
  CHECK(sc.clock.noise.s_nT == 4.7e-20);
  CHECK(sc.clock.noise.s_nW == 7.5e-20);
  CHECK(sc.radio.xi == 0.0);
  CHECK(sc.agents.size() == 3);
  CHECK(sc.agents[1].trajectory.kind == TrajectoryKind::fixed);
  CHECK(sc.agents[1].trajectory.start == Vec2(40.0, 0.0));
  CHECK_FALSE(sc.agents[0].initial_offset.has_value());
}

TEST_CASE("all sections and value forms are honored", "[scenario_io]") {
  std::string text =
      "# full-width example\n"
      "[scenario]\n"
      "name = full\n"
      "num_parents = 4\n"
      "num_children = 1\n"
      "slot_interval = 0.002\n"
      "duration = 12.5\n"
      "seed = 42\n"
      "warmup = 2.5   # trailing comment\n"
      "reference = 2\n"
      "jlas_use_skew_term = false\n"
      "[clock]\n"
      "s_nT = 1e-20\n"
      "s_nW = 2e-20\n"
      "initial_offset = uniform(-1e-7, 1e-7)\n"
      "initial_skew_ppm = 3\n"
      "[radio]\n"
      "xi = 2e-10\n"
      "loss_prob = 0.05\n"
      "airtime = 0.0004\n"
      "antenna_delay_tx = 1e-9\n"
      "antenna_delay_rx = 2e-9\n"
      "[protocol]\n"
      "listen_window = 0.05\n"
      "cov_threshold = 1e-18\n"
      "[fault]\n"
      "clock_step_agent = 3\n"
      "clock_step_t = 6\n"
      "clock_step_delta = 0.0002\n"
      "[agent 1]\ntrajectory = static(0, 0)\n"
      "[agent 2]\ntrajectory = linear(40, 0, 0.1, 0)\ninitial_offset = 2e-7\n"
      "[agent 3]\ntrajectory = circular(35, 56.4, 5, 0.2, 0)\ninitial_skew_ppm = -4\n"
      "[agent 4]\ntrajectory = waypoints(1, 33, 15, 23, 28, 33, 15)\npower_on = 0.5\n"
      "[agent 5]\ntrajectory = static(20, 20)\n";
  Scenario sc = parse_scenario(text);
  CHECK(sc.num_parents == 4);
  CHECK(sc.num_children == 1);
  CHECK(sc.seed == 42);
  CHECK(sc.reference == 2);
  CHECK_FALSE(sc.jlas_use_skew_term);
  CHECK(sc.clock.initial_offset_lo == -1e-7);
  CHECK(sc.clock.initial_offset_hi == 1e-7);
  CHECK(sc.clock.initial_skew_ppm_lo == 3.0);
  CHECK(sc.clock.initial_skew_ppm_hi == 3.0);
  CHECK(sc.radio.loss_prob == 0.05);
  CHECK(sc.protocol.listen_window == 0.05);
  CHECK(sc.protocol.cov_threshold == 1e-18);
  REQUIRE(sc.clock_step.has_value());
  CHECK(sc.clock_step->agent == 3);
  CHECK(sc.clock_step->t == 6.0);
  CHECK(sc.clock_step->delta == 0.0002);
  CHECK(sc.agents[1].trajectory.kind == TrajectoryKind::linear);
  CHECK(sc.agents[1].initial_offset == 2e-7);
  CHECK(sc.agents[2].trajectory.kind == TrajectoryKind::circular);
  CHECK(sc.agents[2].initial_skew_ppm == -4.0);
  CHECK(sc.agents[3].trajectory.kind == TrajectoryKind::waypoints);
  CHECK(sc.agents[3].trajectory.points.size() == 3);
  CHECK(sc.agents[3].trajectory.speed == 1.0);
  CHECK(sc.agents[3].power_on == 0.5);
}

TEST_CASE("parse errors carry the offending line number", "[scenario_io]") {
  // duplicate key
  std::string dup_key =
      "[scenario]\n"
      "name = a\n"
      "name = b\n";
  CHECK(line_of(dup_key, parse_discard) == 3);

  // duplicate section
  std::string dup_sec = "[scenario]\nname = a\n[clock]\ns_nT = 1e-20\n[scenario]\n";
  CHECK(line_of(dup_sec, parse_discard) == 5);

  // key before any section
  CHECK(line_of("name = a\n[scenario]\n", parse_discard) == 1);

  // unterminated header
  CHECK(line_of("[scenario\nname = a\n", parse_discard) == 1);

  // missing '='
  CHECK(line_of("[scenario]\njust words\n", parse_discard) == 2);

  // empty value
  CHECK(line_of("[scenario]\nname =\n", parse_discard) == 2);
}

TEST_CASE("unknown sections and keys are rejected with their line", "[scenario_io]") {
  std::string bad_sec = minimal_text() + "[radios]\nxi = 1e-10\n";
  try {
    parse_scenario(bad_sec);
    FAIL("expected ScenarioParseError");
  } catch (const ScenarioParseError& e) {
    CHECK_THAT(e.what(), ContainsSubstring("unknown section"));
    CHECK_THAT(e.what(), ContainsSubstring("radios"));
  }

  std::string bad_key = minimal_text() + "[radio]\nxl = 1e-10\n";
  try {
    parse_scenario(bad_key);
    FAIL("expected ScenarioParseError");
  } catch (const ScenarioParseError& e) {
    CHECK_THAT(e.what(), ContainsSubstring("unknown key 'xl'"));
  }
}

TEST_CASE("malformed numbers, bools, and calls are rejected", "[scenario_io]") {
  CHECK_THROWS_AS(parse_scenario("[scenario]\nnum_parents = three\n"), ScenarioParseError);
  CHECK_THROWS_AS(parse_scenario("[scenario]\nnum_parents = 3.5\n"), ScenarioParseError);
  CHECK_THROWS_AS(parse_scenario("[scenario]\nduration = 1.0x\n"), ScenarioParseError);
  CHECK_THROWS_AS(parse_scenario("[scenario]\nseed = -4\n"), ScenarioParseError);
  CHECK_THROWS_AS(parse_scenario("[scenario]\njlas_use_skew_term = yes\n"), ScenarioParseError);

  auto with_traj = [](const std::string& t) {
    return "[scenario]\nname = x\nnum_parents = 3\nslot_interval = 0.001\nduration = 1\n"
           "[agent 1]\ntrajectory = " + t + "\n"
           "[agent 2]\ntrajectory = static(40, 0)\n"
           "[agent 3]\ntrajectory = static(40, 56.4)\n";
  };
  CHECK_THROWS_AS(parse_scenario(with_traj("static(0)")), ScenarioParseError);
  CHECK_THROWS_AS(parse_scenario(with_traj("static(0, 0, 0)")), ScenarioParseError);
  CHECK_THROWS_AS(parse_scenario(with_traj("orbit(1, 2)")), ScenarioParseError);
  CHECK_THROWS_AS(parse_scenario(with_traj("static(a, b)")), ScenarioParseError);
  CHECK_THROWS_AS(parse_scenario(with_traj("static")), ScenarioParseError);
  CHECK_THROWS_AS(parse_scenario(with_traj("waypoints(1, 0, 0)")), ScenarioParseError);
  CHECK_THROWS_AS(parse_scenario(with_traj("waypoints(1, 0, 0, 1, 1, 2)")), ScenarioParseError);
  CHECK_THROWS_AS(parse_scenario(with_traj("waypoints(0, 0, 0, 1, 1)")), ScenarioParseError);

  std::string bad_range =
      "[scenario]\nname = x\nnum_parents = 3\nslot_interval = 0.001\nduration = 1\n"
      "[clock]\ninitial_offset = gauss(0, 1)\n"
      "[agent 1]\ntrajectory = static(0, 0)\n"
      "[agent 2]\ntrajectory = static(40, 0)\n"
      "[agent 3]\ntrajectory = static(40, 56.4)\n";
  CHECK_THROWS_AS(parse_scenario(bad_range), ScenarioParseError);
}

TEST_CASE("incomplete fault sections are rejected", "[scenario_io]") {
  std::string text = minimal_text() + "[fault]\nclock_step_agent = 1\n";
  try {
    parse_scenario(text);
    FAIL("expected ScenarioParseError");
  } catch (const ScenarioParseError& e) {
    CHECK_THAT(e.what(), ContainsSubstring("clock_step_delta"));
  }
}

TEST_CASE("agent sections outside the declared range are rejected", "[scenario_io]") {
  std::string text = minimal_text() + "[agent 4]\ntrajectory = static(1, 1)\n";
  CHECK_THROWS_AS(parse_scenario(text), ScenarioParseError);
  std::string zero = minimal_text() + "[agent 0]\ntrajectory = static(1, 1)\n";
  CHECK_THROWS_AS(parse_scenario(zero), ScenarioParseError);
}

TEST_CASE("validation failures surface as parse errors", "[scenario_io]") {
  // Two parents only.
  std::string two =
      "[scenario]\nname = x\nnum_parents = 2\nslot_interval = 0.001\nduration = 1\n"
      "[agent 1]\ntrajectory = static(0, 0)\n"
      "[agent 2]\ntrajectory = static(40, 0)\n";
  try {
    parse_scenario(two);
    FAIL("expected ScenarioParseError");
  } catch (const ScenarioParseError& e) {
    CHECK_THAT(e.what(), ContainsSubstring("at least 3 parents"));
  }

  // Children need a fourth parent.
  std::string kids =
      "[scenario]\nname = x\nnum_parents = 3\nnum_children = 1\n"
      "slot_interval = 0.001\nduration = 1\n"
      "[agent 1]\ntrajectory = static(0, 0)\n"
      "[agent 2]\ntrajectory = static(40, 0)\n"
      "[agent 3]\ntrajectory = static(40, 56.4)\n"
      "[agent 4]\ntrajectory = static(20, 20)\n";
  CHECK_THROWS_AS(parse_scenario(kids), ScenarioParseError);

  // Reference must be a parent.
  std::string ref = minimal_text() + "[protocol]\nlisten_window = 0.01\n";
  ref.replace(ref.find("name = mini"), 11, "name = ref0\nreference = 9");
  CHECK_THROWS_AS(parse_scenario(ref), ScenarioParseError);
}

TEST_CASE("scenario text round-trips through the parser", "[scenario_io]") {
  Scenario sc = table1_scenario();
  sc.clock_step = ClockStepFault{2, 30.0, 1e-4};
  sc.agents[0].initial_offset = 1.5e-7;
  sc.agents[0].initial_skew_ppm = -2.25;
  sc.agents[4].power_on = 0.125;
  Scenario back = parse_scenario(scenario_text(sc));
  CHECK(back.name == sc.name);
  CHECK(back.num_parents == sc.num_parents);
  CHECK(back.num_children == sc.num_children);
  CHECK(back.slot_interval == sc.slot_interval);
  CHECK(back.duration == sc.duration);
  CHECK(back.seed == sc.seed);
  CHECK(back.warmup == sc.warmup);
  CHECK(back.clock.noise.s_nT == sc.clock.noise.s_nT);
  CHECK(back.clock.initial_offset_lo == sc.clock.initial_offset_lo);
  CHECK(back.radio.xi == sc.radio.xi);
  REQUIRE(back.clock_step.has_value());
  CHECK(back.clock_step->agent == 2);
  CHECK(back.clock_step->t == 30.0);
  CHECK(back.clock_step->delta == 1e-4);
  CHECK(back.agents[0].initial_offset == 1.5e-7);
  CHECK(back.agents[0].initial_skew_ppm == -2.25);
  CHECK(back.agents[4].power_on == 0.125);
  REQUIRE(back.agents.size() == sc.agents.size());
  for (size_t i = 0; i < sc.agents.size(); ++i) {
    const TrajectorySpec& a = back.agents[i].trajectory;
    const TrajectorySpec& b = sc.agents[i].trajectory;
    REQUIRE(a.kind == b.kind);
    CHECK(a.start == b.start);
    CHECK(a.velocity == b.velocity);
    CHECK(a.center == b.center);
    CHECK(a.radius == b.radius);
    CHECK(a.rate == b.rate);
    CHECK(a.phase == b.phase);
    CHECK(a.points == b.points);
    CHECK(a.speed == b.speed);
  }
}

TEST_CASE("bundled templates carry the published settings", "[scenario_io]") {
  auto t1 = scenario_template("table1");
  REQUIRE(t1.has_value());
  CHECK(t1->num_parents == 5);
  CHECK(t1->num_children == 3);
  CHECK(t1->slot_interval == 0.001);
  CHECK(t1->duration == 60.0);
  CHECK(t1->warmup == 5.0);
  CHECK(t1->radio.xi == 1.5e-10);
  CHECK(t1->clock.noise.s_nT == 4.7e-20);
  CHECK(t1->clock.noise.s_nW == 7.5e-20);
  CHECK(t1->clock.initial_offset_lo == -5e-7);
  CHECK(t1->clock.initial_offset_hi == 5e-7);
  CHECK(t1->clock.initial_skew_ppm_lo == -5.0);
  CHECK(t1->clock.initial_skew_ppm_hi == 5.0);
  CHECK_NOTHROW(validate_scenario(*t1));

  auto tt = scenario_template("turntable");
  REQUIRE(tt.has_value());
  CHECK(tt->num_parents == 4);
  CHECK(tt->num_children == 2);
  // Two children sharing one circle, half a turn apart: 1.733 m separation.
  const TrajectorySpec& c1 = tt->agents[4].trajectory;
  const TrajectorySpec& c2 = tt->agents[5].trajectory;
  CHECK(c1.kind == TrajectoryKind::circular);
  CHECK(c1.center == c2.center);
  CHECK(c1.radius == c2.radius);
  CHECK(2.0 * c1.radius == 1.733);
  CHECK_NOTHROW(validate_scenario(*tt));

  CHECK_FALSE(scenario_template("nope").has_value());
  CHECK(scenario_template_names().size() == 2);
}

TEST_CASE("comments and blank lines are ignored", "[scenario_io]") {
  std::string text =
      "# leading comment\n"
      "\n"
      "[scenario]   # section comment\n"
      "name = c   # key comment\n"
      "num_parents = 3\n"
      "slot_interval = 0.001\n"
      "duration = 0\n"
      "\n\n"
      "[agent 1]\ntrajectory = static(0, 0)\n"
      "[agent 2]\ntrajectory = static(40, 0)\n"
      "[agent 3]\ntrajectory = static(40, 56.4)\n";
  Scenario sc = parse_scenario(text);
  CHECK(sc.name == "c");
  CHECK(sc.duration == 0.0);
}
