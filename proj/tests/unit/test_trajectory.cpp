#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "relsync/trajectory.hpp"

using namespace relsync;
using Catch::Matchers::WithinAbs;

TEST_CASE("fixed point ignores time", "[trajectory]") {
  auto t = TrajectorySpec::fixed_point({0.0, 0.0});
  CHECK(position_at(t, 0.0) == Vec2(0.0, 0.0));
  CHECK(position_at(t, 123.456) == Vec2(0.0, 0.0));
}

TEST_CASE("linear path integrates velocity", "[trajectory]") {
  auto t = TrajectorySpec::linear_path({40.0, 0.0}, {1.0, 0.0});
  Vec2 p = position_at(t, 2.0);
  CHECK_THAT(p.x(), WithinAbs(42.0, 1e-15));
  CHECK_THAT(p.y(), WithinAbs(0.0, 1e-15));
}

TEST_CASE("circle reaches the antipode after half a period", "[trajectory]") {
  auto t = TrajectorySpec::circle({0.0, 0.0}, 0.8665, 0.14, 0.0);
  CHECK(position_at(t, 0.0) == Vec2(0.8665, 0.0));
  Vec2 half = position_at(t, std::numbers::pi / 0.14);
  CHECK_THAT(half.x(), WithinAbs(-0.8665, 1e-12));
  CHECK_THAT(half.y(), WithinAbs(0.0, 1e-12));
}

TEST_CASE("circle respects the phase and stays on the radius", "[trajectory]") {
  auto t = TrajectorySpec::circle({2.5, 3.5}, 0.8665, 0.14, std::numbers::pi);
  Vec2 p0 = position_at(t, 0.0);
  CHECK_THAT(p0.x(), WithinAbs(2.5 - 0.8665, 1e-12));
  CHECK_THAT(p0.y(), WithinAbs(3.5, 1e-12));
  for (double tt : {0.3, 1.7, 9.2, 100.0}) {
    CHECK_THAT((position_at(t, tt) - Vec2(2.5, 3.5)).norm(), WithinAbs(0.8665, 1e-12));
  }
}

TEST_CASE("waypoints traverse at constant speed", "[trajectory]") {
  auto t = TrajectorySpec::waypoint_path({{0.0, 0.0}, {4.0, 0.0}, {4.0, 3.0}}, 2.0);
  // Leg one: 4 m at 2 m/s puts the corner at t = 2.
  CHECK(position_at(t, 0.0) == Vec2(0.0, 0.0));
  CHECK_THAT(position_at(t, 1.0).x(), WithinAbs(2.0, 1e-15));
  CHECK_THAT(position_at(t, 2.0).x(), WithinAbs(4.0, 1e-15));
  CHECK_THAT(position_at(t, 2.0).y(), WithinAbs(0.0, 1e-15));
  // Leg two heads up the y axis.
  CHECK_THAT(position_at(t, 3.0).y(), WithinAbs(2.0, 1e-15));
  // Consecutive samples always move by speed * dt until the end of the path.
  double d = (position_at(t, 1.25) - position_at(t, 1.0)).norm();
  CHECK_THAT(d, WithinAbs(0.5, 1e-12));
}

TEST_CASE("waypoints clamp at the final point", "[trajectory]") {
  auto t = TrajectorySpec::waypoint_path({{0.0, 0.0}, {4.0, 0.0}, {4.0, 3.0}}, 2.0);
  CHECK(position_at(t, 3.5) == Vec2(4.0, 3.0));
  CHECK(position_at(t, 1000.0) == Vec2(4.0, 3.0));
  CHECK(position_at(t, -1.0) == Vec2(0.0, 0.0));
}

TEST_CASE("waypoints tolerate zero-length segments", "[trajectory]") {
  auto t = TrajectorySpec::waypoint_path({{1.0, 1.0}, {1.0, 1.0}, {3.0, 1.0}}, 1.0);
  CHECK(position_at(t, 0.0) == Vec2(1.0, 1.0));
  CHECK_THAT(position_at(t, 1.0).x(), WithinAbs(2.0, 1e-15));
}

TEST_CASE("closed waypoint loops return to the start", "[trajectory]") {
  auto t = TrajectorySpec::waypoint_path(
      {{33.0, 15.0}, {23.0, 28.0}, {32.0, 34.0}, {37.0, 19.0}, {33.0, 15.0}}, 1.0);
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < t.points.size(); ++k)
    total += (t.points[k + 1] - t.points[k]).norm();
  Vec2 end = position_at(t, total);
  CHECK_THAT((end - Vec2(33.0, 15.0)).norm(), WithinAbs(0.0, 1e-9));
}

TEST_CASE("waypoint factory validates its arguments", "[trajectory]") {
  CHECK_THROWS_AS(TrajectorySpec::waypoint_path({{0.0, 0.0}}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(TrajectorySpec::waypoint_path({{0.0, 0.0}, {1.0, 0.0}}, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(TrajectorySpec::waypoint_path({{0.0, 0.0}, {1.0, 0.0}}, -2.0),
                  std::invalid_argument);
}
