#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "relsync/types.hpp"

namespace relsync {

enum class TrajectoryKind { fixed, linear, circular, waypoints };

// Planar motion profile queried by absolute time. Waypoint paths are traversed
// at constant speed and clamp at the final point.
struct TrajectorySpec {
  TrajectoryKind kind = TrajectoryKind::fixed;
  Vec2 start = Vec2::Zero();     // fixed / linear
  Vec2 velocity = Vec2::Zero();  // linear
  Vec2 center = Vec2::Zero();    // circular
  double radius = 0.0;           // circular
  double rate = 0.0;             // circular, rad/s
  double phase = 0.0;            // circular, rad
  std::vector<Vec2> points;      // waypoints
  double speed = 0.0;            // waypoints, m/s

  static TrajectorySpec fixed_point(const Vec2& p) {
    TrajectorySpec t;
    t.kind = TrajectoryKind::fixed;
    t.start = p;
    return t;
  }
  static TrajectorySpec linear_path(const Vec2& p, const Vec2& v) {
    TrajectorySpec t;
    t.kind = TrajectoryKind::linear;
    t.start = p;
    t.velocity = v;
    return t;
  }
  static TrajectorySpec circle(const Vec2& c, double radius, double rate, double phase) {
    TrajectorySpec t;
    t.kind = TrajectoryKind::circular;
    t.center = c;
    t.radius = radius;
    t.rate = rate;
    t.phase = phase;
    return t;
  }
  static TrajectorySpec waypoint_path(std::vector<Vec2> pts, double speed) {
    if (pts.size() < 2) throw std::invalid_argument("waypoint_path: need at least 2 points");
    if (!(speed > 0.0)) throw std::invalid_argument("waypoint_path: speed must be > 0");
    TrajectorySpec t;
    t.kind = TrajectoryKind::waypoints;
    t.points = std::move(pts);
    t.speed = speed;
    return t;
  }
};

inline Vec2 position_at(const TrajectorySpec& traj, double t) {
  switch (traj.kind) {
    case TrajectoryKind::fixed:
      return traj.start;
    case TrajectoryKind::linear:
      return traj.start + t * traj.velocity;
    case TrajectoryKind::circular: {
      const double a = traj.phase + traj.rate * t;
      return traj.center + traj.radius * Vec2(std::cos(a), std::sin(a));
    }
    case TrajectoryKind::waypoints: {
      double s = traj.speed * std::max(t, 0.0);
      for (std::size_t k = 0; k + 1 < traj.points.size(); ++k) {
        const Vec2 seg = traj.points[k + 1] - traj.points[k];
        const double len = seg.norm();
        if (len == 0.0) continue;
        if (s <= len) return Vec2(traj.points[k] + (s / len) * seg);
        s -= len;
      }
      return traj.points.back();
    }
  }
  return traj.start;
}

}  // namespace relsync
