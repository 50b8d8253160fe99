#pragma once

#include <Eigen/Core>

namespace relsync {

using Vec2 = Eigen::Vector2d;

// Agent ids are 1-based: parents occupy [1 .. P], children [P+1 .. P+C].
using AgentId = int;

// Signal propagation speed in m/s. Fixed constant, not a configuration knob.
inline constexpr double kSpeedOfLight = 299792458.0;

}  // namespace relsync
