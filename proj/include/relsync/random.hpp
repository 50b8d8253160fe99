#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

namespace relsync {

// Deterministic keyed random stream (splitmix64 core, Box-Muller normals).
//
// Every consumer of randomness owns a stream derived from the run's root seed
// plus a purpose tag and up to two ids, so adding or removing one consumer
// (an extra agent, an extra link) never shifts the draws seen by any other.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : state_(mix(seed ^ 0x9e3779b97f4a7c15ull)) {}

  static RandomStream derive(std::uint64_t root, std::uint64_t purpose,
                             std::uint64_t a = 0, std::uint64_t b = 0) {
    std::uint64_t h = mix(root ^ 0x2545f4914f6cdd1dull);
    h = mix(h ^ (purpose * 0x9e3779b97f4a7c15ull));
    h = mix(h ^ (a * 0xbf58476d1ce4e5b9ull));
    h = mix(h ^ (b * 0x94d049bb133111ebull));
    return RandomStream(h);
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    return mix(state_);
  }

  // Uniform on [0, 1).
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // One Box-Muller pair per call: consumes exactly two uniforms.
  std::pair<double, double> normal_pair() {
    const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(a), r * std::sin(a)};
  }

  // Single standard normal; draws a full pair and discards the second half so
  // the stream advances by a fixed amount per call.
  double normal() { return normal_pair().first; }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

namespace stream_purpose {
inline constexpr std::uint64_t kClockNoise = 1;     // per agent
inline constexpr std::uint64_t kStampingNoise = 2;  // per directed link
inline constexpr std::uint64_t kPacketLoss = 3;     // per directed link
inline constexpr std::uint64_t kInitialState = 4;   // per agent
}  // namespace stream_purpose

}  // namespace relsync
