#pragma once

#include <cstdint>
#include <limits>

namespace decoric {

using NodeId = std::uint16_t;
// Simulation time in integer microseconds.
using Tick = std::int64_t;

inline constexpr NodeId kNoNode = 0xFFFF;
inline constexpr Tick kTicksPerSecond = 1'000'000;
inline constexpr Tick kNever = std::numeric_limits<Tick>::max();

constexpr Tick seconds_to_ticks(double s) {
  return static_cast<Tick>(s * static_cast<double>(kTicksPerSecond) + (s >= 0 ? 0.5 : -0.5));
}
constexpr double ticks_to_seconds(Tick t) {
  return static_cast<double>(t) / static_cast<double>(kTicksPerSecond);
}

enum class Phase : std::uint8_t { Discovery, Election, Correction, Stable };
enum class Role : std::uint8_t { CH, BridgeCH, Member, Dead };

const char* to_string(Phase p);
const char* to_string(Role r);

}  // namespace decoric
