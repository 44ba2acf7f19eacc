#include "decoric/rng.hpp"

#include "decoric/types.hpp"

namespace decoric {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ (stream * 0xD1B54A32D192ED03ull));
}

std::uint64_t Rng::below(std::uint64_t n) {
  // rejection sampling keeps the result unbiased
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - (std::numeric_limits<std::uint64_t>::max() % n);
  std::uint64_t v;
  do {
    v = gen_();
  } while (v >= limit);
  return v % n;
}

std::int64_t Rng::range(std::int64_t lo, std::int64_t hi) {
  if (hi <= lo) return lo;
  return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
}

double Rng::unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

const char* to_string(Phase p) {
  switch (p) {
    case Phase::Discovery: return "discovery";
    case Phase::Election: return "election";
    case Phase::Correction: return "correction";
    case Phase::Stable: return "stable";
  }
  return "?";
}

const char* to_string(Role r) {
  switch (r) {
    case Role::CH: return "ch";
    case Role::BridgeCH: return "bridge";
    case Role::Member: return "member";
    case Role::Dead: return "dead";
  }
  return "?";
}

}  // namespace decoric
