#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "decoric/rng.hpp"
#include "decoric/types.hpp"

namespace decoric {

struct MacParams {
  std::uint32_t n = 50;               // maximum node count
  std::uint32_t max_retries = 2;      // maxR
  std::vector<std::uint32_t> max_be;  // one entry per attempt 0..maxR; empty means 3 everywhere
  Tick tau_symb = 320;                // unit backoff period
  Tick tau_cca = 128;
  Tick tau_fr = 2400;                 // 75-byte PPDU at 250 kbps
  Tick tau_ifs = 640;                 // LIFS
  Tick min_round = 800'000;
  Tick round_granularity = 100'000;   // 0 disables rounding

  std::uint32_t be(std::uint32_t i) const;
  void validate() const;
};

Tick worst_case_backoff(std::uint32_t i, const MacParams& p);
// Exact round formula, no rounding or clamping.
Tick round_formula(const MacParams& p);
// round_formula rounded up to the granularity, then clamped below by min_round.
Tick round_duration(const MacParams& p);

std::uint64_t gcd_u64(std::uint64_t a, std::uint64_t b);
// h * LCM(a/h, b/h) with h = GCD(a, b).
std::uint64_t cycle_length(std::uint64_t txn_freq, std::uint64_t rdc_rate);
// Rounds after which a round boundary and an RDC period realign, plus a drift margin.
std::uint32_t cycle_rounds(Tick round, std::uint32_t rdc_rate, std::uint32_t drift_margin = 1);

struct RdcParams {
  std::uint32_t rdc_rate = 32;
  double duty_fraction = 0.04;
  Tick txn_freq = 800'000;

  Tick period() const;
  Tick window() const;
  void validate() const;
};

Tick rdc_offset(NodeId node, std::uint64_t seed, const RdcParams& r);
bool rdc_schedule(NodeId node, Tick t, const RdcParams& r, std::uint64_t seed = 0);
// Time the receiver is on within [a, b) for a window of length `window` every `period` starting at `offset`.
Tick rdc_on_time(Tick offset, Tick period, Tick window, Tick a, Tick b);
// Start of the first on-window that intersects [a, b), or nullopt.
std::optional<Tick> rdc_first_on(Tick offset, Tick period, Tick window, Tick a, Tick b);

// Unslotted CSMA-CA stepper shared by the engine and the contention model.
class Csma {
 public:
  enum class Result { Transmit, Retry, Drop };

  explicit Csma(const MacParams& p) : p_(&p) {}
  // Returns the tick at which the CCA completes for the current stage.
  Tick begin(Tick now, Rng& rng);
  // Outcome of the CCA that completed at `now`. On Retry, next_cca() is valid.
  Result on_cca(Tick now, bool busy, Rng& rng);
  Tick next_cca() const { return next_cca_; }
  std::uint32_t stage() const { return stage_; }

 private:
  Tick draw(Tick now, Rng& rng) const;
  const MacParams* p_;
  std::uint32_t stage_ = 0;
  Tick next_cca_ = 0;
};

struct CsmaOutcome {
  bool sent = false;
  Tick at = 0;  // start of transmission when sent, drop time otherwise
  std::uint32_t attempts = 0;
};

// Single transmitter against a channel-busy predicate evaluated at each CCA completion.
CsmaOutcome csma_transmit(Tick t, const std::function<bool(Tick)>& busy, const MacParams& p, Rng& rng);

struct ContentionResult {
  std::vector<std::optional<Tick>> first_sent;  // per contender, start of first transmission
  std::uint32_t drops = 0;
  std::uint32_t collisions = 0;  // pairs of overlapping transmissions
};

// n contenders in one collision domain, each wanting one frame inside [0, round). Each picks
// a uniform start in the round's transmit window and re-attempts after a drop.
ContentionResult simulate_contention(std::uint32_t n, const MacParams& p, Tick round, std::uint64_t seed);

}  // namespace decoric
