#include "decoric/mac_timing.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <string>

namespace decoric {

std::uint32_t MacParams::be(std::uint32_t i) const { return max_be.empty() ? 3u : max_be.at(i); }

void MacParams::validate() const {
  if (tau_symb <= 0 || tau_cca < 0 || tau_fr <= 0 || tau_ifs < 0) throw std::invalid_argument("mac: durations must be positive");
  if (!max_be.empty() && max_be.size() != max_retries + 1)
    throw std::invalid_argument("mac: max_be needs one entry per attempt (maxR + 1)");
  for (auto b : max_be)
    if (b < 1 || b > 20) throw std::invalid_argument("mac: max_be entries must be in [1, 20]");
  if (min_round < 0 || round_granularity < 0) throw std::invalid_argument("mac: negative round bounds");
}

Tick worst_case_backoff(std::uint32_t i, const MacParams& p) {
  if (i > p.max_retries) throw std::out_of_range("worst_case_backoff: retry index " + std::to_string(i) + " > maxR");
  return ((Tick{1} << p.be(i)) - 1) * p.tau_symb + 2 * p.tau_cca;
}

Tick round_formula(const MacParams& p) {
  Tick per_node = p.tau_fr + p.tau_ifs;
  for (std::uint32_t i = 0; i <= p.max_retries; ++i) per_node += worst_case_backoff(i, p);
  return static_cast<Tick>(p.n) * per_node;
}

Tick round_duration(const MacParams& p) {
  Tick r = round_formula(p);
  if (p.round_granularity > 0) r = (r + p.round_granularity - 1) / p.round_granularity * p.round_granularity;
  return std::max(r, p.min_round);
}

std::uint64_t gcd_u64(std::uint64_t a, std::uint64_t b) {
  while (b != 0) {
    const std::uint64_t t = a % b;
    a = b;
    b = t;
  }
  return a;
}

std::uint64_t cycle_length(std::uint64_t txn_freq, std::uint64_t rdc_rate) {
  if (txn_freq == 0 || rdc_rate == 0) throw std::invalid_argument("cycle_length: inputs must be positive");
  const std::uint64_t h = gcd_u64(txn_freq, rdc_rate);
  const std::uint64_t a = txn_freq / h, b = rdc_rate / h;
  // a and b are coprime, so LCM(a, b) = a * b
  return h * (a / gcd_u64(a, b) * b);
}

std::uint32_t cycle_rounds(Tick round, std::uint32_t rdc_rate, std::uint32_t drift_margin) {
  if (round <= 0 || rdc_rate == 0) throw std::invalid_argument("cycle_rounds: inputs must be positive");
  RdcParams r;
  r.rdc_rate = rdc_rate;
  const auto c = cycle_length(static_cast<std::uint64_t>(round), static_cast<std::uint64_t>(r.period()));
  return static_cast<std::uint32_t>(c / static_cast<std::uint64_t>(round)) + drift_margin;
}

Tick RdcParams::period() const { return (kTicksPerSecond + rdc_rate / 2) / rdc_rate; }

Tick RdcParams::window() const {
  if (duty_fraction >= 1.0) return period();
  return std::max<Tick>(1, static_cast<Tick>(std::llround(duty_fraction * static_cast<double>(period()))));
}

void RdcParams::validate() const {
  if (rdc_rate < 1) throw std::invalid_argument("rdc: rdc_rate must be >= 1");
  if (!(duty_fraction > 0.0) || duty_fraction > 1.0) throw std::invalid_argument("rdc: duty_fraction must be in (0, 1]");
}

Tick rdc_offset(NodeId node, std::uint64_t seed, const RdcParams& r) {
  return static_cast<Tick>(mix_seed(seed ^ 0x5dc0ffee, node) % static_cast<std::uint64_t>(r.period()));
}

bool rdc_schedule(NodeId node, Tick t, const RdcParams& r, std::uint64_t seed) {
  if (r.duty_fraction >= 1.0) return true;
  const Tick P = r.period();
  Tick phase = (t - rdc_offset(node, seed, r)) % P;
  if (phase < 0) phase += P;
  return phase < r.window();
}

namespace {
Tick floor_div(Tick a, Tick b) {
  Tick q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}
// on-time within [0, x) relative to the window grid that starts at 0
Tick on_prefix(Tick x, Tick period, Tick window) {
  const Tick k = floor_div(x, period);
  const Tick rem = x - k * period;
  return k * window + std::min(rem, window);
}
}  // namespace

Tick rdc_on_time(Tick offset, Tick period, Tick window, Tick a, Tick b) {
  if (b <= a) return 0;
  if (window >= period) return b - a;
  return on_prefix(b - offset, period, window) - on_prefix(a - offset, period, window);
}

std::optional<Tick> rdc_first_on(Tick offset, Tick period, Tick window, Tick a, Tick b) {
  if (b <= a) return std::nullopt;
  if (window >= period) return a;
  const Tick k = floor_div(a - offset, period);
  const Tick ws = offset + k * period;
  if (a < ws + window) return a;  // a is inside a window
  const Tick next = ws + period;
  if (next < b) return next;
  return std::nullopt;
}

Tick Csma::draw(Tick now, Rng& rng) const {
  const Tick units = rng.range(0, (Tick{1} << p_->be(stage_)) - 1);
  return now + units * p_->tau_symb + 2 * p_->tau_cca;
}

Tick Csma::begin(Tick now, Rng& rng) {
  stage_ = 0;
  next_cca_ = draw(now, rng);
  return next_cca_;
}

Csma::Result Csma::on_cca(Tick now, bool busy, Rng& rng) {
  if (!busy) return Result::Transmit;
  if (stage_ >= p_->max_retries) return Result::Drop;
  ++stage_;
  next_cca_ = draw(now, rng);
  return Result::Retry;
}

CsmaOutcome csma_transmit(Tick t, const std::function<bool(Tick)>& busy, const MacParams& p, Rng& rng) {
  Csma c(p);
  Tick at = c.begin(t, rng);
  CsmaOutcome out;
  for (;;) {
    ++out.attempts;
    switch (c.on_cca(at, busy(at), rng)) {
      case Csma::Result::Transmit:
        out.sent = true;
        out.at = at;
        return out;
      case Csma::Result::Drop:
        out.at = at;
        return out;
      case Csma::Result::Retry:
        at = c.next_cca();
        break;
    }
  }
}

ContentionResult simulate_contention(std::uint32_t n, const MacParams& p, Tick round, std::uint64_t seed) {
  ContentionResult res;
  res.first_sent.assign(n, std::nullopt);
  if (n == 0) return res;
  struct Ev {
    Tick t;
    std::uint32_t node;
    bool operator>(const Ev& o) const { return t != o.t ? t > o.t : node > o.node; }
  };
  std::priority_queue<Ev, std::vector<Ev>, std::greater<>> q;
  std::vector<Rng> rngs;
  std::vector<Csma> csma(n, Csma(p));
  std::vector<std::pair<Tick, Tick>> on_air;  // transmissions [start, end)
  Tick worst = 0;
  for (std::uint32_t i = 0; i <= p.max_retries; ++i) worst += worst_case_backoff(i, p);
  const Tick latest_start = std::max<Tick>(0, round - worst - p.tau_fr - p.tau_ifs);
  for (std::uint32_t i = 0; i < n; ++i) {
    rngs.emplace_back(mix_seed(seed, i));
    const Tick start = rngs[i].range(0, latest_start);
    q.push({csma[i].begin(start, rngs[i]), i});
  }
  while (!q.empty()) {
    const Ev e = q.top();
    q.pop();
    bool busy = false;
    for (const auto& [s, en] : on_air)
      if (s < e.t && en > e.t - 2 * p.tau_cca) busy = true;
    switch (csma[e.node].on_cca(e.t, busy, rngs[e.node])) {
      case Csma::Result::Transmit:
        for (const auto& [s, en] : on_air)
          if (s < e.t + p.tau_fr && en > e.t) ++res.collisions;
        on_air.emplace_back(e.t, e.t + p.tau_fr);
        res.first_sent[e.node] = e.t;
        break;
      case Csma::Result::Retry:
        q.push({csma[e.node].next_cca(), e.node});
        break;
      case Csma::Result::Drop: {
        ++res.drops;
        const Tick again = e.t + rngs[e.node].range(0, worst_case_backoff(0, p));
        if (again < round) q.push({csma[e.node].begin(again, rngs[e.node]), e.node});
        break;
      }
    }
  }
  return res;
}

}  // namespace decoric
