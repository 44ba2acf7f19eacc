#include "decoric/energy.hpp"

#include <algorithm>
#include <stdexcept>

#include "decoric/mac_timing.hpp"

namespace decoric {

std::int64_t PowerModel::draw(int s) const {
  switch (static_cast<RadioState>(s)) {
    case RadioState::Tx: return tx_uw;
    case RadioState::Listen: return listen_uw;
    case RadioState::Cpu: return cpu_uw;
    case RadioState::Lpm: return lpm_uw;
  }
  return 0;
}

void PowerModel::validate() const {
  if (tx_uw < 0 || listen_uw < 0 || cpu_uw < 0 || lpm_uw < 0) throw std::invalid_argument("power draws must be >= 0");
  if (battery_pj <= 0) throw std::invalid_argument("battery must be positive");
}

const char* to_string(RadioState s) {
  switch (s) {
    case RadioState::Tx: return "tx";
    case RadioState::Listen: return "listen";
    case RadioState::Cpu: return "cpu";
    case RadioState::Lpm: return "lpm";
  }
  return "?";
}

Tick& StateTimes::operator[](RadioState s) {
  switch (s) {
    case RadioState::Tx: return tx;
    case RadioState::Listen: return listen;
    case RadioState::Cpu: return cpu;
    case RadioState::Lpm: break;
  }
  return lpm;
}

EnergyLedger::EnergyLedger(const PowerModel& pm, RdcWindow rdc, Tick start) : pm_(pm), rdc_(rdc), last_(start) {}

double EnergyLedger::residual_fraction() const {
  return static_cast<double>(residual_pj()) / static_cast<double>(pm_.battery_pj);
}

bool EnergyLedger::conserved() const {
  const std::int64_t used = pm_.tx_uw * times_.tx + pm_.listen_uw * times_.listen + pm_.cpu_uw * times_.cpu +
                            pm_.lpm_uw * times_.lpm;
  return used == consumed_ && residual_pj() >= 0 && residual_pj() + used == pm_.battery_pj;
}

std::int64_t EnergyLedger::cost(Tick a, Tick b, StateTimes* out) const {
  StateTimes t;
  if (b > a) {
    std::vector<Tick> cuts{a, b};
    for (const auto& o : ovr_) {
      if (o.end <= a || o.start >= b) continue;
      cuts.push_back(std::max(a, o.start));
      cuts.push_back(std::min(b, o.end));
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const Tick s = cuts[i], e = cuts[i + 1];
      int best = 4;
      for (const auto& o : ovr_)
        if (o.start <= s && o.end >= e) best = std::min(best, static_cast<int>(o.s));
      if (best < 4) {
        t[static_cast<RadioState>(best)] += e - s;
        continue;
      }
      switch (mode_) {
        case RadioMode::AlwaysOn: t.listen += e - s; break;
        case RadioMode::Off: t.lpm += e - s; break;
        case RadioMode::DutyCycled: {
          const Tick on = rdc_on_time(rdc_.offset, rdc_.period, rdc_.window, s, e);
          t.listen += on;
          t.lpm += (e - s) - on;
          break;
        }
      }
    }
  }
  if (out) *out = t;
  return pm_.tx_uw * t.tx + pm_.listen_uw * t.listen + pm_.cpu_uw * t.cpu + pm_.lpm_uw * t.lpm;
}

void EnergyLedger::commit(Tick to) {
  StateTimes t;
  consumed_ += cost(last_, to, &t);
  times_.tx += t.tx;
  times_.listen += t.listen;
  times_.cpu += t.cpu;
  times_.lpm += t.lpm;
  last_ = to;
  std::erase_if(ovr_, [&](const Ovr& o) { return o.end <= last_; });
}

bool EnergyLedger::advance(Tick t) {
  if (!alive_) return false;
  if (t <= last_) return true;
  const std::int64_t budget = pm_.battery_pj - consumed_;
  if (cost(last_, t, nullptr) <= budget) {
    commit(t);
    return true;
  }
  // last tick the battery can fully pay for
  Tick lo = last_, hi = t;
  while (hi - lo > 1) {
    const Tick mid = lo + (hi - lo) / 2;
    if (cost(last_, mid, nullptr) <= budget) lo = mid;
    else hi = mid;
  }
  commit(lo);
  alive_ = false;
  death_ = lo;
  ovr_.clear();
  return false;
}

void EnergyLedger::set_mode(Tick t, RadioMode m) {
  if (!advance(t)) return;
  mode_ = m;
}

void EnergyLedger::add_override(Tick start, Tick end, RadioState s) {
  if (!alive_) return;
  start = std::max(start, last_);
  if (end <= start) return;
  ovr_.push_back({start, end, s});
}

void EnergyLedger::kill(Tick t) {
  if (!alive_) return;
  advance(t);
  if (!alive_) return;
  alive_ = false;
  death_ = t;
  ovr_.clear();
}

void account_energy(EnergyLedger& ledger, RadioState s, Tick dt) {
  const Tick start = ledger.last();
  ledger.add_override(start, start + dt, s);
  ledger.advance(start + dt);
}

}  // namespace decoric
