#pragma once

#include <cstdint>
#include <vector>

#include "decoric/protocol.hpp"
#include "decoric/types.hpp"

namespace decoric {

// Energy is tracked in picojoules: uW * us = pJ keeps the integration exact.
struct PowerModel {
  std::int64_t tx_uw = 52'200;
  std::int64_t listen_uw = 59'100;
  std::int64_t cpu_uw = 5'400;
  std::int64_t lpm_uw = 164;
  std::int64_t battery_pj = 21'600'000'000'000;  // 6 mWh

  std::int64_t draw(int state) const;
  void validate() const;
};

enum class RadioState : std::uint8_t { Tx = 0, Listen = 1, Cpu = 2, Lpm = 3 };
const char* to_string(RadioState s);

struct StateTimes {
  Tick tx = 0, listen = 0, cpu = 0, lpm = 0;
  Tick& operator[](RadioState s);
  Tick total() const { return tx + listen + cpu + lpm; }
};

struct RdcWindow {
  Tick offset = 0, period = 1, window = 1;
};

// One node's battery. Time is integrated lazily: the engine calls advance() at every event
// touching the node; overrides describe known future activity (transmissions, extended
// listening, CPU work) and beat the base radio mode by priority tx > listen > cpu.
class EnergyLedger {
 public:
  EnergyLedger() = default;
  EnergyLedger(const PowerModel& pm, RdcWindow rdc, Tick start);

  // Integrates up to t. Returns false if the node is (now) dead.
  bool advance(Tick t);
  void set_mode(Tick t, RadioMode m);
  void add_override(Tick start, Tick end, RadioState s);
  void kill(Tick t);

  bool alive() const { return alive_; }
  Tick death_time() const { return death_; }
  Tick last() const { return last_; }
  RadioMode mode() const { return mode_; }
  std::int64_t consumed_pj() const { return consumed_; }
  std::int64_t residual_pj() const { return pm_.battery_pj - consumed_; }
  double residual_fraction() const;
  const StateTimes& times() const { return times_; }
  // initial == residual + sum(power(state) * time(state)), exactly.
  bool conserved() const;

 private:
  struct Ovr {
    Tick start, end;
    RadioState s;
  };
  // Energy and per-state time over [a, b) with the current mode and overrides.
  std::int64_t cost(Tick a, Tick b, StateTimes* out) const;
  void commit(Tick to);

  PowerModel pm_;
  RdcWindow rdc_;
  RadioMode mode_ = RadioMode::AlwaysOn;
  std::vector<Ovr> ovr_;
  Tick last_ = 0;
  std::int64_t consumed_ = 0;
  StateTimes times_;
  bool alive_ = true;
  Tick death_ = kNever;
};

// Constant-state drain for dt ticks starting at the ledger's current time.
void account_energy(EnergyLedger& ledger, RadioState s, Tick dt);

}  // namespace decoric
