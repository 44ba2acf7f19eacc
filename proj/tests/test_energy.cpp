#include <doctest.h>

#include "decoric/energy.hpp"
#include "decoric/mac_timing.hpp"

using namespace decoric;

namespace {
PowerModel flat(std::int64_t uw) {
  PowerModel pm;
  pm.tx_uw = pm.listen_uw = pm.cpu_uw = pm.lpm_uw = uw;
  return pm;
}
}  // namespace

TEST_CASE("constant 60 mW load empties 6 mWh in exactly 360 s") {
  EnergyLedger l(flat(60'000), RdcWindow{}, 0);
  CHECK(l.advance(seconds_to_ticks(359.0)));
  CHECK(l.alive());
  CHECK_FALSE(l.advance(seconds_to_ticks(400.0)));
  CHECK(l.death_time() == seconds_to_ticks(360.0));
  CHECK(l.residual_pj() == 0);
  CHECK(l.conserved());
  CHECK_FALSE(l.advance(seconds_to_ticks(500.0)));
  CHECK(l.death_time() == seconds_to_ticks(360.0));
}

TEST_CASE("death lands on the last tick the battery can pay for") {
  PowerModel pm = flat(7);
  pm.battery_pj = 100;  // 14 ticks cost 98, 15 would cost 105
  EnergyLedger l(pm, RdcWindow{}, 0);
  CHECK_FALSE(l.advance(1000));
  CHECK(l.death_time() == 14);
  CHECK(l.consumed_pj() == 98);
  CHECK(l.residual_pj() == 2);
  CHECK(l.conserved());
}

TEST_CASE("per-state times and energy follow the mode and overrides") {
  PowerModel pm;
  EnergyLedger l(pm, RdcWindow{0, 100, 10}, 0);
  l.set_mode(0, RadioMode::Off);
  l.advance(1000);
  CHECK(l.times().lpm == 1000);
  l.set_mode(1000, RadioMode::DutyCycled);
  l.advance(2000);  // windows at 1000, 1100, ... each 10 on
  CHECK(l.times().listen == 100);
  CHECK(l.times().lpm == 1900);
  l.add_override(2000, 2100, RadioState::Listen);
  l.add_override(2050, 2080, RadioState::Tx);  // tx beats listen
  l.add_override(2090, 2200, RadioState::Cpu);  // listen beats cpu where they overlap
  l.set_mode(2000, RadioMode::AlwaysOn);
  l.advance(2300);
  CHECK(l.times().tx == 30);
  CHECK(l.times().cpu == 100);
  CHECK(l.times().listen == 100 + 70 + 100);
  const std::int64_t expect = pm.tx_uw * l.times().tx + pm.listen_uw * l.times().listen + pm.cpu_uw * l.times().cpu +
                              pm.lpm_uw * l.times().lpm;
  CHECK(l.consumed_pj() == expect);
  CHECK(l.conserved());
  CHECK(l.times().total() == 2300);
}

TEST_CASE("lazy integration is independent of how often it is advanced") {
  PowerModel pm;
  RdcWindow w{37, 31'250, 1'250};
  EnergyLedger a(pm, w, 0), b(pm, w, 0);
  a.set_mode(0, RadioMode::DutyCycled);
  b.set_mode(0, RadioMode::DutyCycled);
  a.add_override(5'000, 9'000, RadioState::Tx);
  b.add_override(5'000, 9'000, RadioState::Tx);
  for (Tick t = 0; t <= 1'000'000; t += 997) a.advance(t);
  a.advance(1'000'000);
  b.advance(1'000'000);
  CHECK(a.consumed_pj() == b.consumed_pj());
  CHECK(a.times().listen == b.times().listen);
}

TEST_CASE("kill stops the drain") {
  EnergyLedger l(PowerModel{}, RdcWindow{}, 0);
  l.advance(100);
  l.kill(200);
  const auto used = l.consumed_pj();
  CHECK_FALSE(l.alive());
  CHECK_FALSE(l.advance(10'000));
  CHECK(l.consumed_pj() == used);
  CHECK(l.conserved());
}

TEST_CASE("power model validation") {
  PowerModel pm;
  CHECK_NOTHROW(pm.validate());
  pm.lpm_uw = -1;
  CHECK_THROWS(pm.validate());
}
