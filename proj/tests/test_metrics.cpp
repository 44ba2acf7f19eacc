#include <doctest.h>

#include "decoric/metrics.hpp"

using namespace decoric;

namespace {

Topology line_topology(std::size_t n, double spacing, double range) {
  Topology t;
  t.width = spacing * static_cast<double>(n) + 1;
  t.height = 10;
  t.radio_range = range;
  for (std::size_t i = 0; i < n; ++i) t.positions[static_cast<NodeId>(i)] = {spacing * static_cast<double>(i), 0};
  return t;
}

NodeSnap snap(NodeId id, Role role, NodeId ch, bool alive = true) {
  NodeSnap s;
  s.id = id;
  s.alive = alive;
  s.phase = Phase::Stable;
  s.role = alive ? role : Role::Dead;
  s.ch = ch;
  return s;
}

}  // namespace

TEST_CASE("two disjoint clusters of 6 and 4 give 0.6") {
  // nodes 0..5 within 10 m of each other, 6..9 far away
  Topology t;
  t.width = t.height = 200;
  t.radio_range = 20;
  for (NodeId i = 0; i < 6; ++i) t.positions[i] = {static_cast<double>(i), 0};
  for (NodeId i = 6; i < 10; ++i) t.positions[i] = {150.0 + i, 0};
  Snapshot s;
  s.nodes.push_back(snap(0, Role::CH, 0));
  for (NodeId i = 1; i < 6; ++i) s.nodes.push_back(snap(i, Role::Member, 0));
  s.nodes.push_back(snap(6, Role::CH, 6));
  for (NodeId i = 7; i < 10; ++i) s.nodes.push_back(snap(i, Role::Member, 6));
  CHECK(connectivity_ratio(s, t) == doctest::Approx(0.6));
  CHECK(ch_count(s) == 2);
}

TEST_CASE("CHs in range of each other link their clusters") {
  const Topology t = line_topology(6, 10, 15);
  Snapshot s;
  s.nodes = {snap(0, Role::Member, 1), snap(1, Role::CH, 1), snap(2, Role::BridgeCH, 2),
             snap(3, Role::CH, 3),     snap(4, Role::Member, 3), snap(5, Role::Member, 3)};
  CHECK(connectivity_ratio(s, t) == doctest::Approx(1.0));
  CHECK(ch_count(s) == 3);
  // a member whose CH is dead is cut off
  s.nodes[1] = snap(1, Role::CH, 1, false);
  CHECK(connectivity_ratio(s, t) == doctest::Approx(4.0 / 5.0));
}

TEST_CASE("all singleton CHs out of range give 1/N") {
  const Topology t = line_topology(8, 30, 20);
  Snapshot s;
  for (NodeId i = 0; i < 8; ++i) s.nodes.push_back(snap(i, Role::CH, i));
  CHECK(connectivity_ratio(s, t) == doctest::Approx(1.0 / 8.0));
  CHECK(ch_count(s) == 8);
}

TEST_CASE("a snapshot without any head is an error") {
  Snapshot s;
  for (NodeId i = 0; i < 4; ++i) s.nodes.push_back(snap(i, Role::Member, 9));
  CHECK_THROWS(ch_count(s));
  Snapshot dead;
  dead.nodes.push_back(snap(0, Role::Member, 0, false));
  CHECK(ch_count(dead) == 0);
}

TEST_CASE("power statistics from a hand-built trace") {
  Trace t;
  t.horizon = 10 * kTicksPerSecond;
  Snapshot s;
  s.t = t.horizon;
  NodeSnap a = snap(0, Role::CH, 0);
  a.consumed_pj = 10'000'000'000;  // 10 mJ over 10 s = 1 mW
  a.times.lpm = 10 * kTicksPerSecond;
  NodeSnap b = snap(1, Role::Member, 0, false);
  b.consumed_pj = 20'000'000'000;  // died at 5 s: 4 mW
  b.times.listen = 5 * kTicksPerSecond;
  s.nodes = {a, b};
  t.records.push_back(DeathRecord{5 * kTicksPerSecond, 1, true});
  t.records.push_back(s);
  const PowerStats p = power_stats(t);
  REQUIRE(p.node_avg_mw.size() == 2);
  CHECK(p.node_avg_mw[0] == doctest::Approx(1.0));
  CHECK(p.node_avg_mw[1] == doctest::Approx(4.0));
  CHECK(p.network_avg_mw == doctest::Approx(2.5));
  REQUIRE(p.first_death_s.has_value());
  CHECK(*p.first_death_s == doctest::Approx(5.0));
}

TEST_CASE("resilience windows in rounds") {
  ResilienceBounds b;
  const Window ch = detection_window(ChangeKind::ChFail, b);
  CHECK(ch.lo == 12);
  CHECK(ch.hi == 15);
  const Window m = detection_window(ChangeKind::MemberFail, b);
  CHECK(m.lo == 72);
  CHECK(m.hi == 90);
  const Window add = detection_window(ChangeKind::AddLow, b);
  CHECK(add.lo == 3);
  CHECK(add.hi == 6);
  CHECK(recovery_window(ChangeKind::ChFail).hi == 2);
  CHECK(recovery_window(ChangeKind::MemberFail).hi == 0);
  CHECK(recovery_window(ChangeKind::AddHigh).hi == 3);
}
