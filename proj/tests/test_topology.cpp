#include <doctest.h>

#include <cmath>

#include "decoric/topology.hpp"
#include "fixture.hpp"

using namespace decoric;

TEST_CASE("path loss is calibrated to the sensitivity at the range edge") {
  const PathLoss p = calibrate_path_loss(50.0, -67.0);
  CHECK(p.rssi_at(50.0) == doctest::Approx(-67.0));
  // free space: 6.02 dB per doubling
  CHECK(p.rssi_at(25.0) - p.rssi_at(50.0) == doctest::Approx(20.0 * std::log10(2.0)));
  CHECK(p.distance_for(p.rssi_at(33.3)) == doctest::Approx(33.3));
  CHECK(p.rssi_at(0.1) == p.rssi_at(1.0));  // clamped at d0
}

TEST_CASE("link classes follow range and threshold") {
  Topology t;
  t.positions = {{0, {0, 0}}, {1, {10, 0}}, {2, {45, 0}}, {3, {60, 0}}};
  t.radio_range = 50;
  t.rssi_threshold = -65;
  t.path_loss = calibrate_path_loss(50, -67);
  CHECK(classify_link(0, 1, t) == LinkClass::Potential);
  CHECK(classify_link(0, 2, t) == LinkClass::External);
  CHECK(classify_link(0, 3, t) == LinkClass::OutOfRange);
  CHECK(classify_link(0, 0, t) == LinkClass::OutOfRange);
  CHECK(classify_link(1, 2, t) == LinkClass::Potential);
  // symmetric
  for (NodeId a = 0; a < 4; ++a)
    for (NodeId b = 0; b < 4; ++b) CHECK(classify_link(a, b, t) == classify_link(b, a, t));
}

TEST_CASE("random topologies are seeded and inside the area") {
  const Topology a = generate_random_topology(50, 100, 100, 9);
  const Topology b = generate_random_topology(50, 100, 100, 9);
  const Topology c = generate_random_topology(50, 100, 100, 10);
  CHECK(topology_to_text(a) == topology_to_text(b));
  CHECK(topology_to_text(a) != topology_to_text(c));
  for (const auto& [id, p] : a.positions) {
    CHECK(p.x >= 0);
    CHECK(p.x <= 100);
    CHECK(p.y >= 0);
    CHECK(p.y <= 100);
  }
  CHECK_THROWS(generate_random_topology(0, 100, 100, 1));
}

TEST_CASE("text round trip is exact") {
  const Topology a = generate_random_topology(30, 80, 60, 4);
  const Topology b = topology_from_text(topology_to_text(a));
  REQUIRE(b.positions.size() == a.positions.size());
  for (const auto& [id, p] : a.positions) {
    CHECK(b.positions.at(id).x == p.x);
    CHECK(b.positions.at(id).y == p.y);
  }
  CHECK_THROWS(topology_from_text("# area 10 10\n1 20 5\n"));
  CHECK_THROWS(topology_from_text("1 2 3\n1 4 5\n"));
}

TEST_CASE("connectivity of the unit-disk graph") {
  Topology t;
  t.radio_range = 10;
  t.positions = {{0, {0, 0}}, {1, {9, 0}}, {2, {18, 0}}};
  CHECK(is_connected(t));
  t.positions[2] = {19.5, 0};
  CHECK_FALSE(is_connected(t));
}

TEST_CASE("worked example topology has the intended neighbour relations") {
  Topology t = load_topology(fixture::path("worked_example.topo"));
  t.path_loss = calibrate_path_loss(t.radio_range, -67.0);
  auto nbrs = [&](NodeId a) {
    std::vector<NodeId> out;
    for (NodeId b : t.ids())
      if (in_range(a, b, t)) out.push_back(b);
    return out;
  };
  CHECK(nbrs(3).size() == 7);
  for (NodeId m : {1, 2, 5, 7, 10, 14}) {
    CHECK(classify_link(3, m, t) == LinkClass::Potential);
    CHECK(nbrs(m).size() < 7);
  }
  CHECK(classify_link(3, 8, t) == LinkClass::External);
  CHECK(nbrs(10).size() == nbrs(14).size());
  CHECK(nbrs(4) == std::vector<NodeId>{9, 12, 13});
  CHECK_FALSE(in_range(6, 13, t));
  CHECK_FALSE(in_range(6, 3, t));
  for (NodeId m : {1, 2, 5, 7})
    for (NodeId o : {8, 9}) CHECK_FALSE(in_range(m, o, t));
}
