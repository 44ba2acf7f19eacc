#include <doctest.h>

#include <stdexcept>

#include "decoric/frame.hpp"
#include "decoric/rng.hpp"

using namespace decoric;

TEST_CASE("frame size for 200 nodes fits one MAC payload") {
  CHECK(encoded_size(200) == 58);
  CHECK(encoded_size(200) <= kMacPayloadMax);
  CHECK(encode(make_frame(3, 200), 200).size() == 58);
  // 432 nodes is the most two bitsets can carry
  CHECK(encoded_size(432) <= kMacPayloadMax);
  CHECK_THROWS(encode(make_frame(1, 433), 433));
}

TEST_CASE("discovery ping carries only the node id") {
  const Frame f = discovery_ping(17, 200);
  CHECK(f.node_id == 17);
  CHECK(f.neighbors.count() == 0);
  CHECK(f.connectivity.count() == 0);
  CHECK_FALSE(f.new_ch_id.has_value());
}

TEST_CASE("random frames round-trip exactly") {
  Rng rng(11);
  for (int k = 0; k < 500; ++k) {
    const std::size_t max_nodes = static_cast<std::size_t>(rng.range(1, 200));
    Frame f = make_frame(static_cast<NodeId>(rng.below(max_nodes)), max_nodes);
    f.ch_id = static_cast<NodeId>(rng.below(max_nodes));
    f.degree = static_cast<std::uint16_t>(rng.below(max_nodes));
    if (rng.chance(0.3)) f.new_ch_id = static_cast<NodeId>(rng.below(max_nodes));
    for (std::size_t i = 0; i < max_nodes; ++i) {
      if (rng.chance(0.2)) f.neighbors.set(static_cast<NodeId>(i));
      if (rng.chance(0.2)) f.connectivity.set(static_cast<NodeId>(i));
    }
    const auto bytes = encode(f, max_nodes);
    REQUIRE(bytes.size() == encoded_size(max_nodes));
    REQUIRE(decode(bytes, max_nodes) == f);
  }
}

TEST_CASE("decoder rejects malformed input") {
  auto bytes = encode(make_frame(1, 50), 50);
  CHECK_THROWS(decode(std::vector<std::uint8_t>(bytes.begin(), bytes.end() - 1), 50));
  bytes.back() |= 0x80;  // padding bit past node 49
  CHECK_THROWS(decode(bytes, 50));
  Frame bad = make_frame(1, 50);
  bad.ch_id = 60;
  CHECK_THROWS(encode(bad, 50));
}

TEST_CASE("decoder survives bit flips and length errors") {
  Rng rng(5);
  int accepted = 0, rejected = 0;
  for (int k = 0; k < 2000; ++k) {
    Frame f = make_frame(static_cast<NodeId>(rng.below(64)), 64);
    for (NodeId i = 0; i < 64; ++i)
      if (rng.chance(0.3)) f.neighbors.set(i);
    auto b = encode(f, 64);
    const auto flips = rng.range(1, 3);
    for (int i = 0; i < flips; ++i) b[rng.below(b.size())] ^= static_cast<std::uint8_t>(1u << rng.below(8));
    if (rng.chance(0.05)) b.push_back(0);
    try {
      const Frame g = decode(b, 64);
      REQUIRE(encode(g, 64) == b);
      ++accepted;
    } catch (const std::invalid_argument&) {
      ++rejected;
    }
  }
  CHECK(accepted > 0);
  CHECK(rejected > 0);
}
