#include <doctest.h>

#include <map>
#include <set>

#include "decoric/baselines.hpp"
#include "decoric/config.hpp"
#include "decoric/rng.hpp"

using namespace decoric;

TEST_CASE("LEACH threshold") {
  CHECK(leach_threshold(0.1, 0, false) == doctest::Approx(0.1));
  CHECK(leach_threshold(0.1, 5, false) == doctest::Approx(0.1 / (1 - 0.5)));
  CHECK(leach_threshold(0.1, 9, false) == 1.0);
  CHECK(leach_threshold(0.1, 19, false) == 1.0);
  CHECK(leach_threshold(0.1, 3, true) == 0.0);
  CHECK(leach_rotation(0.1) == 10);
  CHECK(leach_rotation(0.3) == 4);
  CHECK(leach_rotation(0.25) == 4);
}

TEST_CASE("LEACH rotation fairness: each node heads exactly once per rotation") {
  const double p = 0.1;
  const std::uint64_t rot = leach_rotation(p);
  Rng rng(99);
  for (std::uint64_t cycle = 0; cycle < 5; ++cycle) {
    std::map<int, int> heads;
    std::set<int> done;
    for (std::uint64_t r = cycle * rot; r < (cycle + 1) * rot; ++r)
      for (int n = 0; n < 50; ++n)
        if (rng.chance(leach_threshold(p, r, done.count(n) != 0))) {
          ++heads[n];
          done.insert(n);
        }
    CHECK(heads.size() == 50);
    for (const auto& [n, k] : heads) CHECK(k == 1);
  }
}

TEST_CASE("BEEM candidate order: energy score, then degree, then id") {
  CHECK(beem_score(0.05, 0.5, 1.0) == doctest::Approx(0.025));
  CHECK(beem_score(0.05, 2.0, 1.0) == doctest::Approx(0.05));
  BeemCandidate a{4, 0.05, 3}, b{2, 0.05, 5}, c{1, 0.05, 5}, d{9, 0.06, 1};
  CHECK(beem_prefers(b, a));
  CHECK(beem_prefers(c, b));
  CHECK(beem_prefers(d, c));
  CHECK_FALSE(beem_prefers(a, a));
  CHECK(beem_quantize(0.05, 0.05) == 65535);
  CHECK(beem_quantize(0.0, 0.05) == 0);
}

TEST_CASE("epoch stages") {
  CHECK(epoch_stage(0) == EpochStage::Advert);
  CHECK(epoch_stage(1) == EpochStage::Join);
  CHECK(epoch_stage(2) == EpochStage::Schedule);
  CHECK(epoch_stage(3) == EpochStage::Steady);
  CHECK(epoch_stage(9) == EpochStage::Steady);
}

namespace {
// CH set in the middle of each epoch's steady state.
std::vector<std::set<NodeId>> heads_per_epoch(const Trace& t, std::uint32_t epoch, std::size_t epochs) {
  std::vector<std::set<NodeId>> out(epochs);
  for (const auto* s : t.all<Snapshot>()) {
    const auto k = static_cast<std::size_t>(s->t / t.round_len);
    if (s->t % t.round_len != 0 || k % epoch != 5 || k / epoch >= epochs) continue;
    for (const auto& n : s->nodes)
      if (n.alive && n.role == Role::CH) out[k / epoch].insert(n.id);
  }
  return out;
}
}  // namespace

TEST_CASE("LEACH in the engine rotates every node through the CH role") {
  const ScenarioConfig c = config_from_json({{"protocol", "leach"}, {"horizon_s", 170}, {"trace", {{"level", "summary"}}}});
  const Trace t = run(make_run_spec(c, 3), 3);
  const auto heads = heads_per_epoch(t, 10, 20);
  for (int rotation = 0; rotation < 2; ++rotation) {
    std::map<NodeId, int> count;
    for (int e = rotation * 10; e < rotation * 10 + 10; ++e)
      for (NodeId h : heads[static_cast<std::size_t>(e)]) ++count[h];
    CHECK(count.size() == 50);
    for (const auto& [n, k] : count) CHECK(k == 1);
  }
}

TEST_CASE("BEEM keeps its cluster heads across epochs") {
  const ScenarioConfig c = config_from_json({{"protocol", "beem"}, {"horizon_s", 100}, {"trace", {{"level", "summary"}}}});
  const Trace t = run(make_run_spec(c, 5), 5);
  // the first epoch starts after one hello round
  std::vector<std::set<NodeId>> heads;
  for (const auto* s : t.all<Snapshot>()) {
    const auto k = static_cast<std::size_t>(s->t / t.round_len);
    if (s->t % t.round_len != 0 || k < 1 || (k - 1) % 10 != 5) continue;
    std::set<NodeId> h;
    for (const auto& n : s->nodes)
      if (n.alive && n.role == Role::CH) h.insert(n.id);
    heads.push_back(h);
  }
  REQUIRE(heads.size() >= 10);
  CHECK_FALSE(heads.front().empty());
  for (std::size_t e = 1; e < heads.size(); ++e)
    for (NodeId h : heads[e - 1]) CHECK(heads[e].count(h));
}
