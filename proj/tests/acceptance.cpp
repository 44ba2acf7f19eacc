// Acceptance suite: one [PASS]/[FAIL] line per criterion. Exit status is nonzero if any fails.
#include <atomic>
#include <chrono>
#include <deque>
#include <functional>
#include <limits>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include "decoric/config.hpp"
#include "decoric/metrics.hpp"
#include "decoric/rng.hpp"
#include "decoric/sweep.hpp"
#include "fixture.hpp"

using namespace decoric;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::atomic<std::uint64_t> g_snapshots{0}, g_unconserved{0};

// Every acceptance run goes through here so conservation is checked everywhere.
Trace checked_run(const ScenarioConfig& c, std::uint64_t seed) {
  Trace t = run(make_run_spec(c, seed), seed);
  for (const auto* s : t.all<Snapshot>()) {
    ++g_snapshots;
    for (const auto& n : s->nodes)
      if (!n.conserved) ++g_unconserved;
  }
  return t;
}

template <class F>
void parallel_for(std::size_t n, F f) {
  const std::size_t workers = std::min<std::size_t>(worker_count(), std::max<std::size_t>(n, 1));
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t k; (k = next++) < n;) f(k);
    });
  for (auto& t : pool) t.join();
}

struct Line {
  int id;
  std::string name;
  bool pass;
  std::string detail;
};
std::vector<Line> g_lines;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  g_lines.push_back({id, name, pass, detail});
  std::cout << (pass ? "[PASS] " : "[FAIL] ") << id << ". " << name << ": " << detail << std::endl;
}

std::string fmt(double v, int prec = 3) {
  std::ostringstream os;
  os.precision(prec);
  os << std::fixed << v;
  return os.str();
}

const Snapshot* snapshot_at(const Trace& t, Tick at) {
  const Snapshot* last = nullptr;
  for (const auto* s : t.all<Snapshot>())
    if (s->t <= at) last = s;
  return last;
}

const Snapshot* first_settled(const Trace& t) {
  for (const auto* s : t.all<Snapshot>())
    if (s->settled) return s;
  return nullptr;
}

// 1 -------------------------------------------------------------------------------------------
void worked_example() {
  const auto t0 = std::chrono::steady_clock::now();
  const ScenarioConfig c = config_from_json(fixture::worked_example(20, 40));
  const Trace t = checked_run(c, 1);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::vector<std::string> bad;
  const Snapshot* early = snapshot_at(t, seconds_to_ticks(0.8));
  std::uint16_t deg3 = 0;
  if (early)
    for (const auto& n : early->nodes)
      if (n.id == 3) deg3 = n.degree;
  if (deg3 != 7) bad.push_back("degree(3)=" + std::to_string(deg3));

  // each node announces its role when it leaves Election; bridges appear during Correction
  std::set<NodeId> elected, bridges;
  std::map<NodeId, Tick> left_election;
  for (const auto* n : t.all<NoteRecord>()) {
    if (n->t >= seconds_to_ticks(19)) break;
    if (n->note.kind == NoteKind::PhaseChange && n->note.a == static_cast<int>(Phase::Election) &&
        n->note.b == static_cast<int>(Phase::Correction))
      left_election.emplace(n->node, n->t);
    if (n->note.kind == NoteKind::RoleChange && n->note.a == static_cast<int>(Role::CH) && left_election.count(n->node) &&
        left_election.at(n->node) == n->t)
      elected.insert(n->node);
    if (n->note.kind == NoteKind::Bridge) bridges.insert(n->node);
  }
  if (elected != std::set<NodeId>{3, 4, 8, 9, 11}) bad.push_back("elected CH set differs");
  if (bridges != std::set<NodeId>{10}) bad.push_back("bridge set differs");

  const auto before = fixture::outcome_at(t, seconds_to_ticks(19));
  if (!before.ch_of.count(14) || before.ch_of.at(14) != 3) bad.push_back("node 14 not a member of 3");
  if (before.heads != std::set<NodeId>{3, 4, 8, 9, 10, 11}) bad.push_back("stable head set differs");

  std::set<NodeId> reelected;
  for (const auto* n : t.all<NoteRecord>())
    if (n->t >= seconds_to_ticks(20) && n->note.kind == NoteKind::ElectionTrigger) reelected.insert(n->node);
  const auto after = fixture::outcome_at(t, t.horizon);
  if (!reelected.count(12) || !reelected.count(13)) bad.push_back("12/13 did not re-elect");
  if (!after.heads.count(12) || after.heads.count(13) || !after.ch_of.count(13) || after.ch_of.at(13) != 12)
    bad.push_back("12 is not CH of 13 after the kill");
  if (secs >= 1.0) bad.push_back("runtime " + fmt(secs) + " s");

  std::string d = "degree(3)=" + std::to_string(deg3) + ", elected {";
  for (NodeId h : elected) d += std::to_string(h) + " ";
  d += "}, bridge {";
  for (NodeId h : bridges) d += std::to_string(h) + " ";
  d += "}, after kill(4): 12 CH with 13=" + (after.ch_of.count(13) ? std::to_string(after.ch_of.at(13)) : "?") +
       ", runtime " + fmt(secs) + " s";
  for (const auto& b : bad) d += "; " + b;
  report(1, "worked example golden trace", bad.empty(), d);
}

// 2 -------------------------------------------------------------------------------------------
struct Injection {
  ChangeKind kind;
  bool add = false;
  NodeId node = 0;
  Point pos;
};

std::optional<Injection> choose_injection(ChangeKind kind, const ScenarioConfig& base, std::uint64_t seed,
                                          const Trace& pre, Tick at) {
  const Snapshot* s = snapshot_at(pre, at);
  if (!s) return std::nullopt;
  Rng rng(mix_seed(seed, 1000 + static_cast<std::uint64_t>(kind)));
  Injection inj{kind};
  if (kind == ChangeKind::ChFail || kind == ChangeKind::BridgeFail || kind == ChangeKind::MemberFail) {
    const Role want = kind == ChangeKind::ChFail ? Role::CH : kind == ChangeKind::BridgeFail ? Role::BridgeCH : Role::Member;
    std::vector<NodeId> pool;
    for (const auto& n : s->nodes)
      if (n.alive && n.role == want && n.phase == Phase::Stable) pool.push_back(n.id);
    if (pool.empty()) return std::nullopt;
    inj.node = pool[rng.below(pool.size())];
    return inj;
  }
  // adds: find a spot whose degree is clearly below / above the CH it would join
  const Topology topo = make_topology(base, seed);
  std::map<NodeId, const NodeSnap*> by_id;
  for (const auto& n : s->nodes) by_id[n.id] = &n;
  for (int attempt = 0; attempt < 500; ++attempt) {
    const Point p{rng.unit() * base.width, rng.unit() * base.height};
    int deg = 0;
    std::optional<std::pair<NodeId, std::uint16_t>> best;
    for (const auto& [id, q] : topo.positions) {
      const auto* n = by_id.at(id);
      if (!n->alive) continue;
      const double d = std::hypot(p.x - q.x, p.y - q.y);
      if (d > topo.radio_range) continue;
      ++deg;
      const bool head = n->role == Role::CH || n->role == Role::BridgeCH;
      if (head && topo.path_loss.rssi_at(d) >= topo.rssi_threshold &&
          (!best || election_prefers(n->degree, id, best->second, best->first, base.decoric)))
        best = std::make_pair(id, n->degree);
    }
    if (!best) continue;
    // high joiners need a margin the joiner still wins with a few lost neighbour frames
    const int high = std::max(best->second + 4, (best->second * 23 + 19) / 20);
    const bool ok = kind == ChangeKind::AddLow ? deg + 2 <= best->second : deg >= high;
    if (!ok) continue;
    inj.add = true;
    inj.node = topo.next_free_id();
    inj.pos = p;
    return inj;
  }
  return std::nullopt;
}

void table_two() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<ChangeKind> kinds{ChangeKind::ChFail, ChangeKind::BridgeFail, ChangeKind::MemberFail,
                                      ChangeKind::AddLow, ChangeKind::AddHigh};
  const double inject_s = 20;
  const std::size_t want = 100, max_seeds = 1500, batch = 100;
  const ScenarioConfig base = config_from_json(json::object());
  struct Result {
    bool applicable = false;
    ResilienceSample sample;
    bool kind_ok = true;
  };
  std::vector<std::vector<Result>> results;
  std::vector<std::size_t> have(kinds.size(), 0);
  // bridges are scarce, so seeds are drawn in batches until every kind has its samples
  for (std::size_t from = 0; from < max_seeds; from += batch) {
    std::vector<bool> need(kinds.size());
    bool any = false;
    for (std::size_t k = 0; k < kinds.size(); ++k) any |= (need[k] = have[k] < want);
    if (!any) break;
    results.resize(from + batch, std::vector<Result>(kinds.size()));
    parallel_for(batch, [&](std::size_t j) {
      const std::size_t i = from + j;
      const std::uint64_t seed = i + 1;
      ScenarioConfig pre_cfg = config_from_json({{"horizon_s", inject_s}, {"trace", {{"level", "summary"}}}});
      const Trace pre = checked_run(pre_cfg, seed);
      for (std::size_t k = 0; k < kinds.size(); ++k) {
        if (!need[k]) continue;
        const auto inj = choose_injection(kinds[k], base, seed, pre, seconds_to_ticks(inject_s));
        if (!inj) continue;
        json f = {{"t_s", inject_s}, {"action", inj->add ? "add" : "kill"}, {"node", inj->node}};
        if (inj->add) {
          f["x"] = inj->pos.x;
          f["y"] = inj->pos.y;
        }
        const double horizon = inj->add ? inject_s + 20 : inject_s + 90;
        const ScenarioConfig c = config_from_json({{"horizon_s", horizon}, {"faults", {f}},
                                                    {"trace", {{"level", inj->add ? "events" : "full"}}}});
        const Trace t = checked_run(c, seed);
        const auto samples = resilience_latencies(t, fault_plan(c), resilience_bounds(c));
        Result& r = results[i][k];
        r.applicable = true;
        r.sample = samples.at(0);
        r.kind_ok = r.sample.kind == kinds[k];
      }
    });
    for (std::size_t k = 0; k < kinds.size(); ++k)
      for (std::size_t j = 0; j < batch; ++j) have[k] += results[from + j][k].applicable ? 1 : 0;
  }
  const std::size_t max_seeds_run = results.size();

  bool pass = true;
  std::string detail;
  std::vector<std::string> failures;
  for (std::size_t k = 0; k < kinds.size(); ++k) {
    std::size_t n = 0, within = 0, last_seed = 0, per_kind_failures = 0, strict = 0, misread = 0;
    double dmin = 1e9, dmax = -1e9, rmax = 0;
    for (std::size_t i = 0; i < max_seeds_run && n < want; ++i) {
      const Result& r = results[i][k];
      if (!r.applicable) continue;
      ++n;
      last_seed = i + 1;
      const bool ok = r.kind_ok && r.sample.within;
      within += ok ? 1 : 0;
      misread += r.kind_ok ? 0 : 1;
      if (r.sample.detection_rounds) {
        dmin = std::min(dmin, *r.sample.detection_rounds);
        dmax = std::max(dmax, *r.sample.detection_rounds);
      }
      if (r.sample.recovery_rounds) rmax = std::max(rmax, *r.sample.recovery_rounds);
      const auto& lt = r.sample.detection_from_last_tx_rounds;
      const Window win = r.sample.detection_window;
      strict += lt && *lt >= win.lo - 1e-9 && *lt <= win.hi + 1e-9 ? 1 : 0;
      if (!ok && per_kind_failures++ < 3)
        failures.push_back(std::string(to_string(kinds[k])) + " seed " + std::to_string(i + 1) + " node " +
                           std::to_string(r.sample.node) + ": " + (r.kind_ok ? r.sample.why : "observed as " + std::string(to_string(r.sample.kind))));
    }
    const Window dw = detection_window(kinds[k], resilience_bounds(base));
    const Window rw = recovery_window(kinds[k]);
    pass = pass && n == want && within == n;
    detail += std::string(k ? "; " : "") + to_string(kinds[k]) + " " + std::to_string(within) + "/" + std::to_string(n) +
              " (" + std::to_string(misread) + " observed as another kind, seeds 1-" + std::to_string(last_seed) + ", detection " + fmt(dmin, 2) + "-" + fmt(dmax, 2) + " in [" +
              fmt(dw.lo, 1) + "," + fmt(dw.hi, 1) + "], recovery max " + fmt(rmax, 2) + " of " + fmt(rw.hi, 0) +
              (k < 3 ? ", " + std::to_string(strict) + " inside when timed from the victim's last send" : std::string()) + ")";
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  detail += "; " + fmt(secs, 1) + " s";
  for (const auto& f : failures) detail += "\n       " + f;
  report(2, "resilience reaction times", pass, detail);
}

// 3 -------------------------------------------------------------------------------------------
void timing() {
  Rng rng(2024);
  std::size_t mism = 0;
  for (int k = 0; k < 1000; ++k) {
    MacParams p;
    p.n = static_cast<std::uint32_t>(rng.range(0, 400));
    p.max_retries = static_cast<std::uint32_t>(rng.range(0, 6));
    p.max_be.clear();
    for (std::uint32_t i = 0; i <= p.max_retries; ++i) p.max_be.push_back(static_cast<std::uint32_t>(rng.range(1, 10)));
    p.tau_symb = rng.range(1, 2000);
    p.tau_cca = rng.range(0, 1000);
    p.tau_fr = rng.range(1, 10000);
    p.tau_ifs = rng.range(0, 5000);
    std::int64_t per_node = p.tau_fr + p.tau_ifs;
    for (std::uint32_t i = 0; i <= p.max_retries; ++i) {
      std::int64_t pow2 = 1;
      for (std::uint32_t b = 0; b < p.max_be[i]; ++b) pow2 += pow2;
      per_node += (pow2 - 1) * p.tau_symb + 2 * p.tau_cca;
    }
    std::int64_t sum = 0;
    for (std::uint32_t n = 0; n < p.n; ++n) sum += per_node;
    if (round_formula(p) != sum) ++mism;
    const auto a = static_cast<std::uint64_t>(rng.range(1, 20000));
    const auto b = static_cast<std::uint64_t>(rng.range(1, 20000));
    std::uint64_t lcm = a;
    while (lcm % b != 0) lcm += a;
    if (cycle_length(a, b) != lcm) ++mism;
  }
  const ScenarioConfig c = config_from_json(json::object());
  const auto cyc = c.cycle();
  const bool pass = mism == 0 && cyc == 6 && c.round_len() == 800'000;
  report(3, "timing formulas", pass,
         std::to_string(mism) + " mismatches over 1000 random sets; scenario round " + fmt(ticks_to_seconds(c.round_len()), 1) +
             " s, cycle " + std::to_string(cyc) + " rounds");
}

// 4 -------------------------------------------------------------------------------------------
void guarantees() {
  const std::size_t seeds = 100;
  std::vector<SetupCheck> setup(seeds);
  std::vector<CycleCheck> cyc(seeds);
  std::vector<std::size_t> triggers(seeds);
  parallel_for(seeds, [&](std::size_t i) {
    const ScenarioConfig c = config_from_json({{"horizon_s", 120}, {"trace", {{"level", "full"}}}});
    const Trace t = checked_run(c, i + 1);
    setup[i] = setup_round_guarantee(t);
    cyc[i] = cycle_guarantee(t);
    for (const auto* n : t.all<NoteRecord>())
      if (n->note.kind == NoteKind::ElectionTrigger) ++triggers[i];
  });
  std::size_t sr = 0, sv = 0, cw = 0, cv = 0, tr = 0;
  std::string where;
  for (std::size_t i = 0; i < seeds; ++i) {
    sr += setup[i].rounds;
    sv += setup[i].violations;
    cw += cyc[i].windows;
    cv += cyc[i].violations;
    tr += triggers[i];
    if ((setup[i].violations || cyc[i].violations) && where.size() < 200) where += " seed " + std::to_string(i + 1);
  }
  report(4, "round and cycle guarantees", sv == 0 && cv == 0,
         "setup rounds without a frame " + std::to_string(sv) + "/" + std::to_string(sr) + ", member cycles without a CH frame " +
             std::to_string(cv) + "/" + std::to_string(cw) + " (100 seeds x 120 s; re-elections on static networks: " +
             std::to_string(tr) + ")" + where);
}

// 5 -------------------------------------------------------------------------------------------
// Fewest radio hops between heads of two different cluster-graph components. 2 means a member of one
// cluster hears the other head, so a bridge could have joined them; 3 or more is beyond single-hop
// bridging. 0 means some component holds no head at all (members whose chosen CH never took the role).
int head_gap(const Snapshot& snap, const Topology& topo) {
  const ClusterSnapshot cs = cluster_snapshot(snap, topo);
  std::map<NodeId, NodeId> parent;
  std::map<NodeId, Role> role;
  for (const auto& n : cs.nodes) {
    parent[n.id] = n.id;
    role[n.id] = n.role;
  }
  std::function<NodeId(NodeId)> find = [&](NodeId a) { return parent[a] == a ? a : parent[a] = find(parent[a]); };
  for (const auto& [a, b] : cs.edges) parent[find(a)] = find(b);
  auto head = [&](NodeId id) { return role[id] == Role::CH || role[id] == Role::BridgeCH; };
  std::set<NodeId> comps, headed;
  for (const auto& n : cs.nodes) {
    if (n.role == Role::Dead) continue;
    comps.insert(find(n.id));
    if (head(n.id)) headed.insert(find(n.id));
  }
  if (comps.size() > headed.size()) return 0;
  int best = std::numeric_limits<int>::max();
  for (const auto& h : cs.nodes) {
    if (!head(h.id)) continue;
    std::map<NodeId, int> dist{{h.id, 0}};
    std::deque<NodeId> q{h.id};
    while (!q.empty() && dist[q.front()] + 1 < best) {
      const NodeId u = q.front();
      q.pop_front();
      for (const auto& n : cs.nodes) {
        if (n.role == Role::Dead || dist.count(n.id) || !in_range(u, n.id, topo)) continue;
        dist[n.id] = dist[u] + 1;
        q.push_back(n.id);
        if (head(n.id) && find(n.id) != find(h.id)) best = std::min(best, dist[n.id]);
      }
    }
  }
  return best;
}

void connectivity(const fs::path& archive) {
  std::string detail;
  bool pass = true;
  std::ofstream log;
  for (std::size_t n : {50, 100, 200}) {
    // seeds whose unit-disk graph at 20 m is connected; each run continues 30 s into Stable
    const json cfg = {{"n_nodes", n}, {"radio_range", 20}, {"horizon_s", 60}, {"stop_after_settled_s", 30},
                      {"trace", {{"level", "summary"}}}};
    const ScenarioConfig c = config_from_json(cfg);
    std::vector<std::uint64_t> seeds;
    std::size_t tried = 0;
    for (std::uint64_t s = 1; seeds.size() < 100 && s < 2'000'000; ++s) {
      ++tried;
      if (is_connected(make_topology(c, s))) seeds.push_back(s);
    }
    std::vector<double> ratio(seeds.size(), -1), later(seeds.size(), -1);
    std::vector<int> gap(seeds.size(), -1);
    parallel_for(seeds.size(), [&](std::size_t i) {
      const Trace t = checked_run(c, seeds[i]);
      const Snapshot* s = first_settled(t);
      if (!s) return;
      ratio[i] = connectivity_ratio(*s, t.topology);
      later[i] = connectivity_ratio(*t.all<Snapshot>().back(), t.topology);
      if (ratio[i] >= 1.0) return;
      gap[i] = head_gap(*s, t.topology);
      static std::mutex m;
      std::lock_guard<std::mutex> lock(m);
      fs::create_directories(archive);
      const std::string stem = "connectivity_n" + std::to_string(n) + "_seed" + std::to_string(seeds[i]);
      std::ofstream(archive / (stem + ".topo")) << topology_to_text(t.topology);
      std::ofstream(archive / (stem + ".json")) << c.doc.dump(2) << '\n';
    });
    std::size_t full = 0, orphan = 0, bridgeable = 0, beyond = 0, healed = 0;
    double worst = 1.0;
    if (!log.is_open() && std::any_of(ratio.begin(), ratio.end(), [](double r) { return r < 1.0; })) {
      fs::create_directories(archive);
      log.open(archive / "connectivity_failures.txt");
      log << "n seed ratio_at_stable_entry ratio_30s_later head_gap\n";
    }
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      worst = std::min(worst, ratio[i]);
      if (ratio[i] >= 1.0) {
        ++full;
        continue;
      }
      orphan += gap[i] == 0 ? 1 : 0;
      bridgeable += gap[i] == 2 ? 1 : 0;
      beyond += gap[i] >= 3 ? 1 : 0;
      healed += later[i] >= 1.0 ? 1 : 0;
      log << n << ' ' << seeds[i] << ' ' << ratio[i] << ' ' << later[i] << ' ' << gap[i] << '\n';
    }
    const bool ok = seeds.size() == 100 && full >= 95;
    pass = pass && ok;
    detail += (detail.empty() ? "" : "; ") + std::string("N=") + std::to_string(n) + " " + std::to_string(full) + "/" +
              std::to_string(seeds.size()) + " at 1.0 (worst " + fmt(worst) + ", " + std::to_string(tried) +
              " topologies drawn; failures: " + std::to_string(beyond) + " heads >= 3 hops apart, " +
              std::to_string(bridgeable) + " with a member hearing a foreign head (no bridge formed), " + std::to_string(orphan) +
              " orphaned members; " + std::to_string(healed) + " reach 1.0 within 30 s of Stable)";
  }
  report(5, "connectivity at 20 m range", pass, detail + "; failures archived under " + archive.string());
}

// 6 -------------------------------------------------------------------------------------------
void ch_counts() {
  const std::vector<double> thresholds{-45, -65, -85};
  std::vector<double> mean(3), worst(3);
  for (std::size_t k = 0; k < 3; ++k) {
    const ScenarioConfig c = config_from_json({{"n_nodes", 100}, {"rssi_threshold", thresholds[k]}, {"horizon_s", 40},
                                               {"stop_after_settled_s", 1}, {"trace", {{"level", "summary"}}}});
    std::vector<double> count(100, 0);
    parallel_for(100, [&](std::size_t i) {
      const Trace t = checked_run(c, i + 1);
      const Snapshot* s = first_settled(t);
      count[i] = s ? static_cast<double>(ch_count(*s)) : 0;
    });
    mean[k] = std::accumulate(count.begin(), count.end(), 0.0) / 100.0;
    worst[k] = *std::max_element(count.begin(), count.end());
  }
  const bool pass = mean[0] > mean[1] && mean[1] > mean[2] && mean[2] >= 8 && mean[2] <= 20 && mean[1] >= 12 && mean[1] <= 25;
  report(6, "CH count vs RSSI threshold", pass,
         "N=100, 100 seeds: mean (worst) " + fmt(mean[0], 2) + " (" + fmt(worst[0], 0) + ") at -45 dBm, " + fmt(mean[1], 2) +
             " (" + fmt(worst[1], 0) + ") at -65 dBm, " + fmt(mean[2], 2) + " (" + fmt(worst[2], 0) +
             ") at -85 dBm; reference means 17 at -65, 13 at -85");
}

// 7 -------------------------------------------------------------------------------------------
void power() {
  const std::vector<std::string> protos{"decoric", "leach", "beem"};
  const std::size_t seeds = 20;
  const double horizon = 4000;
  std::vector<std::vector<double>> pw(3, std::vector<double>(seeds)), death(3, std::vector<double>(seeds));
  parallel_for(3 * seeds, [&](std::size_t j) {
    const std::size_t k = j / seeds, i = j % seeds;
    const ScenarioConfig c = config_from_json(
        {{"protocol", protos[k]}, {"horizon_s", horizon}, {"trace", {{"level", "summary"}, {"snapshot_rounds", 50}}}});
    const Trace t = checked_run(c, i + 1);
    const PowerStats ps = power_stats(t);
    pw[k][i] = ps.network_avg_mw;
    death[k][i] = ps.first_death_s.value_or(horizon);  // none within the horizon counts as the horizon
  });
  auto avg = [](const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); };
  const double pd = avg(pw[0]), pl = avg(pw[1]), pb = avg(pw[2]);
  const double dd = avg(death[0]), dl = avg(death[1]), db = avg(death[2]);
  const bool pass = pd < pl && pl < pb && dd > dl && dd > db;
  report(7, "power against LEACH and BEEM", pass,
         "N=50, 20 seeds, " + fmt(horizon, 0) + " s: power " + fmt(pd) + " / " + fmt(pl) + " / " + fmt(pb) +
             " mW (DeCoRIC/LEACH/BEEM), first death " + fmt(dd, 1) + " / " + fmt(dl, 1) + " / " + fmt(db, 1) +
             " s; power saving vs LEACH " + fmt(100 * (pl - pd) / pl, 1) + "%, vs BEEM " + fmt(100 * (pb - pd) / pb, 1) +
             "% (reference best cases 70% and 110%); lifetime gain vs LEACH " + fmt(100 * (dd - dl) / dl, 1) +
             "%, vs BEEM " + fmt(100 * (dd - db) / db, 1) + "% (reference 42% and 109%)");
}

// 8 -------------------------------------------------------------------------------------------
void determinism() {
  std::vector<json> cfgs = {
      {{"horizon_s", 30}, {"trace", {{"level", "full"}}}},
      {{"horizon_s", 40}, {"faults", {{{"t_s", 12}, {"action", "kill"}, {"node", 3}}}}, {"trace", {{"level", "full"}}}},
      {{"protocol", "leach"}, {"horizon_s", 30}, {"trace", {{"level", "full"}}}},
      {{"protocol", "beem"}, {"horizon_s", 30}, {"trace", {{"level", "full"}}}},
  };
  std::size_t identical = 0, total = 0;
  for (const auto& j : cfgs) {
    const ScenarioConfig c = config_from_json(j);
    for (bool binary : {false, true}) {
      const std::string a = trace_to_string(checked_run(c, 11), binary);
      const std::string b = trace_to_string(checked_run(c, 11), binary);
      ++total;
      identical += a == b ? 1 : 0;
    }
  }
  const bool pass = identical == total && g_unconserved == 0 && g_snapshots > 0;
  report(8, "determinism and energy conservation", pass,
         std::to_string(identical) + "/" + std::to_string(total) + " trace pairs byte-identical; " +
             std::to_string(g_unconserved.load()) + " conservation failures over " + std::to_string(g_snapshots.load()) +
             " snapshots of all acceptance runs so far");
}

// 9 -------------------------------------------------------------------------------------------
void fail_counter() {
  const auto results = fixture::fail_counter_scripts();
  std::size_t ok = 0;
  std::string bad;
  for (const auto& r : results) {
    ok += r.ok ? 1 : 0;
    if (!r.ok) bad += "; " + r.name + " (" + r.detail + ")";
  }
  report(9, "fail-counter scripts", ok == results.size(),
         std::to_string(ok) + "/" + std::to_string(results.size()) + " scripted sequences match" + bad);
}

}  // namespace

int main(int argc, char** argv) {
  // optional: a list of criterion numbers to run
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  auto want = [&](int k) { return only.empty() || only.count(k); };
  const fs::path archive = fs::current_path() / "acceptance_archive";
  if (want(1)) worked_example();
  if (want(3)) timing();
  if (want(9)) fail_counter();
  if (want(4)) guarantees();
  if (want(6)) ch_counts();
  if (want(5)) connectivity(archive);
  if (want(2)) table_two();
  if (want(7)) power();
  if (want(8)) determinism();
  std::size_t passed = 0;
  for (const auto& l : g_lines) passed += l.pass ? 1 : 0;
  std::cout << passed << "/" << g_lines.size() << " criteria passed" << std::endl;
  return passed == g_lines.size() ? 0 : 1;
}
