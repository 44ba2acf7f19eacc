#include "fixture.hpp"

#include "decoric/metrics.hpp"

namespace fixture {

std::string path(const std::string& name) { return std::string(FIXTURE_DIR) + "/" + name; }

nlohmann::json worked_example(double kill_node4_at_s, double horizon_s) {
  nlohmann::json j = {{"area", {{"width", 130}, {"height", 120}}},
                      {"radio_range", 50},
                      {"rssi_threshold", -62.5},
                      {"topology", {{"source", "file"}, {"path", path("worked_example.topo")}}},
                      {"horizon_s", horizon_s},
                      {"trace", {{"level", "full"}}}};
  if (kill_node4_at_s >= 0) j["faults"] = {{{"t_s", kill_node4_at_s}, {"action", "kill"}, {"node", 4}}};
  return j;
}

Outcome outcome_at(const decoric::Trace& t, decoric::Tick at) {
  const decoric::Snapshot* last = nullptr;
  for (const auto* s : t.all<decoric::Snapshot>())
    if (s->t <= at) last = s;
  Outcome o;
  if (!last) return o;
  for (const auto& n : last->nodes) {
    if (!n.alive) continue;
    if (n.role == decoric::Role::CH || n.role == decoric::Role::BridgeCH) o.heads.insert(n.id);
    if (n.role == decoric::Role::BridgeCH) o.bridges.insert(n.id);
    o.ch_of[n.id] = n.ch;
  }
  o.ch_count = decoric::ch_count(*last);
  return o;
}

}  // namespace fixture

namespace fixture {

namespace {

using namespace decoric;

constexpr std::size_t kMax = 16;

Frame frame_from(NodeId id, NodeId ch, std::initializer_list<NodeId> conn = {}) {
  Frame f = make_frame(id, kMax);
  f.ch_id = ch;
  for (NodeId c : conn) f.connectivity.set(c);
  return f;
}

// Node 0, member of CH 2; neighbour 1 is a member, T_nCH = 4, T_CH = 2.
NodeCtx stable_node() {
  DecoricParams p;
  p.t_fail_ch = 2;
  p.t_fail_nch = 4;
  p.cycle = 6;
  p.max_nodes = kMax;
  NodeCtx c = make_ctx(0, p);
  c.phase = Phase::Stable;
  c.ever_stable = true;
  c.ch_id = 2;
  observe(c, frame_from(1, 2), LinkClass::Potential, 0);
  observe(c, frame_from(2, 2), LinkClass::Potential, 0);
  observe(c, frame_from(3, 2), LinkClass::Potential, 0);
  return c;
}

std::string value_of(const NodeCtx& c, NodeId id) {
  auto it = c.neighbors.find(id);
  return it == c.neighbors.end() ? "absent" : it->second.fail.str();
}

// One round boundary with the CH (2) and node 3 heard directly beforehand.
Action round(NodeCtx& c, bool keep_ch = true) {
  if (keep_ch) stable_on_receive(c, frame_from(2, 2), LinkClass::Potential, 0);
  stable_on_receive(c, frame_from(3, 2), LinkClass::Potential, 0);
  return stable_on_round(c);
}

bool has_trigger(const Action& a) {
  for (const auto& n : a.notes)
    if (n.kind == NoteKind::ElectionTrigger) return true;
  return false;
}

}  // namespace

std::vector<ScriptResult> fail_counter_scripts() {
  std::vector<ScriptResult> out;
  auto add = [&](std::string name, bool ok, std::string detail) { out.push_back({std::move(name), ok, std::move(detail)}); };

  {
    // three silent rounds then a direct frame
    NodeCtx c = stable_node();
    for (int i = 0; i < 3; ++i) round(c);
    const std::string before = value_of(c, 1);
    stable_on_receive(c, frame_from(1, 2), LinkClass::Potential, 1);
    const auto& n = c.neighbors.at(1);
    add("direct frame resets to zero", before == "3" && n.fail.str() == "0" && n.connected,
        "before " + before + " after " + n.fail.str());
  }
  {
    // connectivity drops at the boundary that sees fail == T, not before
    NodeCtx c = stable_node();
    bool early = false;
    for (int i = 0; i < 4; ++i) {
      round(c);
      early = early || !c.neighbors.at(1).connected;
    }
    const bool at_t_minus = !early;  // value went 0..3 while checked
    round(c);               // checked with value 4 == T
    add("connectivity dropped at fail == T_fail", at_t_minus && !c.neighbors.at(1).connected &&
                                                       c.neighbors.at(1).fail.str() == "5",
        "value " + value_of(c, 1));
  }
  {
    // halving on gossip while disconnected, exact rationals
    NodeCtx c = stable_node();
    for (int i = 0; i < 7; ++i) round(c);  // value 7, disconnected
    stable_on_receive(c, frame_from(3, 2, {1}), LinkClass::Potential, 1);
    const std::string h1 = value_of(c, 1);
    stable_on_receive(c, frame_from(3, 2, {1}), LinkClass::Potential, 1);
    const std::string h2 = value_of(c, 1);
    round(c);  // 7/4 + 1 = 11/4
    const std::string h3 = value_of(c, 1);
    add("gossip halves a disconnected counter", h1 == "7/2" && h2 == "7/4" && h3 == "11/4",
        h1 + " " + h2 + " " + h3);
  }
  {
    // gossip about a connected neighbour resets it
    NodeCtx c = stable_node();
    for (int i = 0; i < 2; ++i) round(c);
    stable_on_receive(c, frame_from(3, 2, {1}), LinkClass::Potential, 1);
    add("gossip resets a connected counter", value_of(c, 1) == "0", value_of(c, 1));
  }
  {
    // gossip about an unknown node changes nothing
    NodeCtx c = stable_node();
    stable_on_receive(c, frame_from(3, 2, {9}), LinkClass::Potential, 1);
    add("gossip about unknown node ignored", !c.neighbors.count(9), value_of(c, 9));
  }
  {
    // removal at the boundary that sees fail == 2T; a member's loss does not re-elect
    NodeCtx c = stable_node();
    bool gone_early = false, trig = false;
    for (int i = 0; i < 8; ++i) {
      trig = has_trigger(round(c)) || trig;
      gone_early = gone_early || !c.neighbors.count(1);
    }
    const std::uint16_t deg_before = c.degree();
    const Action last = round(c);  // checked with value 8 == 2T
    add("member removed at fail == 2*T_fail", !gone_early && !c.neighbors.count(1) && c.degree() == deg_before - 1 &&
                                                  !trig && !has_trigger(last),
        "degree " + std::to_string(c.degree()));
  }
  {
    // the CH uses the shorter threshold and its loss triggers an election
    NodeCtx c = stable_node();
    Action a;
    int rounds = 0;
    while (c.neighbors.count(2) && rounds < 20) {
      a = round(c, false);
      ++rounds;
    }
    add("CH removed at 2*T_fail_CH and triggers election",
        rounds == 5 && has_trigger(a) && c.phase == Phase::Election, "rounds " + std::to_string(rounds));
  }
  {
    // halving never makes a counter negative or non-dyadic; a reset gives exactly zero
    FailCounter f = FailCounter::from_int(3);
    for (int i = 0; i < 60; ++i) f.halve();
    bool ok = f.value() >= 0;
    f.increment();
    ok = ok && f.at_least(1) && !f.at_least(2);
    f.reset();
    add("counter arithmetic stays exact", ok && f.str() == "0", f.str());
  }
  return out;
}

}  // namespace fixture
