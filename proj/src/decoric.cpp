#include "decoric/decoric.hpp"

#include <algorithm>

namespace decoric {

bool election_prefers(std::uint16_t deg_a, NodeId a, std::uint16_t deg_b, NodeId b, const DecoricParams& p) {
  if (deg_a != deg_b) return deg_a > deg_b;
  if (a == b) return false;
  switch (p.tie) {
    case TieRule::LowerId: return a < b;
    case TieRule::HigherId: return a > b;
    case TieRule::Priority: {
      auto rank = [&](NodeId x) {
        auto it = std::find(p.priority.begin(), p.priority.end(), x);
        return static_cast<std::size_t>(it - p.priority.begin());
      };
      const auto ra = rank(a), rb = rank(b);
      if (ra != rb) return ra < rb;
      return a < b;
    }
  }
  return a < b;
}

NodeCtx make_ctx(NodeId id, const DecoricParams& p) {
  NodeCtx c;
  c.id = id;
  c.ch_id = id;
  c.best_id = id;
  c.params = p;
  return c;
}

namespace {

void note(Action* act, NoteKind k, std::int32_t a = 0, std::int32_t b = 0) {
  if (act) act->notes.push_back({k, a, b});
}

// Current election winner, with the node's own degree taken live.
std::pair<NodeId, std::uint16_t> current_best(const NodeCtx& ctx) {
  if (ctx.best_id == ctx.id) return {ctx.id, ctx.degree()};
  if (election_prefers(ctx.degree(), ctx.id, ctx.best_degree, ctx.best_id, ctx.params)) return {ctx.id, ctx.degree()};
  return {ctx.best_id, ctx.best_degree};
}

// Members report once per cycle, each in its own round of the cycle so the reports do not pile up.
std::uint32_t member_slot(const NodeCtx& ctx) { return ctx.id % std::max<std::uint32_t>(1, ctx.params.cycle); }

void promote(NodeCtx& ctx, NodeId by, Action* act) {
  ctx.ch_id = ctx.id;
  ctx.is_bridge = false;
  ctx.ch_degree = ctx.degree();
  note(act, NoteKind::Promote, by);
  note(act, NoteKind::RoleChange, static_cast<std::int32_t>(Role::CH), ctx.id);
}

bool names_me(const NodeCtx& ctx, const Frame& f, LinkClass link) {
  return f.ch_id == ctx.id && f.node_id != ctx.id && link == LinkClass::Potential && !ctx.is_ch() &&
         !f.new_ch_id;
}

}  // namespace

bool observe(NodeCtx& ctx, const Frame& f, LinkClass link, Tick now, Action* act) {
  if (f.node_id == ctx.id || link == LinkClass::OutOfRange) return false;
  auto [it, fresh] = ctx.neighbors.try_emplace(f.node_id);
  NeighborEntry& n = it->second;
  if (fresh) {
    n.id = f.node_id;
    n.external = link == LinkClass::External;
    n.conn = NodeSet(ctx.params.max_nodes);
    note(act, NoteKind::NeighborAdd, f.node_id);
  }
  n.fail.reset();
  n.connected = true;
  n.last_direct = now;
  n.degree = f.degree;
  n.ch_id = f.ch_id;
  // setup pings and votes carry ch_id == self; only later frames say who is a head,
  // though a vote for someone else does show the sender is not heading a cluster
  if (ctx.phase == Phase::Correction || ctx.phase == Phase::Stable) n.was_ch = f.ch_id == f.node_id;
  else if (f.ch_id != f.node_id) n.was_ch = false;
  n.conn = f.connectivity;
  if (n.conn.capacity() != ctx.params.max_nodes) n.conn = NodeSet(ctx.params.max_nodes);
  return fresh;
}

void discovery_on_receive(NodeCtx& ctx, const Frame& f, LinkClass link, Tick now) { observe(ctx, f, link, now); }

void election_on_receive(NodeCtx& ctx, const Frame& f, LinkClass link, Tick now) {
  observe(ctx, f, link, now);
  if (link != LinkClass::Potential || f.node_id == ctx.id) return;
  const auto [bid, bdeg] = current_best(ctx);
  if (election_prefers(f.degree, f.node_id, bdeg, bid, ctx.params)) {
    ctx.best_id = f.node_id;
    ctx.best_degree = f.degree;
  } else {
    ctx.best_id = bid;
    ctx.best_degree = bdeg;
  }
}

namespace {

// Bridge to a foreign CH that does not list my CH, unless a better member of my cluster hears it too.
bool try_bridge(NodeCtx& ctx, NodeId foreign, Action* act) {
  const NodeId c = ctx.ch_id;
  for (const auto& [id, n] : ctx.neighbors) {
    if (id == c || id == foreign || n.ch_id != c) continue;
    if (foreign >= n.conn.capacity() || !n.conn.test(foreign)) continue;
    if (election_prefers(n.degree, id, ctx.degree(), ctx.id, ctx.params)) return false;
  }
  ctx.is_bridge = true;
  ctx.ch_id = ctx.id;
  ctx.ch_degree = ctx.degree();
  note(act, NoteKind::Bridge, c, foreign);
  note(act, NoteKind::RoleChange, static_cast<std::int32_t>(Role::BridgeCH), ctx.id);
  return true;
}

}  // namespace

void correction_on_receive(NodeCtx& ctx, const Frame& f, LinkClass link, Tick now, Action* act) {
  observe(ctx, f, link, now, act);
  if (f.node_id == ctx.id) return;
  if (names_me(ctx, f, link)) {
    promote(ctx, f.node_id, act);
    return;
  }
  if (ctx.is_ch()) return;
  const NodeId c = ctx.ch_id;
  const NodeId foreign = f.node_id;
  if (f.ch_id != foreign || foreign == c) return;
  if (c < f.connectivity.capacity() && f.connectivity.test(c)) return;
  // decided at the end of the round, after my own frame has named my CH
  if (std::find(ctx.unbridged.begin(), ctx.unbridged.end(), foreign) == ctx.unbridged.end()) ctx.unbridged.push_back(foreign);
}

void enter_election(NodeCtx& ctx, Action& act, TriggerCause cause, NodeId related) {
  act.notes.push_back({NoteKind::ElectionTrigger, static_cast<std::int32_t>(cause), related});
  act.notes.push_back({NoteKind::PhaseChange, static_cast<std::int32_t>(ctx.phase), static_cast<std::int32_t>(Phase::Election)});
  ctx.phase = Phase::Election;
  ctx.best_id = ctx.id;
  ctx.best_degree = ctx.degree();
  ctx.ch_id = ctx.id;
  ctx.is_bridge = false;
  ctx.ch_confirmed = false;
  ctx.joining = false;
  act.transition = Phase::Election;
  act.broadcast = true;
}

Action stable_on_receive(NodeCtx& ctx, const Frame& f, LinkClass link, Tick now) {
  Action act;
  if (f.node_id == ctx.id || link == LinkClass::OutOfRange) return act;
  observe(ctx, f, link, now, &act);
  // gossip: the sender vouches for these nodes
  for (NodeId i : f.connectivity.members()) {
    if (i == ctx.id || i == f.node_id) continue;
    auto it = ctx.neighbors.find(i);
    if (it == ctx.neighbors.end()) continue;
    if (it->second.connected) it->second.fail.reset();
    else it->second.fail.halve();
  }

  const bool takeover = f.new_ch_id && *f.new_ch_id == f.node_id && link == LinkClass::Potential &&
                        f.ch_id == ctx.ch_id && f.degree > (ctx.is_ch() ? ctx.degree() : ctx.ch_degree);
  if (takeover) {
    enter_election(ctx, act, TriggerCause::Takeover, f.node_id);
    if (election_prefers(f.degree, f.node_id, ctx.degree(), ctx.id, ctx.params)) {
      ctx.best_id = f.node_id;
      ctx.best_degree = f.degree;
    }
    return act;
  }
  if (!ctx.is_ch() && f.node_id == ctx.ch_id) {
    if (f.ch_id == f.node_id) {
      ctx.ch_confirmed = true;
      ctx.ch_degree = f.degree;
    } else if (ctx.ch_confirmed) {
      enter_election(ctx, act, TriggerCause::Resigned, f.node_id);
      return act;
    }
  }
  if (names_me(ctx, f, link)) promote(ctx, f.node_id, &act);
  return act;
}

namespace {
// One round of failure detection. Returns the first lost CH/Bridge-CH (or my own CH), if any.
std::optional<NodeId> age_neighbors(NodeCtx& ctx, Action& act) {
  std::optional<NodeId> lost;
  for (auto it = ctx.neighbors.begin(); it != ctx.neighbors.end();) {
    NeighborEntry& n = it->second;
    const std::uint32_t T = ctx.t_fail_for(n);
    if (n.fail.at_least(T)) n.connected = false;
    if (n.fail.at_least(2ull * T)) {
      const bool lost_head = n.was_ch || n.id == ctx.ch_id;
      act.notes.push_back({NoteKind::NeighborDrop, n.id, lost_head ? 1 : 0});
      if (lost_head && !lost) lost = n.id;
      it = ctx.neighbors.erase(it);
      continue;
    }
    n.fail.increment();
    ++it;
  }
  return lost;
}
}  // namespace

Action stable_on_round(NodeCtx& ctx) {
  Action act;
  ++ctx.rounds_elapsed;
  if (const auto lost = age_neighbors(ctx, act)) {
    enter_election(ctx, act, TriggerCause::NeighborLoss, *lost);
    return act;
  }
  if (ctx.is_ch()) {
    act.broadcast = true;
    ctx.ch_degree = ctx.degree();
  } else if (ctx.cycle_pos == member_slot(ctx)) {
    act.broadcast = true;
  }
  ctx.cycle_pos = (ctx.cycle_pos + 1) % std::max<std::uint32_t>(1, ctx.params.cycle);
  return act;
}

namespace {
void enter_stable(NodeCtx& ctx, Action& act) {
  act.notes.push_back({NoteKind::PhaseChange, static_cast<std::int32_t>(ctx.phase), static_cast<std::int32_t>(Phase::Stable)});
  ctx.phase = Phase::Stable;
  ctx.ever_stable = true;
  ctx.joining = false;
  if (ctx.is_ch()) ctx.ch_degree = ctx.degree();
  ctx.cycle_pos = 1 % std::max<std::uint32_t>(1, ctx.params.cycle);
  act.transition = Phase::Stable;
  act.broadcast = ctx.is_ch() || member_slot(ctx) == 0;
}
}  // namespace

Action phase_timer(NodeCtx& ctx, bool round_elapsed) {
  Action act;
  if (!round_elapsed) return act;
  if (ctx.joining) return join_on_round(ctx);
  switch (ctx.phase) {
    case Phase::Discovery:
      ++ctx.rounds_elapsed;
      act.notes.push_back({NoteKind::PhaseChange, static_cast<std::int32_t>(Phase::Discovery), static_cast<std::int32_t>(Phase::Election)});
      ctx.phase = Phase::Election;
      ctx.best_id = ctx.id;
      ctx.best_degree = ctx.degree();
      act.transition = Phase::Election;
      act.broadcast = true;
      break;
    case Phase::Election: {
      ++ctx.rounds_elapsed;
      // detection keeps running through a re-election; the election is already under way
      if (ctx.ever_stable) {
        age_neighbors(ctx, act);
        if (!ctx.neighbors.count(ctx.best_id)) ctx.best_id = ctx.id;
      }
      const auto [bid, bdeg] = current_best(ctx);
      ctx.ch_id = bid;
      ctx.ch_degree = bdeg;
      ctx.is_bridge = false;
      ctx.ch_confirmed = false;
      ctx.unbridged.clear();
      act.notes.push_back({NoteKind::PhaseChange, static_cast<std::int32_t>(Phase::Election), static_cast<std::int32_t>(Phase::Correction)});
      act.notes.push_back({NoteKind::RoleChange, static_cast<std::int32_t>(ctx.role()), ctx.ch_id});
      ctx.phase = Phase::Correction;
      act.transition = Phase::Correction;
      act.broadcast = true;
      break;
    }
    case Phase::Correction:
      ++ctx.rounds_elapsed;
      if (ctx.ever_stable) age_neighbors(ctx, act);
      if (!ctx.is_ch())
        for (NodeId foreign : ctx.unbridged)
          if (try_bridge(ctx, foreign, &act)) break;
      ctx.unbridged.clear();
      enter_stable(ctx, act);
      break;
    case Phase::Stable:
      return stable_on_round(ctx);
  }
  return act;
}

void join_on_receive(NodeCtx& ctx, const Frame& f, LinkClass link, Tick now) {
  observe(ctx, f, link, now);
  if (f.node_id != ctx.id && f.ch_id == f.node_id && link == LinkClass::Potential && !f.new_ch_id)
    ctx.ch_heard[f.node_id] = f.degree;
}

Action join_on_round(NodeCtx& ctx) {
  Action act;
  ++ctx.join_rounds;
  ++ctx.rounds_elapsed;
  std::optional<std::pair<NodeId, std::uint16_t>> best;
  for (const auto& [id, deg] : ctx.ch_heard) {
    if (!ctx.neighbors.count(id)) continue;
    if (!best || election_prefers(deg, id, best->second, best->first, ctx.params)) best = std::make_pair(id, deg);
  }
  auto affiliate = [&] {
    ctx.affiliated = true;
    ctx.ch_id = best->first;
    ctx.ch_degree = best->second;
    act.notes.push_back({NoteKind::Affiliate, best->first, best->second});
  };
  if (!ctx.affiliated && best && ctx.join_rounds >= ctx.params.join_affiliate_rounds) affiliate();
  if (ctx.join_rounds < ctx.params.cycle) return act;

  if (!ctx.affiliated && best) affiliate();
  if (!ctx.affiliated) {
    ctx.ch_id = ctx.id;
    act.notes.push_back({NoteKind::RoleChange, static_cast<std::int32_t>(Role::CH), ctx.id});
    enter_stable(ctx, act);
    return act;
  }
  if (ctx.degree() > ctx.ch_degree) {
    const NodeId old = ctx.ch_id;
    act.notes.push_back({NoteKind::Takeover, old, ctx.degree()});
    ctx.ever_stable = true;
    enter_election(ctx, act, TriggerCause::Joining, old);
    ctx.takeover_from = old;
    act.takeover = true;
    return act;
  }
  enter_stable(ctx, act);
  return act;
}

Frame build_frame(const NodeCtx& ctx, Tick now, Tick round_len, bool takeover) {
  Frame f = make_frame(ctx.id, ctx.params.max_nodes);
  if (ctx.phase == Phase::Discovery && !ctx.ever_stable) return f;  // ping
  f.ch_id = ctx.phase == Phase::Election ? current_best(ctx).first : ctx.ch_id;
  f.degree = ctx.degree();
  const Tick fresh = static_cast<Tick>(ctx.params.fresh_rounds) * round_len;
  for (const auto& [id, n] : ctx.neighbors) {
    f.neighbors.set(id);
    if (!n.connected) continue;
    if (ctx.phase == Phase::Stable && now - n.last_direct > fresh) continue;
    f.connectivity.set(id);
  }
  if (takeover) {
    f.new_ch_id = ctx.id;
    f.ch_id = ctx.takeover_from;
  }
  return f;
}

namespace {

class DecoricAgent final : public NodeAgent {
 public:
  DecoricAgent(NodeId id, const DecoricParams& p) : ctx_(make_ctx(id, p)) {}

  void boot(const StepEnv& env, bool joining, StepOut& out) override {
    out.radio = RadioMode::AlwaysOn;
    if (joining) {
      ctx_.joining = true;
      return;
    }
    out.tx.push_back(env.in_round(MsgKind::Decoric, TxMode::Single));
  }

  void on_receive(const StepEnv& env, const Reception& rx, StepOut& out) override {
    if (rx.kind != MsgKind::Decoric) return;
    const Frame& f = rx.frame;
    Action act;
    if (ctx_.joining) {
      join_on_receive(ctx_, f, rx.link, env.now);
      return;
    }
    switch (ctx_.phase) {
      case Phase::Discovery: discovery_on_receive(ctx_, f, rx.link, env.now); break;
      case Phase::Election: election_on_receive(ctx_, f, rx.link, env.now); break;
      case Phase::Correction: correction_on_receive(ctx_, f, rx.link, env.now, &act); break;
      case Phase::Stable: act = stable_on_receive(ctx_, f, rx.link, env.now); break;
    }
    apply(env, act, out, true);
  }

  void on_round(const StepEnv& env, StepOut& out) override { apply(env, phase_timer(ctx_), out, false); }

  Frame materialize(const TxRequest& req, Tick now, Tick round_len) const override {
    return build_frame(ctx_, now, round_len, req.takeover);
  }

  NodeView view() const override {
    NodeView v;
    v.role = ctx_.role();
    v.phase = ctx_.phase;
    v.ch_id = ctx_.phase == Phase::Election ? ctx_.best_id : ctx_.ch_id;
    v.degree = ctx_.degree();
    return v;
  }

  RadioMode radio() const override {
    return (ctx_.phase == Phase::Stable && !ctx_.joining) ? RadioMode::DutyCycled : RadioMode::AlwaysOn;
  }

  bool settled() const override { return ctx_.phase == Phase::Stable && !ctx_.joining; }

  const NodeCtx& ctx() const { return ctx_; }

 private:
  void apply(const StepEnv& env, const Action& act, StepOut& out, bool mid_round) {
    out.notes.insert(out.notes.end(), act.notes.begin(), act.notes.end());
    if (act.transition) {
      out.radio = radio();
      if (mid_round) out.restart_round = true;
    }
    if (!act.broadcast) return;
    const TxMode mode = ctx_.ever_stable ? TxMode::Strobe : TxMode::Single;
    StepEnv e = env;
    if (mid_round) e.round_start = env.now;  // the round restarts now
    TxRequest req = e.in_round(MsgKind::Decoric, mode);
    req.takeover = act.takeover;
    out.tx.push_back(req);
  }

  NodeCtx ctx_;
};

}  // namespace

std::unique_ptr<NodeAgent> make_decoric_agent(NodeId id, const DecoricParams& p) {
  return std::make_unique<DecoricAgent>(id, p);
}

const NodeCtx* decoric_ctx(const NodeAgent& a) {
  auto* d = dynamic_cast<const DecoricAgent*>(&a);
  return d ? &d->ctx() : nullptr;
}

}  // namespace decoric
