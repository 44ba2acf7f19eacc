#include "decoric/engine.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <memory>
#include <queue>
#include <stdexcept>

namespace decoric {

const char* to_string(Protocol p) {
  switch (p) {
    case Protocol::Decoric: return "decoric";
    case Protocol::Leach: return "leach";
    case Protocol::Beem: return "beem";
  }
  return "?";
}

Protocol protocol_from(const std::string& s) {
  if (s == "decoric") return Protocol::Decoric;
  if (s == "leach") return Protocol::Leach;
  if (s == "beem") return Protocol::Beem;
  throw std::invalid_argument("unknown protocol '" + s + "'");
}

Tick effective_round(const RunSpec& s) { return s.round_len > 0 ? s.round_len : round_duration(s.mac); }

std::uint32_t effective_cycle(const RunSpec& s) {
  return s.cycle_rounds > 0 ? s.cycle_rounds : cycle_rounds(effective_round(s), s.rdc.rdc_rate);
}

std::uint32_t strobe_copies(const MacParams& m, const RdcParams& r) {
  const Tick step = m.tau_fr + m.tau_ifs;
  const Tick span = r.period() + r.window();
  return static_cast<std::uint32_t>((span + step - 1) / step) + 1;
}

namespace {

enum EvKind : std::uint8_t {
  kTxEnd = 0,
  kReception = 1,
  kRdcToggle = 2,  // reserved; duty cycling is evaluated analytically
  kRoundTick = 3,
  kInject = 4,
  kTxStart = 5,  // also CCA completion and boot
  kSnapshot = 6,
};

enum class Sub : std::uint8_t { Boot, Cca, CopyStart, CopyEnd, Rx, Round, Inject, Snap };

struct Event {
  Tick t;
  std::uint8_t kind;
  NodeId node;
  std::uint64_t seq;
  Sub sub;
  std::uint32_t a = 0;  // transmission index / generation / fault index
  std::uint32_t b = 0;  // copy index

  bool operator>(const Event& o) const {
    if (t != o.t) return t > o.t;
    if (kind != o.kind) return kind > o.kind;
    if (node != o.node) return node > o.node;
    return seq > o.seq;
  }
};

struct Transmission {
  NodeId src = 0;
  TxRequest req;
  Frame frame;
  Tick start = 0;
  Tick step = 0;  // copy spacing
  Tick copy_len = 0;
  std::uint32_t copies = 1;
  Tick end = 0;  // end of the last copy, or the death of the sender
  bool on_channel = true;

  Tick copy_start(std::uint32_t i) const { return start + static_cast<Tick>(i) * step; }
  Tick copy_end(std::uint32_t i) const { return copy_start(i) + copy_len; }
};

const MacParams kDefaultMac{};

struct NodeState {
  bool exists = false;
  bool alive = false;
  bool booted = false;
  std::unique_ptr<NodeAgent> agent;
  Rng rng;
  EnergyLedger ledger;
  RdcWindow rdc;
  Tick round_start = 0;
  std::uint64_t round_gen = 0;
  std::deque<TxRequest> queue;
  bool csma_active = false;
  std::uint64_t csma_gen = 0;
  Csma csma{kDefaultMac};
  TxRequest current;
  std::optional<std::uint32_t> tx;  // transmission in progress
  Tick busy_until = 0;              // own transmission (half duplex)
  bool settled = false;
};

class Engine {
 public:
  Engine(const RunSpec& spec, std::uint64_t seed)
      : spec_(spec), seed_(seed), round_(effective_round(spec)), cycle_(effective_cycle(spec)) {
    spec_.mac.validate();
    spec_.rdc.validate();
    spec_.power.validate();
    if (spec_.snapshot_rounds == 0) spec_.snapshot_rounds = 1;
    copies_ = strobe_copies(spec_.mac, spec_.rdc);
    step_ = spec_.mac.tau_fr + spec_.mac.tau_ifs;
    Tick csma_worst = 0;
    for (std::uint32_t i = 0; i <= spec_.mac.max_retries; ++i) csma_worst += worst_case_backoff(i, spec_.mac);
    margin_ = csma_worst + static_cast<Tick>(copies_) * step_;
    if (margin_ >= round_) margin_ = round_ / 2;
    horizon_ = std::max<Tick>(0, spec_.horizon);

    // every node that will ever exist, for the in-range table
    topo_ = spec_.topo;
    for (const auto& f : spec_.faults) {
      if (!f.add) continue;
      if (topo_.contains(f.node)) throw std::invalid_argument("add of existing node " + std::to_string(f.node));
      topo_.positions[f.node] = f.pos;
    }
    NodeId max_id = 0;
    for (const auto& [id, p] : topo_.positions) max_id = std::max(max_id, id);
    n_ = topo_.positions.empty() ? 0 : static_cast<std::size_t>(max_id) + 1;
    if (spec_.protocol == Protocol::Decoric && n_ > spec_.decoric.max_nodes)
      throw std::invalid_argument("node id exceeds max_nodes");
    nodes_.resize(n_);
    nbrs_.assign(n_, {});
    rssi_.assign(n_ * n_, 0.0);
    link_.assign(n_ * n_, LinkClass::OutOfRange);
    const auto ids = topo_.ids();
    for (NodeId a : ids)
      for (NodeId b : ids) {
        if (a == b) continue;
        link_[a * n_ + b] = classify_link(a, b, topo_);
        rssi_[a * n_ + b] = link_rssi(a, b, topo_);
        if (link_[a * n_ + b] != LinkClass::OutOfRange) nbrs_[a].push_back(b);
      }

    trace_.config = spec_.config;
    trace_.seed = seed;
    trace_.round_len = round_;
    trace_.horizon = horizon_;
    trace_.cycle_rounds = cycle_;
    trace_.topology = spec_.topo;
  }

  Trace run() {
    // initial nodes
    for (const auto& [id, p] : spec_.topo.positions) {
      NodeState& s = nodes_[id];
      create(id, s, 0);
      const Tick boot = spec_.boot_jitter > 0 ? static_cast<Tick>(s.rng.below(static_cast<std::uint64_t>(spec_.boot_jitter) + 1)) : 0;
      push(boot, kTxStart, id, Sub::Boot);
    }
    for (std::uint32_t i = 0; i < spec_.faults.size(); ++i) {
      const auto& f = spec_.faults[i];
      push(f.t, kInject, f.node, Sub::Inject, i);
    }
    const Tick snap_every = round_ * spec_.snapshot_rounds;
    push(0, kSnapshot, 0, Sub::Snap);

    while (!q_.empty()) {
      const Event e = q_.top();
      if (e.t >= horizon_) break;
      q_.pop();
      now_ = e.t;
      dispatch(e);
      if (e.sub == Sub::Snap && e.t + snap_every < horizon_) push(e.t + snap_every, kSnapshot, 0, Sub::Snap);
    }
    now_ = horizon_;
    snapshot(horizon_, false);
    return std::move(trace_);
  }

 private:
  void push(Tick t, std::uint8_t kind, NodeId node, Sub sub, std::uint32_t a = 0, std::uint32_t b = 0) {
    q_.push(Event{t, kind, node, seq_++, sub, a, b});
  }

  bool events() const { return spec_.level != TraceLevel::Summary; }
  bool full() const { return spec_.level == TraceLevel::Full; }

  std::unique_ptr<NodeAgent> make_agent(NodeId id) const {
    switch (spec_.protocol) {
      case Protocol::Decoric: return make_decoric_agent(id, spec_.decoric);
      case Protocol::Leach: return make_leach_agent(id, spec_.leach, spec_.decoric.max_nodes);
      case Protocol::Beem: return make_beem_agent(id, spec_.beem, spec_.decoric.max_nodes);
    }
    return nullptr;
  }

  void create(NodeId id, NodeState& s, Tick t) {
    s.exists = true;
    s.alive = true;
    s.agent = make_agent(id);
    s.rng = Rng(mix_seed(seed_, id));
    s.rdc = RdcWindow{rdc_offset(id, seed_, spec_.rdc), spec_.rdc.period(), spec_.rdc.window()};
    s.ledger = EnergyLedger(spec_.power, s.rdc, t);
    s.csma = Csma(spec_.mac);
    ++alive_;
  }

  StepEnv env_for(NodeState& s) {
    StepEnv env;
    env.now = now_;
    env.round_start = s.round_start;
    env.round_len = round_;
    env.tx_margin = margin_;
    env.slot_len = step_;
    env.energy_fraction = s.ledger.residual_fraction();
    env.rng = &s.rng;
    return env;
  }

  // Brings the node's battery to now; handles a death discovered on the way.
  bool touch(NodeId id) {
    NodeState& s = nodes_[id];
    if (!s.exists || !s.alive) return false;
    if (s.ledger.advance(now_)) return true;
    on_death(id, s.ledger.death_time(), true);
    return false;
  }

  void on_death(NodeId id, Tick t, bool battery) {
    NodeState& s = nodes_[id];
    if (!s.alive) return;
    s.alive = false;
    --alive_;
    if (s.settled) {
      s.settled = false;
      --settled_;
    }
    s.queue.clear();
    s.csma_active = false;
    ++s.csma_gen;
    if (s.tx) {
      Transmission& tx = txs_[*s.tx];
      tx.end = std::min(tx.end, t);
      s.tx.reset();
    }
    trace_.records.push_back(DeathRecord{t, id, battery});
    check_settled();
  }

  void dispatch(const Event& e) {
    switch (e.sub) {
      case Sub::Boot: boot(e.node, false); break;
      case Sub::Cca: cca(e); break;
      case Sub::CopyStart: copy_start(e); break;
      case Sub::CopyEnd: copy_end(e); break;
      case Sub::Rx: reception(e); break;
      case Sub::Round: round_tick(e); break;
      case Sub::Inject: inject(e); break;
      case Sub::Snap: snapshot(now_, false); break;
    }
  }

  void boot(NodeId id, bool joining) {
    NodeState& s = nodes_[id];
    if (!touch(id)) return;
    s.booted = true;
    s.round_start = now_;
    schedule_round(id);
    StepOut out;
    StepEnv env = env_for(s);
    s.agent->boot(env, joining, out);
    apply(id, out);
  }

  void schedule_round(NodeId id) {
    NodeState& s = nodes_[id];
    ++s.round_gen;
    push(s.round_start + round_, kRoundTick, id, Sub::Round, static_cast<std::uint32_t>(s.round_gen));
  }

  void round_tick(const Event& e) {
    NodeState& s = nodes_[e.node];
    if (e.a != static_cast<std::uint32_t>(s.round_gen)) return;  // superseded by a restart
    if (!touch(e.node)) return;
    s.round_start = now_;
    schedule_round(e.node);
    StepOut out;
    StepEnv env = env_for(s);
    s.agent->on_round(env, out);
    apply(e.node, out);
  }

  void apply(NodeId id, StepOut& out) {
    NodeState& s = nodes_[id];
    if (out.restart_round) {
      s.round_start = now_;
      schedule_round(id);
    }
    if (out.radio) s.ledger.set_mode(now_, *out.radio);
    if (events())
      for (const auto& n : out.notes) trace_.records.push_back(NoteRecord{now_, id, n});
    for (const auto& r : out.tx) enqueue(id, r);
    const bool st = s.agent->settled();
    if (st != s.settled) {
      s.settled = st;
      settled_ += st ? 1 : -1;
      check_settled();
    }
  }

  void check_settled() {
    const bool all = alive_ > 0 && settled_ == alive_;
    if (all && !all_settled_) {
      snapshot(now_, true);
      if (spec_.stop_after_settled && !stopping_) {
        stopping_ = true;
        horizon_ = std::min(horizon_, now_ + *spec_.stop_after_settled);
        trace_.horizon = horizon_;
      }
    }
    all_settled_ = all;
  }

  // --- transmission path -------------------------------------------------

  void enqueue(NodeId id, const TxRequest& r) {
    NodeState& s = nodes_[id];
    // A newer request of the same kind supersedes one that has not started yet.
    for (auto& q : s.queue)
      if (q.kind == r.kind) {
        const bool tk = q.takeover || r.takeover;
        q = r;
        q.takeover = tk;
        return;
      }
    if (s.csma_active && s.current.kind == r.kind) {
      const bool tk = s.current.takeover || r.takeover;
      s.current = r;
      s.current.takeover = tk;
      start_csma(id);
      return;
    }
    s.queue.push_back(r);
    if (!s.csma_active && !s.tx) next_tx(id);
  }

  void next_tx(NodeId id) {
    NodeState& s = nodes_[id];
    if (s.queue.empty()) return;
    s.current = s.queue.front();
    s.queue.pop_front();
    start_csma(id);
  }

  Tick airtime(const TxRequest& r) const {
    return r.mode == TxMode::Strobe ? static_cast<Tick>(copies_ - 1) * step_ + spec_.mac.tau_fr : spec_.mac.tau_fr;
  }

  void start_csma(NodeId id) {
    NodeState& s = nodes_[id];
    s.csma_active = true;
    ++s.csma_gen;
    const TxRequest& r = s.current;
    Tick start = std::max(now_, r.earliest);
    if (r.mode == TxMode::Scheduled) {
      push(start, kTxStart, id, Sub::CopyStart, begin_tx(id, start), 0);
      s.csma_active = false;
      return;
    }
    // first attempt in the first three quarters of the window, the rest is left for retries
    const Tick hi = std::max(start, r.latest);
    start += static_cast<Tick>(s.rng.below(static_cast<std::uint64_t>((hi - start) * 3 / 4) + 1));
    push(s.csma.begin(start, s.rng), kTxStart, id, Sub::Cca, static_cast<std::uint32_t>(s.csma_gen));
  }

  bool channel_busy(NodeId id, Tick t) {
    const Tick lookback = 2 * spec_.mac.tau_cca;
    for (std::uint32_t i : active_) {
      const Transmission& tx = txs_[i];
      if (tx.src == id || !tx.on_channel) continue;
      if (tx.start < t && tx.end > t - lookback && link_[tx.src * n_ + id] != LinkClass::OutOfRange) return true;
    }
    return false;
  }

  void prune_active() {
    const Tick keep = now_ - static_cast<Tick>(copies_ + 1) * step_ - round_;
    std::erase_if(active_, [&](std::uint32_t i) { return txs_[i].end < keep; });
  }

  void cca(const Event& e) {
    NodeState& s = nodes_[e.node];
    if (!s.csma_active || e.a != static_cast<std::uint32_t>(s.csma_gen)) return;
    if (!touch(e.node)) return;
    const bool busy = channel_busy(e.node, now_) || s.busy_until > now_;
    switch (s.csma.on_cca(now_, busy, s.rng)) {
      case Csma::Result::Transmit:
        s.csma_active = false;
        begin_tx(e.node, now_);
        copy_start(Event{now_, kTxStart, e.node, 0, Sub::CopyStart, static_cast<std::uint32_t>(txs_.size() - 1), 0});
        break;
      case Csma::Result::Retry:
        push(s.csma.next_cca(), kTxStart, e.node, Sub::Cca, static_cast<std::uint32_t>(s.csma_gen));
        break;
      case Csma::Result::Drop: {
        const TxRequest& r = s.current;
        if (now_ < r.latest) {
          // back off and contend again later in the window
          const Tick span = std::min<Tick>(r.latest - now_, round_ / 8);
          const Tick again = now_ + 1 + static_cast<Tick>(s.rng.below(static_cast<std::uint64_t>(span)));
          push(s.csma.begin(again, s.rng), kTxStart, e.node, Sub::Cca, static_cast<std::uint32_t>(s.csma_gen));
        } else {
          s.csma_active = false;
          if (events()) trace_.records.push_back(NoteRecord{now_, e.node, Note{NoteKind::TxDropped, static_cast<int>(r.kind), 0}});
          next_tx(e.node);
        }
        break;
      }
    }
  }

  // Creates the transmission and resolves which neighbours will attempt which copy.
  std::uint32_t begin_tx(NodeId id, Tick start) {
    NodeState& s = nodes_[id];
    Transmission tx;
    tx.src = id;
    tx.req = s.current;
    tx.start = start;
    tx.step = step_;
    tx.copy_len = spec_.mac.tau_fr;
    tx.copies = s.current.mode == TxMode::Strobe ? copies_ : 1;
    tx.end = tx.copy_end(tx.copies - 1);
    tx.on_channel = s.current.mode != TxMode::Scheduled;
    const auto idx = static_cast<std::uint32_t>(txs_.size());
    txs_.push_back(std::move(tx));
    s.tx = idx;
    return idx;
  }

  void copy_start(const Event& e) {
    NodeState& s = nodes_[e.node];
    Transmission& tx = txs_[e.a];
    if (!s.alive || !s.tx || *s.tx != e.a) return;
    if (!touch(e.node)) return;
    if (e.b == 0) {
      // the payload is fixed when the first copy goes out
      tx.frame = s.agent->materialize(tx.req, now_, round_);
      s.ledger.add_override(tx.start, tx.end, RadioState::Tx);
      s.busy_until = tx.end;
      if (tx.on_channel) {
        active_.push_back(e.a);
        prune_active();
      }
      plan_receivers(e.a);
    }
    if (events())
      trace_.records.push_back(TxRecord{now_, tx.copy_end(e.b), e.node, tx.req.kind, tx.req.mode,
                                        static_cast<std::uint16_t>(e.b), tx.req.dest, tx.frame.ch_id, tx.req.takeover});
    push(tx.copy_end(e.b), kTxEnd, e.node, Sub::CopyEnd, e.a, e.b);
  }

  void copy_end(const Event& e) {
    NodeState& s = nodes_[e.node];
    Transmission& tx = txs_[e.a];
    if (!s.alive || !s.tx || *s.tx != e.a) return;
    if (e.b + 1 < tx.copies) {
      push(tx.copy_start(e.b + 1), kTxStart, e.node, Sub::CopyStart, e.a, e.b + 1);
      return;
    }
    touch(e.node);
    if (!s.alive) return;
    s.tx.reset();
    next_tx(e.node);
  }

  void plan_receivers(std::uint32_t ti) {
    const Transmission& tx = txs_[ti];
    const auto& cand = tx.req.mode == TxMode::Scheduled ? scheduled_targets(tx) : nbrs_[tx.src];
    for (NodeId r : cand) {
      NodeState& rs = nodes_[r];
      if (!rs.exists || !rs.alive || !rs.booted) continue;
      const RadioMode m = rs.ledger.mode();
      std::optional<std::uint32_t> copy;
      Tick detect = tx.start;
      if (m == RadioMode::AlwaysOn) {
        copy = 0;
      } else if (m == RadioMode::DutyCycled && tx.req.mode != TxMode::Scheduled) {
        const auto on = rdc_first_on(rs.rdc.offset, rs.rdc.period, rs.rdc.window, tx.start, tx.end);
        if (on) {
          // first instant inside the window where a copy is on air
          Tick x = *on;
          const Tick into = (x - tx.start) % tx.step;
          if (into >= tx.copy_len) x += tx.step - into;  // in a gap: wait for the next copy
          if (rdc_on_time(rs.rdc.offset, rs.rdc.period, rs.rdc.window, x, x + 1) > 0) {
            const Tick rel = x - tx.start;
            const auto k = static_cast<std::uint32_t>((rel + tx.step - 1) / tx.step);
            if (k < tx.copies) {
              copy = k;
              detect = x;
            }
          }
        }
      }
      if (!copy) continue;
      if (m == RadioMode::DutyCycled) rs.ledger.add_override(detect, tx.copy_end(*copy), RadioState::Listen);
      push(tx.copy_end(*copy), kReception, r, Sub::Rx, ti, *copy);
    }
  }

  const std::vector<NodeId>& scheduled_targets(const Transmission& tx) {
    scratch_.clear();
    const NodeId d = tx.req.dest;
    if (d != kNoNode && d < n_ && link_[tx.src * n_ + d] != LinkClass::OutOfRange) scratch_.push_back(d);
    return scratch_;
  }

  void reception(const Event& e) {
    const Transmission& tx = txs_[e.a];
    const Tick cs = tx.copy_start(e.b), ce = tx.copy_end(e.b);
    // the sender may have died before finishing the copy
    if (nodes_[tx.src].alive) touch(tx.src);
    if (tx.end < ce) return;
    NodeState& rs = nodes_[e.node];
    if (!touch(e.node)) return;
    bool ok = true;
    if (tx.on_channel) {
      for (std::uint32_t i : active_) {
        if (i == e.a) continue;
        const Transmission& o = txs_[i];
        if (o.start >= ce || o.end <= cs) continue;
        if (o.src == e.node || link_[o.src * n_ + e.node] != LinkClass::OutOfRange) {
          ok = false;
          break;
        }
      }
    }
    // half duplex: our own transmission overlapping the copy
    if (ok && rs.tx && *rs.tx != e.a) {
      const Transmission& own = txs_[*rs.tx];
      if (own.start < ce && own.end > cs) ok = false;
    }
    if (full()) trace_.records.push_back(RxRecord{now_, e.node, tx.src, tx.req.kind, ok});
    if (!ok) {
      // a corrupted strobe copy: keep listening for the next one
      const std::uint32_t next = e.b + 1;
      if (tx.req.mode == TxMode::Strobe && next < tx.copies) {
        if (rs.ledger.mode() == RadioMode::DutyCycled) rs.ledger.add_override(now_, tx.copy_end(next), RadioState::Listen);
        push(tx.copy_end(next), kReception, e.node, Sub::Rx, e.a, next);
      }
      return;
    }
    rs.ledger.add_override(now_, now_ + spec_.cpu_ticks, RadioState::Cpu);
    Reception rx;
    rx.kind = tx.req.kind;
    rx.from = tx.src;
    rx.dest = tx.req.dest;
    rx.aux = tx.req.aux;
    rx.link = link_[tx.src * n_ + e.node];
    rx.rssi = rssi_[tx.src * n_ + e.node];
    rx.frame = tx.frame;
    StepOut out;
    StepEnv env = env_for(rs);
    rs.agent->on_receive(env, rx, out);
    apply(e.node, out);
  }

  void inject(const Event& e) {
    const FaultAction& f = spec_.faults[e.a];
    NodeState& s = nodes_[f.node];
    trace_.records.push_back(InjectRecord{now_, f.node, f.add, f.pos});
    if (f.add) {
      if (s.exists) return;
      create(f.node, s, now_);
      trace_.topology.positions[f.node] = f.pos;
      boot(f.node, true);
      return;
    }
    if (!touch(f.node)) return;
    s.ledger.kill(now_);
    on_death(f.node, now_, false);
  }

  void snapshot(Tick t, bool settled) {
    Snapshot snap;
    snap.t = t;
    snap.settled = settled;
    for (NodeId id = 0; id < n_; ++id) {
      NodeState& s = nodes_[id];
      if (!s.exists) continue;
      if (s.alive) touch(id);
      NodeSnap ns;
      ns.id = id;
      ns.alive = s.alive;
      const NodeView v = s.agent->view();
      ns.phase = v.phase;
      ns.role = s.alive ? v.role : Role::Dead;
      ns.ch = s.alive ? v.ch_id : kNoNode;
      ns.degree = v.degree;
      ns.consumed_pj = s.ledger.consumed_pj();
      ns.residual_pj = s.ledger.residual_pj();
      ns.times = s.ledger.times();
      ns.conserved = s.ledger.conserved();
      snap.nodes.push_back(ns);
    }
    trace_.records.push_back(std::move(snap));
  }

  RunSpec spec_;
  std::uint64_t seed_;
  Tick round_;
  std::uint32_t cycle_;
  std::uint32_t copies_ = 1;
  Tick step_ = 0;
  Tick margin_ = 0;
  Tick horizon_ = 0;
  Tick now_ = 0;
  Topology topo_;
  std::size_t n_ = 0;
  std::vector<NodeState> nodes_;
  std::vector<std::vector<NodeId>> nbrs_;
  std::vector<double> rssi_;
  std::vector<LinkClass> link_;
  std::vector<Transmission> txs_;
  std::vector<std::uint32_t> active_;
  std::vector<NodeId> scratch_;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> q_;
  std::uint64_t seq_ = 0;
  std::size_t alive_ = 0;
  std::size_t settled_ = 0;
  bool all_settled_ = false;
  bool stopping_ = false;
  Trace trace_;
};

}  // namespace

Trace run(const RunSpec& spec, std::uint64_t seed) {
  Engine e(spec, seed);
  return e.run();
}

}  // namespace decoric
