#include "decoric/metrics.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

namespace decoric {

namespace {

bool is_head(Role r) { return r == Role::CH || r == Role::BridgeCH; }

struct Dsu {
  std::vector<std::size_t> p, sz;
  explicit Dsu(std::size_t n) : p(n), sz(n, 1) { std::iota(p.begin(), p.end(), 0); }
  std::size_t find(std::size_t x) {
    while (p[x] != x) x = p[x] = p[p[x]];
    return x;
  }
  void join(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (sz[a] < sz[b]) std::swap(a, b);
    p[b] = a;
    sz[a] += sz[b];
  }
};

double rounds(Tick dt, Tick round) { return static_cast<double>(dt) / static_cast<double>(round); }

}  // namespace

ClusterSnapshot cluster_snapshot(const Snapshot& s, const Topology& topo) {
  ClusterSnapshot c;
  c.t = s.t;
  std::map<NodeId, Role> role;
  for (const auto& n : s.nodes) {
    const Role r = n.alive ? n.role : Role::Dead;
    c.nodes.push_back({n.id, r, n.ch});
    role[n.id] = r;
  }
  std::vector<NodeId> heads;
  for (const auto& n : c.nodes) {
    if (n.role == Role::Dead) continue;
    if (is_head(n.role)) {
      heads.push_back(n.id);
      continue;
    }
    auto it = role.find(n.ch);
    if (n.ch != kNoNode && it != role.end() && is_head(it->second)) c.edges.emplace_back(n.id, n.ch);
  }
  for (std::size_t i = 0; i < heads.size(); ++i)
    for (std::size_t j = i + 1; j < heads.size(); ++j)
      if (topo.contains(heads[i]) && topo.contains(heads[j]) && in_range(heads[i], heads[j], topo))
        c.edges.emplace_back(heads[i], heads[j]);
  return c;
}

double connectivity_ratio(const ClusterSnapshot& s, std::size_t n_total) {
  if (n_total == 0) return 0.0;
  std::map<NodeId, std::size_t> idx;
  for (const auto& n : s.nodes)
    if (n.role != Role::Dead) idx.emplace(n.id, idx.size());
  if (idx.empty()) return 0.0;
  Dsu d(idx.size());
  for (const auto& [a, b] : s.edges) {
    auto ia = idx.find(a), ib = idx.find(b);
    if (ia != idx.end() && ib != idx.end()) d.join(ia->second, ib->second);
  }
  std::size_t best = 0;
  for (std::size_t i = 0; i < idx.size(); ++i) best = std::max(best, d.sz[d.find(i)]);
  return static_cast<double>(best) / static_cast<double>(n_total);
}

double connectivity_ratio(const Snapshot& s, const Topology& topo) {
  const auto alive = static_cast<std::size_t>(
      std::count_if(s.nodes.begin(), s.nodes.end(), [](const NodeSnap& n) { return n.alive; }));
  return connectivity_ratio(cluster_snapshot(s, topo), alive);
}

std::size_t ch_count(const ClusterSnapshot& s) {
  std::size_t heads = 0, alive = 0;
  for (const auto& n : s.nodes) {
    if (n.role == Role::Dead) continue;
    ++alive;
    if (is_head(n.role)) ++heads;
  }
  if (alive > 0 && heads == 0) throw std::invalid_argument("snapshot has members but no cluster head");
  return heads;
}

std::size_t ch_count(const Snapshot& s) {
  ClusterSnapshot c;
  for (const auto& n : s.nodes) c.nodes.push_back({n.id, n.alive ? n.role : Role::Dead, n.ch});
  return ch_count(c);
}

PowerStats power_stats(const Trace& t) {
  PowerStats ps;
  const Snapshot* last = nullptr;
  for (const auto& r : t.records)
    if (auto* s = std::get_if<Snapshot>(&r)) last = s;
  if (last) {
    double sum = 0;
    std::size_t cnt = 0;
    for (const auto& n : last->nodes) {
      const Tick alive = n.times.total();
      const double mw = alive > 0 ? static_cast<double>(n.consumed_pj) / static_cast<double>(alive) / 1000.0 : 0.0;
      ps.node_avg_mw.push_back(mw);
      if (alive > 0) {
        sum += mw;
        ++cnt;
      }
    }
    ps.network_avg_mw = cnt ? sum / static_cast<double>(cnt) : 0.0;
  }
  for (const auto* d : t.all<DeathRecord>())
    if (d->battery) ps.death_times_s.push_back(ticks_to_seconds(d->t));
  std::sort(ps.death_times_s.begin(), ps.death_times_s.end());
  if (!ps.death_times_s.empty()) ps.first_death_s = ps.death_times_s.front();
  return ps;
}

ClusteringCost clustering_cost(const Trace& t) {
  ClusteringCost c;
  for (const auto& r : t.records) {
    auto* s = std::get_if<Snapshot>(&r);
    if (!s || !s->settled) continue;
    c.settle_times_s.push_back(ticks_to_seconds(s->t));
    if (c.settled) continue;
    c.settled = true;
    c.time_s = ticks_to_seconds(s->t);
    std::int64_t pj = 0;
    for (const auto& n : s->nodes) pj += n.consumed_pj;
    c.energy_mwh = static_cast<double>(pj) / 3.6e12;
    c.connectivity = connectivity_ratio(*s, t.topology);
  }
  if (!c.settled) return c;
  if (c.connectivity <= 0) {
    c.unnormalized = true;
    c.time_norm = c.time_s;
    c.energy_norm = c.energy_mwh;
  } else {
    c.time_norm = c.time_s / c.connectivity;
    c.energy_norm = c.energy_mwh / c.connectivity;
  }
  return c;
}

const char* to_string(ChangeKind k) {
  switch (k) {
    case ChangeKind::ChFail: return "fail_ch";
    case ChangeKind::BridgeFail: return "fail_bridge";
    case ChangeKind::MemberFail: return "fail_member";
    case ChangeKind::AddLow: return "add_low";
    case ChangeKind::AddHigh: return "add_high";
  }
  return "?";
}

Window detection_window(ChangeKind k, const ResilienceBounds& b) {
  switch (k) {
    case ChangeKind::ChFail:
    case ChangeKind::BridgeFail: return {2.0 * b.t_fail_ch, 2.5 * b.t_fail_ch};
    case ChangeKind::MemberFail: return {2.0 * b.t_fail_nch, 2.5 * b.t_fail_nch};
    case ChangeKind::AddLow:
    case ChangeKind::AddHigh: return {static_cast<double>(b.join_rounds), static_cast<double>(b.cycle)};
  }
  return {};
}

Window recovery_window(ChangeKind k) {
  switch (k) {
    case ChangeKind::ChFail:
    case ChangeKind::BridgeFail: return {0, 2};
    case ChangeKind::MemberFail:
    case ChangeKind::AddLow: return {0, 0};
    case ChangeKind::AddHigh: return {0, 3};
  }
  return {};
}

namespace {

struct PhaseEvent {
  Tick t;
  NodeId node;
  Phase to;
};

bool inside(double v, Window w) { return v >= w.lo - 1e-9 && v <= w.hi + 1e-9; }

}  // namespace

std::vector<ResilienceSample> resilience_latencies(const Trace& t, const std::vector<FaultAction>& plan,
                                                   const ResilienceBounds& b) {
  std::vector<ResilienceSample> out;
  const Tick R = t.round_len;
  std::vector<PhaseEvent> phases;
  std::vector<const NoteRecord*> notes;
  for (const auto* n : t.all<NoteRecord>()) {
    notes.push_back(n);
    if (n->note.kind == NoteKind::PhaseChange) phases.push_back({n->t, n->node, static_cast<Phase>(n->note.b)});
  }
  const auto txs = t.all<TxRecord>();
  const auto rxs = t.all<RxRecord>();
  const auto snaps = t.all<Snapshot>();

  std::vector<Tick> inject_times;
  for (const auto& f : plan) inject_times.push_back(f.t);
  std::sort(inject_times.begin(), inject_times.end());

  for (const auto& f : plan) {
    ResilienceSample s;
    s.node = f.node;
    s.injected = f.t;
    s.reference = f.t;
    Tick until = t.horizon;
    for (Tick x : inject_times)
      if (x > f.t) {
        until = x;
        break;
      }
    if (f.t >= t.horizon) {
      s.why = "injected after the horizon";
      out.push_back(s);
      continue;
    }

    Tick rec_ref = 0, from = f.t;
    if (!f.add) {
      // role at injection: latest role note, else the latest snapshot
      Role role = Role::Member;
      Tick role_t = -1;
      for (const auto* sn : snaps) {
        if (sn->t > f.t) break;
        for (const auto& n : sn->nodes)
          if (n.id == f.node && n.alive && n.role != Role::Dead) {
            role = n.role;
            role_t = sn->t;
          }
      }
      for (const auto* n : notes) {
        if (n->t > f.t) break;
        if (n->node == f.node && n->note.kind == NoteKind::RoleChange && n->t >= role_t) role = static_cast<Role>(n->note.a);
      }
      s.kind = role == Role::CH ? ChangeKind::ChFail
               : role == Role::BridgeCH ? ChangeKind::BridgeFail
                                        : ChangeKind::MemberFail;
      Tick last = -1;
      for (const auto* x : txs)
        if (x->node == f.node && x->end <= f.t) last = std::max(last, x->end);
      if (last >= 0) s.reference = last;
      for (const auto* n : notes)
        if (n->t >= f.t && n->t < until && n->note.kind == NoteKind::NeighborDrop && n->note.a == f.node) {
          s.detection_from_last_tx_rounds = rounds(n->t - s.reference, R);
          // with receptions in the trace: the victim's last frame that anyone received
          Tick heard = -1;
          for (const auto* r : rxs)
            if (r->from == f.node && r->ok && r->t <= f.t) heard = std::max(heard, r->t);
          if (heard >= 0) s.reference = heard;
          s.detector = n->node;
          s.detection_rounds = rounds(n->t - s.reference, R);
          break;
        }
    } else {
      bool takeover = false, singleton = false;
      Tick aff = -1, take_t = -1;
      for (const auto* n : notes) {
        if (n->node != f.node || n->t < f.t || n->t >= until) continue;
        if (n->note.kind == NoteKind::Affiliate && aff < 0) aff = n->t;
        if (n->note.kind == NoteKind::Takeover && !takeover) {
          takeover = true;
          take_t = n->t;
        }
        if (n->note.kind == NoteKind::RoleChange && n->note.a == static_cast<int>(Role::CH) && aff < 0 && !takeover) {
          singleton = true;
          aff = n->t;
        }
      }
      s.kind = takeover ? ChangeKind::AddHigh : ChangeKind::AddLow;
      if (aff >= 0) s.detection_rounds = rounds(aff - f.t, R);
      if (singleton) s.why = "singleton";
      if (takeover) {
        rec_ref = take_t;
        from = take_t;
        for (const auto* x : txs)
          if (x->node == f.node && x->takeover && x->start >= take_t) {
            rec_ref = x->start;
            break;
          }
      }
    }
    s.detection_window = detection_window(s.kind, b);
    s.recovery_window = recovery_window(s.kind);

    // nodes that re-clustered because of this change
    std::map<NodeId, std::vector<std::pair<Tick, Phase>>> per_node;
    for (const auto& p : phases)
      if (p.t >= from && p.t < until) per_node[p.node].push_back({p.t, p.to});
    bool ok = true;
    double worst = 0;
    std::size_t affected = 0;
    for (const auto& [node, evs] : per_node) {
      std::size_t elections = 0;
      Tick entry = -1;
      for (const auto& [tt, ph] : evs) {
        if (ph == Phase::Election) {
          ++elections;
          entry = tt;
        } else if (ph == Phase::Stable && entry >= 0) {
          const Tick base = s.kind == ChangeKind::AddHigh ? rec_ref : entry;
          worst = std::max(worst, rounds(tt - base, R));
          entry = -2;  // settled
        }
      }
      if (elections == 0) continue;
      ++affected;
      if (elections > 1) {
        ok = false;
        s.why = "node " + std::to_string(node) + " re-entered election";
      }
      if (entry != -2) {
        ok = false;
        if (s.why.empty()) s.why = "node " + std::to_string(node) + " did not settle";
      }
    }
    s.affected = affected;
    if (ok) s.recovery_rounds = worst;
    s.resolved = s.detection_rounds.has_value() && s.recovery_rounds.has_value();
    s.within = s.resolved && inside(*s.detection_rounds, s.detection_window) &&
               inside(*s.recovery_rounds, s.recovery_window);
    if (!s.resolved && s.why.empty()) s.why = s.detection_rounds ? "unresolved recovery" : "not detected";
    if (s.resolved && !s.within && s.why.empty()) s.why = "outside window";
    out.push_back(s);
  }
  return out;
}

CycleCheck cycle_guarantee(const Trace& t) {
  CycleCheck c;
  const Tick L = static_cast<Tick>(t.cycle_rounds) * t.round_len;
  std::map<std::pair<NodeId, NodeId>, std::vector<Tick>> rx;  // (member, ch) -> reception times
  for (const auto* r : t.all<RxRecord>())
    if (r->ok && r->kind == MsgKind::Decoric) rx[{r->node, r->from}].push_back(r->t);
  auto snaps = t.all<Snapshot>();
  std::stable_sort(snaps.begin(), snaps.end(), [](auto* a, auto* b) { return a->t < b->t; });
  if (snaps.empty()) return c;

  // state per node per snapshot: member of a stable head
  struct Run {
    NodeId ch = kNoNode;
    Tick since = 0;
  };
  std::map<NodeId, Run> runs;
  std::vector<std::tuple<NodeId, NodeId, Tick, Tick>> intervals;
  auto close = [&](NodeId m, Tick end) {
    auto it = runs.find(m);
    if (it == runs.end()) return;
    intervals.emplace_back(m, it->second.ch, it->second.since, end);
    runs.erase(it);
  };
  for (const auto* s : snaps) {
    std::map<NodeId, const NodeSnap*> by;
    for (const auto& n : s->nodes) by[n.id] = &n;
    for (const auto& n : s->nodes) {
      bool good = n.alive && n.phase == Phase::Stable && n.role == Role::Member && n.ch != kNoNode;
      if (good) {
        auto h = by.find(n.ch);
        good = h != by.end() && h->second->alive && is_head(h->second->role) && h->second->phase == Phase::Stable;
      }
      auto it = runs.find(n.id);
      if (it != runs.end() && (!good || it->second.ch != n.ch)) close(n.id, s->t);
      if (good && !runs.count(n.id)) runs[n.id] = Run{n.ch, s->t};
    }
  }
  for (auto& [m, r] : std::map<NodeId, Run>(runs)) close(m, snaps.back()->t);

  for (const auto& [m, ch, a, bnd] : intervals) {
    const auto& times = rx[{m, ch}];
    for (const auto* s : snaps) {
      if (s->t < a) continue;
      if (s->t + L > bnd) break;
      ++c.windows;
      auto it = std::upper_bound(times.begin(), times.end(), s->t);
      if (it == times.end() || *it > s->t + L) ++c.violations;
    }
  }
  return c;
}

SetupCheck setup_round_guarantee(const Trace& t) {
  SetupCheck c;
  const Tick R = t.round_len;
  std::map<NodeId, std::vector<Tick>> tx;
  for (const auto* x : t.all<TxRecord>())
    if (x->kind == MsgKind::Decoric && x->copy == 0) tx[x->node].push_back(x->start);
  std::map<NodeId, Tick> death;
  for (const auto* d : t.all<DeathRecord>()) death[d->node] = d->t;
  std::map<NodeId, bool> added;
  for (const auto* i : t.all<InjectRecord>())
    if (i->add) added[i->node] = true;
  std::map<NodeId, std::vector<std::pair<Tick, const Note*>>> changes;
  for (const auto* n : t.all<NoteRecord>())
    if (n->note.kind == NoteKind::PhaseChange) changes[n->node].push_back({n->t, &n->note});

  auto check = [&](NodeId node, Tick a, Tick b) {
    if (b > t.horizon) return;
    auto d = death.find(node);
    if (d != death.end() && d->second < b) return;
    ++c.rounds;
    const auto& v = tx[node];
    auto it = std::lower_bound(v.begin(), v.end(), a);
    if (it == v.end() || *it >= b) {
      ++c.violations;
      c.missed.push_back({node, a});
    }
  };
  for (const auto& [node, ch] : changes) {
    for (std::size_t i = 0; i < ch.size(); ++i) {
      const auto [tt, note] = ch[i];
      const auto from = static_cast<Phase>(note->a), to = static_cast<Phase>(note->b);
      if (from == Phase::Discovery && to == Phase::Election && !added.count(node)) check(node, tt - R, tt);
      if (to == Phase::Election || to == Phase::Correction) {
        const Tick end = i + 1 < ch.size() ? ch[i + 1].first : t.horizon + 1;
        check(node, tt, end);
      }
    }
  }
  return c;
}

}  // namespace decoric
