#include "decoric/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace decoric {

EpochStage epoch_stage(std::uint32_t k) {
  return k >= 3 ? EpochStage::Steady : static_cast<EpochStage>(k);
}

std::uint64_t leach_rotation(double p) {
  return static_cast<std::uint64_t>(std::ceil(1.0 / p - 1e-12));
}

double leach_threshold(double p, std::uint64_t r, bool was_ch_this_cycle) {
  if (was_ch_this_cycle) return 0.0;
  const double denom = 1.0 - p * static_cast<double>(r % leach_rotation(p));
  if (denom <= p) return 1.0;
  return std::min(1.0, p / denom);
}

double beem_score(double c_prob, double residual, double energy_max) {
  if (energy_max <= 0) return 0.0;
  return c_prob * std::clamp(residual / energy_max, 0.0, 1.0);
}

bool beem_prefers(const BeemCandidate& a, const BeemCandidate& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.degree != b.degree) return a.degree > b.degree;
  return a.id < b.id;
}

std::uint16_t beem_quantize(double score, double c_prob) {
  if (c_prob <= 0) return 0;
  const double q = std::round(std::clamp(score / c_prob, 0.0, 1.0) * 65535.0);
  return static_cast<std::uint16_t>(q);
}

namespace {

struct Heard {
  NodeId id;
  double rssi;
  std::uint16_t aux;
  std::uint16_t degree;
};

// Shared epoch skeleton: advert, join, TDMA schedule, steady-state reports.
class BaselineAgent : public NodeAgent {
 public:
  BaselineAgent(NodeId id, std::uint32_t epoch, std::size_t max_nodes) : epoch_len_(epoch), max_nodes_(max_nodes) {
    ctx_.id = id;
  }

  void boot(const StepEnv& env, bool, StepOut& out) override {
    ctx_.residual = env.energy_fraction;
    k_ = 0;
    start_epoch(env, out);
  }

  void on_round(const StepEnv& env, StepOut& out) override {
    ctx_.residual = env.energy_fraction;
    if (pre_epoch_round(env, out)) return;
    k_ = (k_ + 1) % epoch_len_;
    ++ctx_.rounds_since_election;
    if (k_ == 0) {
      ++ctx_.epoch;
      start_epoch(env, out);
      return;
    }
    switch (epoch_stage(k_)) {
      case EpochStage::Join: join_stage(env, out); break;
      case EpochStage::Schedule: schedule_stage(env, out); break;
      default: steady_round(env, out); break;
    }
  }

  void on_receive(const StepEnv& env, const Reception& rx, StepOut& out) override {
    ctx_.residual = env.energy_fraction;
    switch (rx.kind) {
      case MsgKind::Advert:
        if (k_ == 0 && !is_head()) adverts_.push_back({rx.from, rx.rssi, rx.aux, rx.frame.degree});
        break;
      case MsgKind::Join:
        if (rx.dest != ctx_.id) break;
        if (!is_head()) on_chosen(out);
        if (is_head() && std::find(ctx_.members.begin(), ctx_.members.end(), rx.from) == ctx_.members.end())
          ctx_.members.push_back(rx.from);
        break;
      case MsgKind::Schedule:
        if (!is_head() && rx.from == ctx_.ch && rx.frame.neighbors.test(ctx_.id)) {
          std::uint32_t slot = 0;
          for (NodeId m : rx.frame.neighbors.members()) {
            if (m == ctx_.id) break;
            ++slot;
          }
          ctx_.slot = slot;
          ctx_.scheduled = true;
        }
        break;
      default: receive_other(rx); break;
    }
  }

  Frame materialize(const TxRequest& req, Tick, Tick) const override {
    Frame f = make_frame(ctx_.id, max_nodes_);
    f.ch_id = ctx_.ch == kNoNode ? ctx_.id : ctx_.ch;
    f.degree = degree_;
    if (req.kind == MsgKind::Schedule) {
      for (NodeId m : ctx_.members)
        if (m < max_nodes_) f.neighbors.set(m);
    }
    return f;
  }

  NodeView view() const override {
    NodeView v;
    v.role = ctx_.role;
    v.phase = settled() ? Phase::Stable : Phase::Election;
    v.ch_id = ctx_.role == Role::CH ? ctx_.id : ctx_.ch;
    v.degree = degree_;
    return v;
  }

  RadioMode radio() const override { return radio_; }
  bool settled() const override { return started_ && epoch_stage(k_) == EpochStage::Steady; }
  const BaselineCtx& ctx() const { return ctx_; }

 protected:
  bool is_head() const { return ctx_.role == Role::CH; }

  // Called at epoch start; returns true if this node is a CH for the epoch.
  virtual bool elect(const StepEnv& env) = 0;
  // Called at the join stage by non-CH nodes; returns the chosen CH or nullopt.
  virtual std::optional<NodeId> choose(const StepEnv& env) = 0;
  // Extra setup rounds before the first epoch; true while consumed.
  virtual bool pre_epoch_round(const StepEnv&, StepOut&) { return false; }
  virtual void receive_other(const Reception&) {}
  // A Join arrived although we are not a CH.
  virtual void on_chosen(StepOut&) {}
  // Stay reachable for Joins during the join round (needed when joins can promote).
  virtual bool listen_in_join() const { return false; }
  virtual void advertise(const StepEnv& env, StepOut& out) {
    out.tx.push_back(env.in_round(MsgKind::Advert, TxMode::Single));
  }

  void set_radio(RadioMode m, StepOut& out) {
    radio_ = m;
    out.radio = m;
  }

  void become_head(StepOut& out) {
    ctx_.role = Role::CH;
    ctx_.ch = ctx_.id;
    ctx_.standalone = false;
    set_radio(RadioMode::AlwaysOn, out);
    out.notes.push_back({NoteKind::RoleChange, static_cast<std::int32_t>(Role::CH), ctx_.id});
  }

  void start_epoch(const StepEnv& env, StepOut& out) {
    started_ = true;
    adverts_.clear();
    ctx_.members.clear();
    ctx_.scheduled = false;
    ctx_.slot = 0;
    ctx_.rounds_since_election = 0;
    ctx_.standalone = false;
    set_radio(RadioMode::AlwaysOn, out);
    if (elect(env)) {
      if (!is_head() || ctx_.ch != ctx_.id) become_head(out);
      advertise(env, out);
    } else {
      ctx_.role = Role::Member;
      ctx_.ch = kNoNode;
      advertise_candidate(env, out);
    }
  }

  virtual void advertise_candidate(const StepEnv&, StepOut&) {}

  void join_stage(const StepEnv& env, StepOut& out) {
    if (is_head()) return;
    const auto ch = choose(env);
    if (!ch || *ch == ctx_.id) {
      if (ch) {
        become_head(out);
        return;
      }
      ctx_.ch = kNoNode;
      ctx_.standalone = true;
      set_radio(RadioMode::Off, out);
      return;
    }
    ctx_.ch = *ch;
    out.notes.push_back({NoteKind::Affiliate, *ch, 0});
    TxRequest r = env.in_round(MsgKind::Join, TxMode::Single);
    r.dest = *ch;
    out.tx.push_back(r);
    if (!listen_in_join()) set_radio(RadioMode::Off, out);
  }

  void schedule_stage(const StepEnv& env, StepOut& out) {
    if (is_head()) {
      std::sort(ctx_.members.begin(), ctx_.members.end());
      out.tx.push_back(env.in_round(MsgKind::Schedule, TxMode::Single));
      return;
    }
    if (ctx_.ch != kNoNode) set_radio(RadioMode::AlwaysOn, out);
  }

  void steady_round(const StepEnv& env, StepOut& out) {
    if (k_ == 3) out.notes.push_back({NoteKind::ClusterComplete, static_cast<std::int32_t>(ctx_.epoch), 0});
    TxRequest r;
    r.kind = MsgKind::Data;
    r.mode = TxMode::Scheduled;
    const Tick guard = env.slot_len;
    if (is_head()) {
      // aggregate to the sink after the member slots
      r.earliest = env.round_start + guard + static_cast<Tick>(ctx_.members.size() + 1) * env.slot_len;
    } else {
      set_radio(RadioMode::Off, out);
      if (ctx_.scheduled) {
        r.earliest = env.round_start + guard + static_cast<Tick>(ctx_.slot) * env.slot_len;
        r.dest = ctx_.ch;
      } else {
        // unclustered or unscheduled: straight to the sink at a random offset
        const Tick span = std::max<Tick>(1, env.round_len - env.tx_margin - guard);
        r.earliest = env.round_start + guard + static_cast<Tick>(env.rng->below(static_cast<std::uint64_t>(span)));
      }
    }
    r.earliest = std::min(r.earliest, env.round_start + env.round_len - env.slot_len);
    r.latest = r.earliest;
    out.tx.push_back(r);
  }

  BaselineCtx ctx_;
  std::uint32_t epoch_len_;
  std::size_t max_nodes_;
  std::uint32_t k_ = 0;
  bool started_ = false;
  std::uint16_t degree_ = 0;
  RadioMode radio_ = RadioMode::AlwaysOn;
  std::vector<Heard> adverts_;
};

class LeachAgent final : public BaselineAgent {
 public:
  LeachAgent(NodeId id, const LeachParams& p, std::size_t max_nodes)
      : BaselineAgent(id, p.epoch, max_nodes), p_(p) {}

 private:
  bool elect(const StepEnv& env) override {
    const std::uint64_t rot = leach_rotation(p_.p);
    const std::uint64_t r = ctx_.epoch;
    const bool was_ch = last_ch_epoch_ && (*last_ch_epoch_ / rot) == (r / rot);
    const bool head = env.rng->chance(leach_threshold(p_.p, r, was_ch));
    if (head) last_ch_epoch_ = r;
    return head;
  }

  std::optional<NodeId> choose(const StepEnv&) override {
    const Heard* best = nullptr;
    for (const auto& h : adverts_)
      if (!best || h.rssi > best->rssi || (h.rssi == best->rssi && h.id < best->id)) best = &h;
    if (!best) return std::nullopt;
    return best->id;
  }

  LeachParams p_;
  std::optional<std::uint64_t> last_ch_epoch_;
};

class BeemAgent final : public BaselineAgent {
 public:
  BeemAgent(NodeId id, const BeemParams& p, std::size_t max_nodes) : BaselineAgent(id, p.epoch, max_nodes), p_(p) {}

  void boot(const StepEnv& env, bool, StepOut& out) override {
    ctx_.residual = env.energy_fraction;
    hello_ = true;
    set_radio(RadioMode::AlwaysOn, out);
    out.tx.push_back(env.in_round(MsgKind::Hello, TxMode::Single));
  }

 private:
  bool pre_epoch_round(const StepEnv& env, StepOut& out) override {
    if (!hello_) return false;
    hello_ = false;
    degree_ = static_cast<std::uint16_t>(hello_from_.size());
    k_ = 0;
    start_epoch(env, out);
    return true;
  }

  void receive_other(const Reception& rx) override {
    if (rx.kind == MsgKind::Hello) {
      if (std::find(hello_from_.begin(), hello_from_.end(), rx.from) == hello_from_.end()) hello_from_.push_back(rx.from);
    } else if (rx.kind == MsgKind::Candidate && k_ == 0 && !is_head()) {
      candidates_.push_back({rx.from, rx.rssi, rx.aux, rx.frame.degree});
    }
  }

  // Surviving CHs keep their role across epochs.
  bool elect(const StepEnv&) override {
    candidates_.clear();
    return is_head();
  }

  void advertise_candidate(const StepEnv& env, StepOut& out) override {
    TxRequest r = env.in_round(MsgKind::Candidate, TxMode::Single);
    score_ = own_score();
    r.aux = score_;
    out.tx.push_back(r);
  }

  std::uint16_t own_score() const { return beem_quantize(beem_score(p_.c_prob, ctx_.residual, 1.0), p_.c_prob); }

  std::optional<NodeId> choose(const StepEnv&) override {
    const Heard* best = nullptr;
    for (const auto& h : adverts_) {
      if (h.rssi < p_.cluster_rssi_dbm) continue;
      if (!best || h.rssi > best->rssi || (h.rssi == best->rssi && h.id < best->id)) best = &h;
    }
    if (best) return best->id;
    // compare with the score we advertised, not today's slightly lower one
    BeemCandidate win{ctx_.id, static_cast<double>(score_), degree_};
    for (const auto& h : candidates_) {
      if (h.rssi < p_.cluster_rssi_dbm) continue;
      BeemCandidate c{h.id, static_cast<double>(h.aux), h.degree};
      if (beem_prefers(c, win)) win = c;
    }
    return win.id;
  }

  void on_chosen(StepOut& out) override {
    out.notes.push_back({NoteKind::Promote, ctx_.ch == kNoNode ? ctx_.id : ctx_.ch, 0});
    become_head(out);
  }

  bool listen_in_join() const override { return true; }

  BeemParams p_;
  std::uint16_t score_ = 0;
  bool hello_ = false;
  std::vector<NodeId> hello_from_;
  std::vector<Heard> candidates_;
};

}  // namespace

std::unique_ptr<NodeAgent> make_leach_agent(NodeId id, const LeachParams& p, std::size_t max_nodes) {
  return std::make_unique<LeachAgent>(id, p, max_nodes);
}

std::unique_ptr<NodeAgent> make_beem_agent(NodeId id, const BeemParams& p, std::size_t max_nodes) {
  return std::make_unique<BeemAgent>(id, p, max_nodes);
}

const BaselineCtx* baseline_ctx(const NodeAgent& a) {
  auto* b = dynamic_cast<const BaselineAgent*>(&a);
  return b ? &b->ctx() : nullptr;
}

}  // namespace decoric
