#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "decoric/fail_counter.hpp"
#include "decoric/frame.hpp"
#include "decoric/protocol.hpp"
#include "decoric/topology.hpp"

namespace decoric {

enum class TieRule : std::uint8_t { LowerId, HigherId, Priority };

struct DecoricParams {
  std::uint32_t t_fail_ch = 6;    // rounds
  std::uint32_t t_fail_nch = 36;  // rounds
  std::uint32_t cycle = 6;        // rounds
  std::uint32_t join_affiliate_rounds = 3;
  std::uint32_t fresh_rounds = 2;  // gossip window for stable connectivity lists
  TieRule tie = TieRule::LowerId;
  std::vector<NodeId> priority;  // TieRule::Priority, earlier wins
  std::size_t max_nodes = 200;
};

// True when candidate (deg_a, a) beats (deg_b, b) under the election rule.
bool election_prefers(std::uint16_t deg_a, NodeId a, std::uint16_t deg_b, NodeId b, const DecoricParams& p);

struct NeighborEntry {
  NodeId id = 0;
  bool external = false;
  FailCounter fail;
  bool connected = true;
  bool was_ch = false;  // last known role CH or bridge
  std::uint16_t degree = 0;
  NodeId ch_id = kNoNode;
  NodeSet conn;  // last received connectivity list
  Tick last_direct = 0;
};

enum class TriggerCause : std::int32_t { NeighborLoss = 1, Takeover = 2, Resigned = 3, Joining = 4 };

struct Action {
  bool broadcast = false;
  bool takeover = false;
  std::optional<Phase> transition;
  std::vector<Note> notes;
};

struct NodeCtx {
  NodeId id = 0;
  Phase phase = Phase::Discovery;
  NodeId ch_id = 0;
  std::uint16_t ch_degree = 0;
  bool is_bridge = false;
  bool ch_confirmed = false;
  std::vector<NodeId> unbridged;  // foreign CHs heard in Correction that do not list my CH
  std::map<NodeId, NeighborEntry> neighbors;
  std::uint32_t rounds_elapsed = 0;
  std::uint32_t cycle_pos = 0;
  // election working state
  NodeId best_id = 0;
  std::uint16_t best_degree = 0;
  bool ever_stable = false;
  // integration of a node added to a running network
  bool joining = false;
  std::uint32_t join_rounds = 0;
  bool affiliated = false;
  std::map<NodeId, std::uint16_t> ch_heard;  // potential CHs heard while joining
  NodeId takeover_from = kNoNode;
  DecoricParams params;

  std::uint16_t degree() const { return static_cast<std::uint16_t>(neighbors.size()); }
  bool is_ch() const { return ch_id == id; }
  Role role() const { return is_bridge ? Role::BridgeCH : (is_ch() ? Role::CH : Role::Member); }
  std::uint32_t t_fail_for(const NeighborEntry& n) const { return n.was_ch ? params.t_fail_ch : params.t_fail_nch; }
};

NodeCtx make_ctx(NodeId id, const DecoricParams& p);

// Liveness and neighbour-table update common to every phase. Returns true if the sender was new.
bool observe(NodeCtx& ctx, const Frame& f, LinkClass link, Tick now, Action* act = nullptr);

void discovery_on_receive(NodeCtx& ctx, const Frame& f, LinkClass link, Tick now = 0);
void election_on_receive(NodeCtx& ctx, const Frame& f, LinkClass link, Tick now = 0);
void correction_on_receive(NodeCtx& ctx, const Frame& f, LinkClass link, Tick now = 0, Action* act = nullptr);
Action stable_on_receive(NodeCtx& ctx, const Frame& f, LinkClass link, Tick now = 0);
Action stable_on_round(NodeCtx& ctx);
// Setup-phase round boundary (Discovery/Election/Correction, or the listening mode of a joining node).
Action phase_timer(NodeCtx& ctx, bool round_elapsed = true);
// Listening mode of a node powered up into a running network.
void join_on_receive(NodeCtx& ctx, const Frame& f, LinkClass link, Tick now = 0);
Action join_on_round(NodeCtx& ctx);

void enter_election(NodeCtx& ctx, Action& act, TriggerCause cause, NodeId related);

// The frame a node would send now. Stable frames list only neighbours heard within fresh_rounds.
Frame build_frame(const NodeCtx& ctx, Tick now, Tick round_len, bool takeover = false);

std::unique_ptr<NodeAgent> make_decoric_agent(NodeId id, const DecoricParams& p);
// Access to the protocol state of an agent made by make_decoric_agent (tests and tracing).
const NodeCtx* decoric_ctx(const NodeAgent& a);

}  // namespace decoric
