#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "decoric/frame.hpp"
#include "decoric/rng.hpp"
#include "decoric/topology.hpp"
#include "decoric/types.hpp"

namespace decoric {

enum class RadioMode : std::uint8_t { AlwaysOn, DutyCycled, Off };

enum class TxMode : std::uint8_t {
  Single,     // one copy after CSMA
  Strobe,     // copy repeated for one RDC period after CSMA
  Scheduled,  // TDMA slot: no CSMA, no interference with other clusters
};

enum class MsgKind : std::uint8_t {
  Decoric,
  Advert,     // baseline CH advertisement
  Join,       // baseline join request
  Schedule,   // baseline TDMA schedule
  Data,       // baseline steady-state report
  Hello,      // BEEM neighbour discovery
  Candidate,  // BEEM CH candidacy
};
const char* to_string(MsgKind k);

struct TxRequest {
  MsgKind kind = MsgKind::Decoric;
  TxMode mode = TxMode::Single;
  Tick earliest = 0;  // CSMA may start anywhere in [earliest, latest]; Scheduled starts at earliest
  Tick latest = 0;
  NodeId dest = kNoNode;  // addressed receiver; others still overhear but the protocol may ignore
  std::uint16_t aux = 0;  // baseline-specific field (e.g. BEEM score)
  bool takeover = false;  // DeCoRIC: sets new_ch_id in the materialised frame
};

enum class NoteKind : std::uint8_t {
  PhaseChange,   // a = from phase, b = to phase
  RoleChange,    // a = new role, b = ch_id
  NeighborAdd,   // a = neighbour
  NeighborDrop,  // a = neighbour, b = 1 if it was a CH/bridge
  Affiliate,     // a = ch
  Takeover,      // a = old ch
  Promote,       // a = the node that named us
  Bridge,        // a = own ch, b = foreign ch
  ElectionTrigger,  // a = cause (see decoric.hpp), b = related node
  ClusterComplete,  // baseline: clustering of the epoch finished
  TxDropped,        // CSMA gave up for this round
};
const char* to_string(NoteKind k);

struct Note {
  NoteKind kind;
  std::int32_t a = 0;
  std::int32_t b = 0;
};

struct StepOut {
  std::vector<TxRequest> tx;
  std::optional<RadioMode> radio;
  bool restart_round = false;
  std::vector<Note> notes;
};

struct StepEnv {
  Tick now = 0;
  Tick round_start = 0;  // start of the node's current round
  Tick round_len = 0;
  Tick tx_margin = 0;    // reserved at the end of a round for CSMA and airtime
  Tick slot_len = 0;     // TDMA slot (frame time plus spacing)
  double energy_fraction = 1.0;  // residual / initial
  Rng* rng = nullptr;

  // Uniform CSMA start window inside the current round.
  TxRequest in_round(MsgKind k, TxMode m) const;
};

struct Reception {
  MsgKind kind = MsgKind::Decoric;
  NodeId from = 0;
  NodeId dest = kNoNode;
  std::uint16_t aux = 0;
  LinkClass link = LinkClass::Potential;
  double rssi = 0.0;
  Frame frame;
};

struct NodeView {
  Role role = Role::CH;
  Phase phase = Phase::Discovery;
  NodeId ch_id = 0;
  std::uint16_t degree = 0;
};

// Per-node protocol instance driven by the engine.
class NodeAgent {
 public:
  virtual ~NodeAgent() = default;
  virtual void boot(const StepEnv& env, bool joining, StepOut& out) = 0;
  virtual void on_receive(const StepEnv& env, const Reception& rx, StepOut& out) = 0;
  virtual void on_round(const StepEnv& env, StepOut& out) = 0;
  // Builds the payload at the moment the transmission starts.
  virtual Frame materialize(const TxRequest& req, Tick now, Tick round_len) const = 0;
  virtual NodeView view() const = 0;
  virtual RadioMode radio() const = 0;
  // Whether the network-wide "clustering complete" condition holds for this node.
  virtual bool settled() const = 0;
};

}  // namespace decoric
