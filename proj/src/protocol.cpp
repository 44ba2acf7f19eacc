#include "decoric/protocol.hpp"

#include <algorithm>

namespace decoric {

const char* to_string(MsgKind k) {
  switch (k) {
    case MsgKind::Decoric: return "decoric";
    case MsgKind::Advert: return "advert";
    case MsgKind::Join: return "join";
    case MsgKind::Schedule: return "schedule";
    case MsgKind::Data: return "data";
    case MsgKind::Hello: return "hello";
    case MsgKind::Candidate: return "candidate";
  }
  return "?";
}

const char* to_string(NoteKind k) {
  switch (k) {
    case NoteKind::PhaseChange: return "phase";
    case NoteKind::RoleChange: return "role";
    case NoteKind::NeighborAdd: return "nbr_add";
    case NoteKind::NeighborDrop: return "nbr_drop";
    case NoteKind::Affiliate: return "affiliate";
    case NoteKind::Takeover: return "takeover";
    case NoteKind::Promote: return "promote";
    case NoteKind::Bridge: return "bridge";
    case NoteKind::ElectionTrigger: return "election_trigger";
    case NoteKind::ClusterComplete: return "cluster_complete";
    case NoteKind::TxDropped: return "tx_dropped";
  }
  return "?";
}

TxRequest StepEnv::in_round(MsgKind k, TxMode m) const {
  TxRequest r;
  r.kind = k;
  r.mode = m;
  r.earliest = round_start + 1;
  r.latest = std::max(r.earliest, round_start + round_len - tx_margin);
  return r;
}

}  // namespace decoric
