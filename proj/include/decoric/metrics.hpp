#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "decoric/engine.hpp"
#include "decoric/trace.hpp"

namespace decoric {

// Cluster graph view of one snapshot.
struct ClusterSnapshot {
  Tick t = 0;
  struct Node {
    NodeId id;
    Role role;
    NodeId ch;
  };
  std::vector<Node> nodes;  // dead nodes have role Dead
  std::vector<std::pair<NodeId, NodeId>> edges;
};

ClusterSnapshot cluster_snapshot(const Snapshot& s, const Topology& topo);
// Largest component of the member-CH and in-range CH-CH graph over n_total.
double connectivity_ratio(const ClusterSnapshot& s, std::size_t n_total);
double connectivity_ratio(const Snapshot& s, const Topology& topo);  // over alive nodes
// Alive CH and Bridge-CH nodes. Throws if alive nodes exist but none heads a cluster.
std::size_t ch_count(const ClusterSnapshot& s);
std::size_t ch_count(const Snapshot& s);

struct PowerStats {
  std::vector<double> node_avg_mw;  // per node, indexed like the final snapshot
  double network_avg_mw = 0;
  std::optional<double> first_death_s;
  std::vector<double> death_times_s;  // ascending
};
PowerStats power_stats(const Trace& t);

struct ClusteringCost {
  bool settled = false;
  double time_s = 0;
  double energy_mwh = 0;
  double connectivity = 0;
  double time_norm = 0;
  double energy_norm = 0;
  bool unnormalized = false;  // connectivity 0
  std::vector<double> settle_times_s;  // every transition to all-settled (per epoch for baselines)
};
ClusteringCost clustering_cost(const Trace& t);

enum class ChangeKind : std::uint8_t { ChFail, BridgeFail, MemberFail, AddLow, AddHigh };
const char* to_string(ChangeKind k);

struct Window {
  double lo = 0, hi = 0;  // rounds, inclusive
};

struct ResilienceSample {
  ChangeKind kind = ChangeKind::MemberFail;
  NodeId node = 0;
  Tick injected = 0;
  Tick reference = 0;  // detection measured from here: the victim's last frame anyone received, else its last tx
  NodeId detector = kNoNode;
  std::optional<double> detection_rounds;
  std::optional<double> detection_from_last_tx_rounds;  // kills only
  std::optional<double> recovery_rounds;
  Window detection_window;
  Window recovery_window;
  std::size_t affected = 0;
  bool resolved = false;  // detection and recovery both observed before the horizon
  bool within = false;
  std::string why;  // reason when not within
};

struct ResilienceBounds {
  std::uint32_t t_fail_ch = 6;
  std::uint32_t t_fail_nch = 36;
  std::uint32_t cycle = 6;
  std::uint32_t join_rounds = 3;
};
// Table of bounds per change kind, in rounds.
Window detection_window(ChangeKind k, const ResilienceBounds& b);
Window recovery_window(ChangeKind k);

std::vector<ResilienceSample> resilience_latencies(const Trace& t, const std::vector<FaultAction>& plan,
                                                   const ResilienceBounds& b);

// Per member, whether every cycle-long window of continuous membership contains a frame from its CH.
struct CycleCheck {
  std::size_t windows = 0;
  std::size_t violations = 0;
};
CycleCheck cycle_guarantee(const Trace& t);
// Setup rounds in which a node sent no DeCoRIC frame.
struct SetupCheck {
  std::size_t rounds = 0;
  std::size_t violations = 0;
  std::vector<std::pair<NodeId, Tick>> missed;  // node, window start
};
SetupCheck setup_round_guarantee(const Trace& t);

}  // namespace decoric
