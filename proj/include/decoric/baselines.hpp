#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "decoric/protocol.hpp"

namespace decoric {

struct LeachParams {
  double p = 0.1;
  std::uint32_t epoch = 10;  // rounds
};

struct BeemParams {
  double c_prob = 0.05;
  std::uint32_t epoch = 10;
  double cluster_rssi_dbm = -61.0;  // candidates must be heard at least this strong (cluster radius)
};

// Rounds of an epoch: advert, join, schedule, then steady state.
enum class EpochStage : std::uint8_t { Advert = 0, Join = 1, Schedule = 2, Steady = 3 };
EpochStage epoch_stage(std::uint32_t round_in_epoch);

// LEACH threshold T(n) for epoch index r.
double leach_threshold(double p, std::uint64_t r, bool was_ch_this_cycle);
// Epochs per rotation, ceil(1/p).
std::uint64_t leach_rotation(double p);

struct BeemCandidate {
  NodeId id = 0;
  double score = 0.0;
  std::uint16_t degree = 0;
};
double beem_score(double c_prob, double residual, double energy_max);
// Strict preference: higher score, then higher degree, then lower id.
bool beem_prefers(const BeemCandidate& a, const BeemCandidate& b);
// Scores travel in a 16-bit frame field.
std::uint16_t beem_quantize(double score, double c_prob);

struct BaselineCtx {
  NodeId id = 0;
  Role role = Role::Member;
  NodeId ch = kNoNode;   // kNoNode: unclustered
  bool standalone = false;
  double residual = 1.0;  // fraction of the initial battery
  std::uint64_t epoch = 0;
  std::uint32_t rounds_since_election = 0;
  std::uint32_t slot = 0;
  bool scheduled = false;
  std::vector<NodeId> members;
};

std::unique_ptr<NodeAgent> make_leach_agent(NodeId id, const LeachParams& p, std::size_t max_nodes);
std::unique_ptr<NodeAgent> make_beem_agent(NodeId id, const BeemParams& p, std::size_t max_nodes);
const BaselineCtx* baseline_ctx(const NodeAgent& a);

}  // namespace decoric
