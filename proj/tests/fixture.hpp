#pragma once

#include <map>
#include <set>
#include <string>

#include <json.hpp>

#include "decoric/config.hpp"

namespace fixture {

std::string path(const std::string& name);

// The 14-node worked example: hand-placed so that node 3 has degree 7, node 8 is external to it
// and nodes 4, 12, 13 form an isolated triangle hanging off node 9.
nlohmann::json worked_example(double kill_node4_at_s = -1, double horizon_s = 20);

struct Outcome {
  std::set<decoric::NodeId> heads;    // CH and Bridge-CH
  std::set<decoric::NodeId> bridges;
  std::map<decoric::NodeId, decoric::NodeId> ch_of;
  std::size_t ch_count = 0;
};
// Roles in the last snapshot at or before t.
Outcome outcome_at(const decoric::Trace& t, decoric::Tick at);

}  // namespace fixture

namespace fixture {

struct ScriptResult {
  std::string name;
  bool ok = false;
  std::string detail;
};
// Scripted neighbour-liveness sequences checked against the per-round rule:
// fail >= T drops connectivity, fail >= 2T removes the neighbour, otherwise fail += 1;
// direct frames reset, gossip resets a connected entry and halves a disconnected one.
std::vector<ScriptResult> fail_counter_scripts();

}  // namespace fixture
