#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "decoric/baselines.hpp"
#include "decoric/decoric.hpp"
#include "decoric/energy.hpp"
#include "decoric/mac_timing.hpp"
#include "decoric/topology.hpp"
#include "decoric/trace.hpp"

namespace decoric {

enum class Protocol : std::uint8_t { Decoric, Leach, Beem };
const char* to_string(Protocol p);
Protocol protocol_from(const std::string& s);

struct FaultAction {
  Tick t = 0;
  NodeId node = 0;
  bool add = false;
  Point pos;  // add only
};

struct RunSpec {
  Protocol protocol = Protocol::Decoric;
  Topology topo;
  MacParams mac;
  RdcParams rdc;
  DecoricParams decoric;
  LeachParams leach;
  BeemParams beem;
  PowerModel power;
  Tick horizon = 1000 * kTicksPerSecond;
  Tick round_len = 0;  // 0: derived from mac
  std::uint32_t cycle_rounds = 0;  // 0: derived from round and rdc
  std::vector<FaultAction> faults;
  TraceLevel level = TraceLevel::Events;
  std::uint32_t snapshot_rounds = 1;
  Tick cpu_ticks = 100;
  Tick boot_jitter = 1000;
  // End the run this long after the network first settles.
  std::optional<Tick> stop_after_settled;
  nlohmann::json config;  // echoed into the trace header
};

// Resolved round length and cycle for a spec.
Tick effective_round(const RunSpec& s);
std::uint32_t effective_cycle(const RunSpec& s);
// Copies in a strobe train: long enough for any duty-cycled neighbour to wake inside it.
std::uint32_t strobe_copies(const MacParams& m, const RdcParams& r);

Trace run(const RunSpec& spec, std::uint64_t seed);

}  // namespace decoric
