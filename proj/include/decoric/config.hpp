#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "decoric/engine.hpp"
#include "decoric/metrics.hpp"

namespace decoric {

struct FaultSpec {
  double t_s = 0;
  NodeId node = 0;
  bool add = false;
  Point pos;
};

struct ScenarioConfig {
  nlohmann::json doc;  // fully normalised, embedded in every output

  Protocol protocol = Protocol::Decoric;
  std::size_t n_nodes = 50;
  double width = 100, height = 100;
  double radio_range = 50;
  double rssi_threshold = -65;
  double gamma = 2.0, sensitivity_dbm = -67.0, d0_m = 1.0, tx_power_dbm = 0.0;
  MacParams mac;
  RdcParams rdc;
  std::optional<std::uint32_t> cycle_rounds;
  double t_fail_ch_cycles = 1, t_fail_nch_cycles = 6;
  DecoricParams decoric;
  LeachParams leach;
  BeemParams beem;
  double beem_cluster_radius_m = 25;
  PowerModel power;
  double horizon_s = 1000;
  std::vector<FaultSpec> faults;
  std::vector<std::uint64_t> seeds{1};
  std::string topology_source = "random";
  std::string topology_path;
  TraceLevel level = TraceLevel::Events;
  bool binary_trace = false;
  std::uint32_t snapshot_rounds = 1;
  std::optional<double> stop_after_settled_s;
  Tick cpu_ticks = 100;
  Tick boot_jitter = 1000;
  std::string out_dir = "out";

  Tick round_len() const { return round_duration(mac); }
  std::uint32_t cycle() const;
};

struct ConfigError {
  std::string path;
  std::string message;
};

struct Validation {
  std::optional<ScenarioConfig> config;
  std::vector<ConfigError> errors;
  bool ok() const { return errors.empty(); }
};

nlohmann::json default_config_json();
// Fills defaults and checks every field and cross-field rule; errors carry JSON paths.
Validation validate(const nlohmann::json& in);
Validation validate_text(const std::string& text);  // empty text means all defaults
// Throws std::invalid_argument listing every error.
ScenarioConfig load_config(const std::string& path);
ScenarioConfig config_from_json(const nlohmann::json& in);

// Resolves topology, timing and protocol constants for one seed.
RunSpec make_run_spec(const ScenarioConfig& c, std::uint64_t seed);
Topology make_topology(const ScenarioConfig& c, std::uint64_t seed);
std::vector<FaultAction> fault_plan(const ScenarioConfig& c);
ResilienceBounds resilience_bounds(const ScenarioConfig& c);

}  // namespace decoric
