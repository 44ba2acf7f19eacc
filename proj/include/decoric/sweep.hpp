#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "decoric/config.hpp"
#include "decoric/metrics.hpp"

namespace decoric {

struct RunSummary {
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  bool settled = false;
  double settle_time_s = 0;
  double connectivity = 0;  // at the first all-settled snapshot
  double ch_count = 0;
  double clustering_energy_mwh = 0;
  double avg_power_mw = 0;
  std::optional<double> first_death_s;
  std::size_t deaths = 0;
  std::size_t resilience_samples = 0;
  std::size_t resilience_within = 0;
};

RunSummary summarize(const ScenarioConfig& c, const Trace& t);
// Runs one seed and summarises it; exceptions become a failed summary.
RunSummary run_and_summarize(const ScenarioConfig& c, std::uint64_t seed);

struct SweepAxis {
  std::string field;  // JSON pointer into the config, e.g. /rssi_threshold
  std::vector<nlohmann::json> values;
};
SweepAxis parse_axis(const std::string& spec);  // "field=v1,v2,..."

struct Stat {
  double min = 0, mean = 0, max = 0;
  std::size_t n = 0;
};
Stat stat_of(const std::vector<double>& v);

struct CellReport {
  nlohmann::json cell;    // axis field -> value
  nlohmann::json config;  // normalised config of this cell
  std::string error;      // cell config invalid
  std::vector<RunSummary> runs;
  Stat connectivity, ch_count, settle_time_s, clustering_energy_mwh, avg_power_mw, first_death_s;
  std::size_t failures = 0;
};

// Worker count: DECORIC_WORKERS if set, else the hardware concurrency.
unsigned worker_count();
// Cartesian product of axes x seeds; cells run in a worker pool.
std::vector<CellReport> sweep(const nlohmann::json& base, const std::vector<SweepAxis>& axes, unsigned workers = 0);

}  // namespace decoric
