#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "decoric/metrics.hpp"
#include "decoric/sweep.hpp"

namespace decoric {

// Tab-separated tables. Every table starts with "# config <json>" so results carry their scenario.
void write_snapshot_table(const Trace& t, std::ostream& os);
void write_resilience_table(const std::vector<ResilienceSample>& s, const nlohmann::json& config, std::ostream& os);
void write_run_summary(const RunSummary& r, const nlohmann::json& config, std::ostream& os);
void write_sweep_table(const std::vector<CellReport>& cells, const nlohmann::json& base, std::ostream& os);
void write_sweep_runs(const std::vector<CellReport>& cells, const nlohmann::json& base, std::ostream& os);

// Bar chart of one aggregated metric per cell (mean with min/max whiskers).
std::string sweep_svg(const std::vector<CellReport>& cells, const std::string& metric);

}  // namespace decoric
