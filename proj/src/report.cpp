#include "decoric/report.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace decoric {

using nlohmann::json;

namespace {

void header(const json& config, std::ostream& os) { os << "# config " << config.dump() << '\n'; }

std::string opt(const std::optional<double>& v) {
  if (!v) return "NA";
  std::ostringstream os;
  os << *v;
  return os.str();
}

std::string cell_label(const json& cell) {
  std::string s;
  for (auto it = cell.begin(); it != cell.end(); ++it) {
    if (!s.empty()) s += ' ';
    s += it.key().substr(1) + "=" + (it->is_string() ? it->get<std::string>() : it->dump());
  }
  return s.empty() ? "base" : s;
}

const Stat& pick(const CellReport& c, const std::string& m) {
  if (m == "connectivity") return c.connectivity;
  if (m == "ch_count") return c.ch_count;
  if (m == "settle_time_s") return c.settle_time_s;
  if (m == "clustering_energy_mwh") return c.clustering_energy_mwh;
  if (m == "avg_power_mw") return c.avg_power_mw;
  if (m == "first_death_s") return c.first_death_s;
  throw std::invalid_argument("unknown metric " + m);
}

const char* kMetrics[] = {"connectivity", "ch_count", "settle_time_s", "clustering_energy_mwh", "avg_power_mw",
                          "first_death_s"};

}  // namespace

void write_snapshot_table(const Trace& t, std::ostream& os) {
  header(t.config, os);
  os << "t_s\tsettled\talive\tch_count\tconnectivity\tmean_residual_mwh\tconserved\n";
  for (const auto* s : t.all<Snapshot>()) {
    std::size_t alive = 0;
    double residual = 0;
    bool conserved = true;
    for (const auto& n : s->nodes) {
      if (n.alive) {
        ++alive;
        residual += static_cast<double>(n.residual_pj) / 3.6e12;
      }
      conserved = conserved && n.conserved;
    }
    std::size_t heads = 0;
    try {
      heads = ch_count(*s);
    } catch (const std::exception&) {
    }
    os << ticks_to_seconds(s->t) << '\t' << (s->settled ? 1 : 0) << '\t' << alive << '\t' << heads << '\t'
       << connectivity_ratio(*s, t.topology) << '\t' << (alive ? residual / static_cast<double>(alive) : 0.0) << '\t'
       << (conserved ? 1 : 0) << '\n';
  }
}

void write_resilience_table(const std::vector<ResilienceSample>& samples, const json& config, std::ostream& os) {
  header(config, os);
  os << "kind\tnode\tinjected_s\tdetection_rounds\tdetection_lo\tdetection_hi\trecovery_rounds\trecovery_hi\taffected"
        "\twithin\tnote\n";
  for (const auto& s : samples)
    os << to_string(s.kind) << '\t' << s.node << '\t' << ticks_to_seconds(s.injected) << '\t' << opt(s.detection_rounds)
       << '\t' << s.detection_window.lo << '\t' << s.detection_window.hi << '\t' << opt(s.recovery_rounds) << '\t'
       << s.recovery_window.hi << '\t' << s.affected << '\t' << (s.within ? 1 : 0) << '\t'
       << (s.why.empty() ? "-" : s.why) << '\n';
}

void write_run_summary(const RunSummary& r, const json& config, std::ostream& os) {
  header(config, os);
  os << "seed\tok\tsettled\tsettle_time_s\tconnectivity\tch_count\tclustering_energy_mwh\tavg_power_mw\tfirst_death_s"
        "\tdeaths\tresilience_within\tresilience_samples\terror\n";
  os << r.seed << '\t' << (r.ok ? 1 : 0) << '\t' << (r.settled ? 1 : 0) << '\t' << r.settle_time_s << '\t'
     << r.connectivity << '\t' << r.ch_count << '\t' << r.clustering_energy_mwh << '\t' << r.avg_power_mw << '\t'
     << opt(r.first_death_s) << '\t' << r.deaths << '\t' << r.resilience_within << '\t' << r.resilience_samples << '\t'
     << (r.error.empty() ? "-" : r.error) << '\n';
}

void write_sweep_table(const std::vector<CellReport>& cells, const json& base, std::ostream& os) {
  header(base, os);
  os << "cell\truns\tfailures";
  for (const char* m : kMetrics) os << '\t' << m << "_min\t" << m << "_mean\t" << m << "_max";
  os << "\terror\n";
  for (const auto& c : cells) {
    os << cell_label(c.cell) << '\t' << c.runs.size() << '\t' << c.failures;
    for (const char* m : kMetrics) {
      const Stat& s = pick(c, m);
      os << '\t' << s.min << '\t' << s.mean << '\t' << s.max;
    }
    os << '\t' << (c.error.empty() ? "-" : c.error) << '\n';
  }
}

void write_sweep_runs(const std::vector<CellReport>& cells, const json& base, std::ostream& os) {
  header(base, os);
  os << "cell\tseed\tok\tsettled\tconnectivity\tch_count\tsettle_time_s\tclustering_energy_mwh\tavg_power_mw"
        "\tfirst_death_s\terror\n";
  for (const auto& c : cells)
    for (const auto& r : c.runs)
      os << cell_label(c.cell) << '\t' << r.seed << '\t' << (r.ok ? 1 : 0) << '\t' << (r.settled ? 1 : 0) << '\t'
         << r.connectivity << '\t' << r.ch_count << '\t' << r.settle_time_s << '\t' << r.clustering_energy_mwh << '\t'
         << r.avg_power_mw << '\t' << opt(r.first_death_s) << '\t' << (r.error.empty() ? "-" : r.error) << '\n';
}

std::string sweep_svg(const std::vector<CellReport>& cells, const std::string& metric) {
  const double w = 120.0 * static_cast<double>(std::max<std::size_t>(1, cells.size())) + 80, h = 320;
  double top = 0;
  for (const auto& c : cells) top = std::max(top, pick(c, metric).max);
  if (top <= 0) top = 1;
  const double plot_h = h - 90;
  auto y = [&](double v) { return 30 + plot_h * (1 - v / top); };
  std::ostringstream os;
  os << std::fixed << std::setprecision(2);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
  os << "<text x=\"10\" y=\"18\" font-family=\"sans-serif\" font-size=\"13\">" << metric << " (max " << top
     << ")</text>\n";
  os << "<line x1=\"50\" y1=\"" << y(0) << "\" x2=\"" << w - 10 << "\" y2=\"" << y(0) << "\" stroke=\"black\"/>\n";
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const Stat& s = pick(cells[i], metric);
    const double x = 60 + 120.0 * static_cast<double>(i);
    os << "<rect x=\"" << x << "\" y=\"" << y(s.mean) << "\" width=\"80\" height=\"" << y(0) - y(s.mean)
       << "\" fill=\"#4a7ab5\"/>\n";
    os << "<line x1=\"" << x + 40 << "\" y1=\"" << y(s.min) << "\" x2=\"" << x + 40 << "\" y2=\"" << y(s.max)
       << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << x << "\" y=\"" << y(0) + 16 << "\" font-family=\"sans-serif\" font-size=\"10\">"
       << cell_label(cells[i].cell) << "</text>\n";
    os << "<text x=\"" << x << "\" y=\"" << y(s.mean) - 4 << "\" font-family=\"sans-serif\" font-size=\"10\">"
       << s.mean << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace decoric
