#include "decoric/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace decoric {

using nlohmann::json;

RunSummary summarize(const ScenarioConfig& c, const Trace& t) {
  RunSummary s;
  s.seed = t.seed;
  s.ok = true;
  for (const auto& r : t.records) {
    auto* sn = std::get_if<Snapshot>(&r);
    if (!sn || !sn->settled) continue;
    s.settled = true;
    s.settle_time_s = ticks_to_seconds(sn->t);
    s.connectivity = connectivity_ratio(*sn, t.topology);
    s.ch_count = static_cast<double>(ch_count(*sn));
    break;
  }
  const auto cc = clustering_cost(t);
  s.clustering_energy_mwh = cc.energy_mwh;
  const auto ps = power_stats(t);
  s.avg_power_mw = ps.network_avg_mw;
  s.first_death_s = ps.first_death_s;
  s.deaths = ps.death_times_s.size();
  if (!c.faults.empty() && c.protocol == Protocol::Decoric && c.level != TraceLevel::Summary) {
    for (const auto& x : resilience_latencies(t, fault_plan(c), resilience_bounds(c))) {
      ++s.resilience_samples;
      s.resilience_within += x.within ? 1 : 0;
    }
  }
  return s;
}

RunSummary run_and_summarize(const ScenarioConfig& c, std::uint64_t seed) {
  try {
    const Trace t = run(make_run_spec(c, seed), seed);
    return summarize(c, t);
  } catch (const std::exception& e) {
    RunSummary s;
    s.seed = seed;
    s.error = e.what();
    return s;
  }
}

SweepAxis parse_axis(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0) throw std::invalid_argument("axis must look like field=v1,v2: " + spec);
  SweepAxis a;
  a.field = spec.substr(0, eq);
  if (a.field.front() != '/') a.field = "/" + a.field;
  std::string rest = spec.substr(eq + 1);
  std::size_t pos = 0;
  while (pos <= rest.size()) {
    const auto comma = rest.find(',', pos);
    const std::string tok = rest.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    if (!tok.empty()) {
      try {
        a.values.push_back(json::parse(tok));
      } catch (const json::parse_error&) {
        a.values.push_back(tok);  // bare word, e.g. a protocol name
      }
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (a.values.empty()) throw std::invalid_argument("axis has no values: " + spec);
  return a;
}

Stat stat_of(const std::vector<double>& v) {
  Stat s;
  s.n = v.size();
  if (v.empty()) return s;
  s.min = *std::min_element(v.begin(), v.end());
  s.max = *std::max_element(v.begin(), v.end());
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  return s;
}

unsigned worker_count() {
  if (const char* w = std::getenv("DECORIC_WORKERS")) {
    const long n = std::strtol(w, nullptr, 10);
    if (n > 0) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<CellReport> sweep(const json& base, const std::vector<SweepAxis>& axes, unsigned workers) {
  // cartesian product of axis values
  std::vector<json> cells{json::object()};
  for (const auto& a : axes) {
    std::vector<json> next;
    for (const auto& c : cells)
      for (const auto& v : a.values) {
        json x = c;
        x[a.field] = v;
        next.push_back(x);
      }
    cells = std::move(next);
  }

  std::vector<CellReport> reports(cells.size());
  std::vector<std::optional<ScenarioConfig>> configs(cells.size());
  struct Task {
    std::size_t cell;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    reports[i].cell = cells[i];
    json cfg = base.is_null() ? json::object() : base;
    for (auto it = cells[i].begin(); it != cells[i].end(); ++it) cfg[json::json_pointer(it.key())] = it.value();
    Validation v = validate(cfg);
    if (!v.ok()) {
      for (const auto& e : v.errors) reports[i].error += e.path + ": " + e.message + "; ";
      continue;
    }
    configs[i] = *v.config;
    reports[i].config = v.config->doc;
    reports[i].runs.resize(v.config->seeds.size());
    for (auto s : v.config->seeds) tasks.push_back({i, s});
  }

  std::vector<std::vector<RunSummary>> results(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) results[i].resize(reports[i].runs.size());
  std::vector<std::size_t> slot(tasks.size());
  {
    std::vector<std::size_t> next(cells.size(), 0);
    for (std::size_t k = 0; k < tasks.size(); ++k) slot[k] = next[tasks[k].cell]++;
  }
  std::atomic<std::size_t> idx{0};
  auto work = [&] {
    for (std::size_t k; (k = idx.fetch_add(1)) < tasks.size();) {
      const Task& t = tasks[k];
      results[t.cell][slot[k]] = run_and_summarize(*configs[t.cell], t.seed);
    }
  };
  if (workers == 0) workers = worker_count();
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(1, tasks.size()))));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();

  for (std::size_t i = 0; i < cells.size(); ++i) {
    CellReport& r = reports[i];
    r.runs = std::move(results[i]);
    std::vector<double> conn, ch, st, en, pw, fd;
    for (const auto& x : r.runs) {
      if (!x.ok) {
        ++r.failures;
        continue;
      }
      if (x.settled) {
        conn.push_back(x.connectivity);
        ch.push_back(x.ch_count);
        st.push_back(x.settle_time_s);
        en.push_back(x.clustering_energy_mwh);
      }
      pw.push_back(x.avg_power_mw);
      if (x.first_death_s) fd.push_back(*x.first_death_s);
    }
    r.connectivity = stat_of(conn);
    r.ch_count = stat_of(ch);
    r.settle_time_s = stat_of(st);
    r.clustering_energy_mwh = stat_of(en);
    r.avg_power_mw = stat_of(pw);
    r.first_death_s = stat_of(fd);
  }
  return reports;
}

}  // namespace decoric
