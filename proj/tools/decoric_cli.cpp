#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "decoric/config.hpp"
#include "decoric/engine.hpp"
#include "decoric/metrics.hpp"
#include "decoric/report.hpp"
#include "decoric/sweep.hpp"

namespace fs = std::filesystem;
using namespace decoric;

namespace {

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  return f;
}

std::vector<ResilienceSample> resilience_for(const ScenarioConfig& c, const Trace& t) {
  return resilience_latencies(t, fault_plan(c), resilience_bounds(c));
}

void print_summary(const RunSummary& r) {
  std::cout << "seed " << r.seed << ": settled=" << (r.settled ? "yes" : "no") << " t=" << r.settle_time_s
            << "s connectivity=" << r.connectivity << " ch=" << r.ch_count << " avg_power=" << r.avg_power_mw
            << "mW first_death=" << (r.first_death_s ? std::to_string(*r.first_death_s) + "s" : "none");
  if (r.resilience_samples) std::cout << " resilience=" << r.resilience_within << "/" << r.resilience_samples;
  std::cout << '\n';
}

int emit(const ScenarioConfig& c, const Trace& t, const fs::path& out, bool write_trace) {
  fs::create_directories(out);
  const std::string tag = std::to_string(t.seed);
  if (write_trace) {
    auto f = open_out(out / ("trace_" + tag + (c.binary_trace ? ".cbor" : ".jsonl")));
    if (c.binary_trace) write_cbor(t, f);
    else write_jsonl(t, f);
  }
  {
    auto f = open_out(out / ("snapshots_" + tag + ".tsv"));
    write_snapshot_table(t, f);
  }
  const RunSummary r = summarize(c, t);
  {
    auto f = open_out(out / ("summary_" + tag + ".tsv"));
    write_run_summary(r, c.doc, f);
  }
  if (!c.faults.empty() && c.protocol == Protocol::Decoric && c.level != TraceLevel::Summary) {
    auto f = open_out(out / ("resilience_" + tag + ".tsv"));
    write_resilience_table(resilience_for(c, t), c.doc, f);
  }
  print_summary(r);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"decoric: clustering protocol simulator"};
  app.require_subcommand(1);

  std::string config_path, out_dir, trace_path;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> axes;
  bool svg = false, no_trace = false;

  auto* run_cmd = app.add_subcommand("run", "run one scenario for each configured seed");
  run_cmd->add_option("-c,--config", config_path, "scenario config (JSON); omitted means defaults");
  run_cmd->add_option("-s,--seed", seeds, "override the config's seed list");
  run_cmd->add_option("-o,--out", out_dir, "output directory (default: config output.dir)");
  run_cmd->add_flag("--no-trace", no_trace, "skip writing the trace file");

  auto* sweep_cmd = app.add_subcommand("sweep", "sweep config fields over seeds in parallel");
  sweep_cmd->add_option("-c,--config", config_path, "base scenario config (JSON)");
  sweep_cmd->add_option("-a,--axis", axes, "field=v1,v2,... (JSON pointer field, repeatable)")->required();
  sweep_cmd->add_option("-o,--out", out_dir, "output directory");
  sweep_cmd->add_flag("--svg", svg, "also write bar charts");

  auto* replay_cmd = app.add_subcommand("replay", "recompute metrics from a stored trace");
  replay_cmd->add_option("trace", trace_path, "trace file (JSONL or binary)")->required();
  replay_cmd->add_option("-o,--out", out_dir, "output directory for tables");

  auto* validate_cmd = app.add_subcommand("validate", "check a config and print it normalised");
  validate_cmd->add_option("config", config_path, "scenario config (JSON)")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    auto load = [&]() -> ScenarioConfig {
      if (config_path.empty()) return config_from_json(nlohmann::json());
      return load_config(config_path);
    };

    if (*validate_cmd) {
      std::ifstream f(config_path);
      if (!f) {
        std::cerr << "cannot open " << config_path << '\n';
        return 2;
      }
      std::stringstream ss;
      ss << f.rdbuf();
      const Validation v = validate_text(ss.str());
      if (!v.ok()) {
        for (const auto& e : v.errors) std::cerr << (e.path.empty() ? "/" : e.path) << ": " << e.message << '\n';
        return 1;
      }
      std::cout << v.config->doc.dump(2) << '\n';
      return 0;
    }

    if (*run_cmd) {
      const ScenarioConfig c = load();
      const fs::path out = out_dir.empty() ? fs::path(c.out_dir) : fs::path(out_dir);
      const auto& list = seeds.empty() ? c.seeds : seeds;
      for (auto s : list) emit(c, run(make_run_spec(c, s), s), out, !no_trace);
      return 0;
    }

    if (*sweep_cmd) {
      nlohmann::json base = nlohmann::json::object();
      if (!config_path.empty()) {
        std::ifstream f(config_path);
        if (!f) throw std::runtime_error("cannot open " + config_path);
        base = nlohmann::json::parse(f);
      }
      std::vector<SweepAxis> parsed;
      for (const auto& a : axes) parsed.push_back(parse_axis(a));
      const auto cells = sweep(base, parsed);
      const fs::path out = out_dir.empty() ? fs::path("out") : fs::path(out_dir);
      fs::create_directories(out);
      {
        auto f = open_out(out / "sweep.tsv");
        write_sweep_table(cells, base, f);
      }
      {
        auto f = open_out(out / "sweep_runs.tsv");
        write_sweep_runs(cells, base, f);
      }
      if (svg)
        for (const char* m : {"connectivity", "ch_count", "avg_power_mw", "first_death_s", "settle_time_s",
                              "clustering_energy_mwh"}) {
          auto f = open_out(out / (std::string(m) + ".svg"));
          f << sweep_svg(cells, m);
        }
      write_sweep_table(cells, base, std::cout);
      bool bad = false;
      for (const auto& c : cells) bad = bad || !c.error.empty() || c.failures > 0;
      return bad ? 1 : 0;
    }

    if (*replay_cmd) {
      const Trace t = load_trace(trace_path);
      const ScenarioConfig c = config_from_json(t.config);
      const fs::path out = out_dir.empty() ? fs::path(trace_path).parent_path() / "replay" : fs::path(out_dir);
      return emit(c, t, out, false);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
