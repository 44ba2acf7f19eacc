#include "decoric/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace decoric {

using nlohmann::json;

std::uint32_t ScenarioConfig::cycle() const {
  return cycle_rounds ? *cycle_rounds : decoric::cycle_rounds(round_len(), rdc.rdc_rate);
}

json default_config_json() {
  return json::parse(R"({
    "protocol": "decoric",
    "n_nodes": 50,
    "area": {"width": 100, "height": 100},
    "radio_range": 50,
    "rssi_threshold": -65,
    "propagation": {"gamma": 2.0, "sensitivity_dbm": -67, "d0_m": 1.0, "tx_power_dbm": 0.0},
    "mac": {"n": null, "max_retries": 2, "max_be": [3, 3, 3], "tau_symb_us": 320, "tau_cca_us": 128,
            "tau_fr_us": 2400, "tau_ifs_us": 640, "min_round_s": 0.8, "round_granularity_s": 0.1},
    "rdc": {"rate": 32, "duty_fraction": 0.04},
    "decoric": {"cycle_rounds": null, "t_fail_ch_cycles": 1, "t_fail_nch_cycles": 6, "tie": "lower",
                "priority": [], "max_nodes": 200, "fresh_rounds": 2, "join_affiliate_rounds": 3},
    "leach": {"p": 0.1, "epoch": 10},
    "beem": {"c_prob": 0.05, "epoch": 10, "cluster_radius_m": 25},
    "power": {"tx_uw": 52200, "listen_uw": 59100, "cpu_uw": 5400, "lpm_uw": 164, "battery_mwh": 6},
    "horizon_s": 1000,
    "faults": [],
    "seeds": [1],
    "topology": {"source": "random", "path": ""},
    "trace": {"level": "events", "format": "jsonl", "snapshot_rounds": 1},
    "stop_after_settled_s": null,
    "cpu_ticks": 100,
    "boot_jitter_us": 1000,
    "output": {"dir": "out"}
  })");
}

namespace {

// Fields whose value may legitimately be null or whose children are free-form.
const std::set<std::string> kOpenFields = {"/mac/n", "/decoric/cycle_rounds", "/stop_after_settled_s",
                                           "/faults", "/seeds", "/mac/max_be", "/decoric/priority"};

void merge(json& base, const json& over, const std::string& path, std::vector<ConfigError>& errs) {
  for (auto it = over.begin(); it != over.end(); ++it) {
    const std::string p = path + "/" + it.key();
    if (!base.contains(it.key())) {
      errs.push_back({p, "unknown field"});
      continue;
    }
    json& b = base[it.key()];
    if (b.is_object() && !kOpenFields.count(p)) {
      if (!it->is_object()) {
        errs.push_back({p, "expected an object"});
        continue;
      }
      merge(b, *it, p, errs);
    } else {
      b = *it;
    }
  }
}

class Reader {
 public:
  Reader(const json& doc, std::vector<ConfigError>& errs) : doc_(doc), errs_(errs) {}

  const json* at(const std::string& path) {
    const json::json_pointer ptr(path);
    if (!doc_.contains(ptr)) {
      errs_.push_back({path, "missing"});
      return nullptr;
    }
    return &doc_.at(ptr);
  }

  double num(const std::string& path, double fallback = 0) {
    const json* j = at(path);
    if (!j) return fallback;
    if (!j->is_number()) {
      errs_.push_back({path, "expected a number"});
      return fallback;
    }
    const double v = j->get<double>();
    if (!std::isfinite(v)) errs_.push_back({path, "must be finite"});
    return v;
  }

  std::int64_t integer(const std::string& path, std::int64_t fallback = 0) {
    const json* j = at(path);
    if (!j) return fallback;
    if (!j->is_number_integer()) {
      errs_.push_back({path, "expected an integer"});
      return fallback;
    }
    return j->get<std::int64_t>();
  }

  std::string str(const std::string& path, const std::string& fallback = "") {
    const json* j = at(path);
    if (!j) return fallback;
    if (!j->is_string()) {
      errs_.push_back({path, "expected a string"});
      return fallback;
    }
    return j->get<std::string>();
  }

  bool null(const std::string& path) {
    const json* j = at(path);
    return !j || j->is_null();
  }

  void check(bool cond, const std::string& path, const std::string& msg) {
    if (!cond) errs_.push_back({path, msg});
  }

 private:
  const json& doc_;
  std::vector<ConfigError>& errs_;
};

Tick us(double v) { return static_cast<Tick>(std::llround(v)); }

}  // namespace

Validation validate(const json& in) {
  Validation v;
  auto& errs = v.errors;
  json doc = default_config_json();
  if (!in.is_null()) {
    if (!in.is_object()) {
      errs.push_back({"", "config must be an object"});
      return v;
    }
    merge(doc, in, "", errs);
  }

  ScenarioConfig c;
  Reader r(doc, errs);

  const std::string proto = r.str("/protocol", "decoric");
  try {
    c.protocol = protocol_from(proto);
  } catch (const std::exception&) {
    errs.push_back({"/protocol", "must be one of decoric, leach, beem"});
  }
  const auto n = r.integer("/n_nodes", 50);
  r.check(n >= 1, "/n_nodes", "must be >= 1");
  c.n_nodes = static_cast<std::size_t>(std::max<std::int64_t>(n, 1));
  c.width = r.num("/area/width", 100);
  c.height = r.num("/area/height", 100);
  r.check(c.width > 0, "/area/width", "must be > 0");
  r.check(c.height > 0, "/area/height", "must be > 0");
  c.radio_range = r.num("/radio_range", 50);
  r.check(c.radio_range > 0, "/radio_range", "must be > 0");
  c.rssi_threshold = r.num("/rssi_threshold", -65);
  c.gamma = r.num("/propagation/gamma", 2);
  c.sensitivity_dbm = r.num("/propagation/sensitivity_dbm", -67);
  c.d0_m = r.num("/propagation/d0_m", 1);
  c.tx_power_dbm = r.num("/propagation/tx_power_dbm", 0);
  r.check(c.gamma > 0, "/propagation/gamma", "must be > 0");
  r.check(c.d0_m > 0, "/propagation/d0_m", "must be > 0");
  if (c.radio_range > 0 && c.d0_m > 0 && c.gamma > 0) {
    const PathLoss pl = calibrate_path_loss(c.radio_range, c.sensitivity_dbm, c.gamma, c.tx_power_dbm, c.d0_m);
    r.check(pl.rssi_at(std::min(c.d0_m, c.radio_range)) >= c.rssi_threshold, "/rssi_threshold",
            "not reachable within radio_range");
  }

  // faults before mac.n, which defaults to the largest population
  std::set<NodeId> present;
  if (doc.at("topology").value("source", "random") == "random")
    for (std::size_t i = 0; i < c.n_nodes; ++i) present.insert(static_cast<NodeId>(i));
  c.topology_source = r.str("/topology/source", "random");
  c.topology_path = r.str("/topology/path", "");
  if (c.topology_source == "file") {
    if (c.topology_path.empty()) {
      errs.push_back({"/topology/path", "required when source is file"});
    } else {
      try {
        const Topology t = load_topology(c.topology_path);
        for (NodeId id : t.ids()) present.insert(id);
        c.n_nodes = t.positions.size();
      } catch (const std::exception& e) {
        errs.push_back({"/topology/path", e.what()});
      }
    }
  } else if (c.topology_source != "random") {
    errs.push_back({"/topology/source", "must be random or file"});
  }

  const json& faults = doc.at("faults");
  if (!faults.is_array()) {
    errs.push_back({"/faults", "expected an array"});
  } else {
    std::set<NodeId> dead;
    std::vector<std::pair<double, std::size_t>> order;
    for (std::size_t i = 0; i < faults.size(); ++i) {
      const std::string p = "/faults/" + std::to_string(i);
      FaultSpec f;
      f.t_s = r.num(p + "/t_s");
      r.check(f.t_s >= 0, p + "/t_s", "must be >= 0");
      const auto node = r.integer(p + "/node", -1);
      r.check(node >= 0 && node < kNoNode, p + "/node", "invalid node id");
      f.node = static_cast<NodeId>(std::clamp<std::int64_t>(node, 0, kNoNode - 1));
      const std::string action = r.str(p + "/action", "kill");
      r.check(action == "kill" || action == "add", p + "/action", "must be kill or add");
      f.add = action == "add";
      if (f.add) {
        f.pos = {r.num(p + "/x"), r.num(p + "/y")};
        r.check(f.pos.x >= 0 && f.pos.x <= c.width && f.pos.y >= 0 && f.pos.y <= c.height, p, "position outside area");
      }
      for (const auto& [k, _] : faults[i].items())
        if (k != "t_s" && k != "node" && k != "action" && k != "x" && k != "y") errs.push_back({p + "/" + k, "unknown field"});
      c.faults.push_back(f);
      order.emplace_back(f.t_s, i);
    }
    std::stable_sort(order.begin(), order.end());
    for (const auto& [t, i] : order) {
      const FaultSpec& f = c.faults[i];
      const std::string p = "/faults/" + std::to_string(i) + "/node";
      if (f.add) {
        r.check(!present.count(f.node), p, "add targets an id already in use");
        present.insert(f.node);
      } else {
        r.check(present.count(f.node) != 0, p, "kill targets an unknown node");
        r.check(!dead.count(f.node), p, "kill targets a node that is already dead");
        dead.insert(f.node);
      }
    }
  }

  // MAC
  if (r.null("/mac/n")) {
    std::size_t adds = 0;
    for (const auto& f : c.faults) adds += f.add ? 1 : 0;
    c.mac.n = static_cast<std::uint32_t>(c.n_nodes + adds);
  } else {
    const auto mn = r.integer("/mac/n", 50);
    r.check(mn >= 0, "/mac/n", "must be >= 0");
    c.mac.n = static_cast<std::uint32_t>(std::max<std::int64_t>(0, mn));
  }
  const auto mr = r.integer("/mac/max_retries", 2);
  r.check(mr >= 0 && mr <= 16, "/mac/max_retries", "must be in [0, 16]");
  c.mac.max_retries = static_cast<std::uint32_t>(std::clamp<std::int64_t>(mr, 0, 16));
  if (const json* be = r.at("/mac/max_be")) {
    if (!be->is_array()) {
      errs.push_back({"/mac/max_be", "expected an array"});
    } else {
      for (std::size_t i = 0; i < be->size(); ++i) {
        const auto x = r.integer("/mac/max_be/" + std::to_string(i), 3);
        r.check(x >= 1 && x <= 16, "/mac/max_be/" + std::to_string(i), "must be in [1, 16]");
        c.mac.max_be.push_back(static_cast<std::uint32_t>(std::clamp<std::int64_t>(x, 1, 16)));
      }
      r.check(c.mac.max_be.empty() || c.mac.max_be.size() == c.mac.max_retries + 1, "/mac/max_be",
              "needs max_retries + 1 entries");
      if (c.mac.max_be.size() != c.mac.max_retries + 1) c.mac.max_be.clear();
    }
  }
  c.mac.tau_symb = us(r.num("/mac/tau_symb_us", 320));
  c.mac.tau_cca = us(r.num("/mac/tau_cca_us", 128));
  c.mac.tau_fr = us(r.num("/mac/tau_fr_us", 2400));
  c.mac.tau_ifs = us(r.num("/mac/tau_ifs_us", 640));
  for (const char* f : {"/mac/tau_symb_us", "/mac/tau_cca_us", "/mac/tau_fr_us", "/mac/tau_ifs_us"})
    r.check(r.num(f, 1) > 0, f, "must be > 0");
  c.mac.min_round = seconds_to_ticks(r.num("/mac/min_round_s", 0.8));
  c.mac.round_granularity = seconds_to_ticks(r.num("/mac/round_granularity_s", 0.1));
  r.check(c.mac.min_round >= 0, "/mac/min_round_s", "must be >= 0");
  r.check(c.mac.round_granularity >= 0, "/mac/round_granularity_s", "must be >= 0");

  const auto rate = r.integer("/rdc/rate", 32);
  r.check(rate >= 1 && rate <= 1'000'000, "/rdc/rate", "must be >= 1");
  c.rdc.rdc_rate = static_cast<std::uint32_t>(std::clamp<std::int64_t>(rate, 1, 1'000'000));
  c.rdc.duty_fraction = r.num("/rdc/duty_fraction", 0.04);
  r.check(c.rdc.duty_fraction > 0 && c.rdc.duty_fraction <= 1, "/rdc/duty_fraction", "must be in (0, 1]");

  // DeCoRIC
  if (!r.null("/decoric/cycle_rounds")) {
    const auto cr = r.integer("/decoric/cycle_rounds", 6);
    r.check(cr >= 1, "/decoric/cycle_rounds", "must be >= 1");
    c.cycle_rounds = static_cast<std::uint32_t>(std::max<std::int64_t>(1, cr));
  }
  c.t_fail_ch_cycles = r.num("/decoric/t_fail_ch_cycles", 1);
  c.t_fail_nch_cycles = r.num("/decoric/t_fail_nch_cycles", 6);
  r.check(c.t_fail_ch_cycles > 0, "/decoric/t_fail_ch_cycles", "must be > 0");
  r.check(c.t_fail_nch_cycles > 0, "/decoric/t_fail_nch_cycles", "must be > 0");
  const std::string tie = r.str("/decoric/tie", "lower");
  if (tie == "lower") c.decoric.tie = TieRule::LowerId;
  else if (tie == "higher") c.decoric.tie = TieRule::HigherId;
  else if (tie == "priority") c.decoric.tie = TieRule::Priority;
  else errs.push_back({"/decoric/tie", "must be lower, higher or priority"});
  if (const json* pr = r.at("/decoric/priority")) {
    if (!pr->is_array()) errs.push_back({"/decoric/priority", "expected an array"});
    else
      for (std::size_t i = 0; i < pr->size(); ++i)
        c.decoric.priority.push_back(static_cast<NodeId>(r.integer("/decoric/priority/" + std::to_string(i))));
  }
  const auto mx = r.integer("/decoric/max_nodes", 200);
  r.check(mx >= 1 && mx <= 432, "/decoric/max_nodes", "must be in [1, 432] to fit the frame payload");
  c.decoric.max_nodes = static_cast<std::size_t>(std::clamp<std::int64_t>(mx, 1, 432));
  const auto fr = r.integer("/decoric/fresh_rounds", 2);
  r.check(fr >= 1, "/decoric/fresh_rounds", "must be >= 1");
  c.decoric.fresh_rounds = static_cast<std::uint32_t>(std::max<std::int64_t>(1, fr));
  const auto jr = r.integer("/decoric/join_affiliate_rounds", 3);
  r.check(jr >= 1, "/decoric/join_affiliate_rounds", "must be >= 1");
  c.decoric.join_affiliate_rounds = static_cast<std::uint32_t>(std::max<std::int64_t>(1, jr));
  for (NodeId id : present)
    if (id >= c.decoric.max_nodes) {
      errs.push_back({"/decoric/max_nodes", "node id " + std::to_string(id) + " does not fit"});
      break;
    }
  if (encoded_size(c.decoric.max_nodes) > kMacPayloadMax)
    errs.push_back({"/decoric/max_nodes", "frame does not fit an 802.15.4 payload"});

  // baselines
  c.leach.p = r.num("/leach/p", 0.1);
  r.check(c.leach.p > 0 && c.leach.p < 1, "/leach/p", "must be in (0, 1)");
  const auto le = r.integer("/leach/epoch", 10);
  r.check(le >= 4, "/leach/epoch", "must be >= 4 (advert, join, schedule, steady)");
  c.leach.epoch = static_cast<std::uint32_t>(std::max<std::int64_t>(4, le));
  c.beem.c_prob = r.num("/beem/c_prob", 0.05);
  r.check(c.beem.c_prob > 0 && c.beem.c_prob < 1, "/beem/c_prob", "must be in (0, 1)");
  const auto be = r.integer("/beem/epoch", 10);
  r.check(be >= 4, "/beem/epoch", "must be >= 4 (advert, join, schedule, steady)");
  c.beem.epoch = static_cast<std::uint32_t>(std::max<std::int64_t>(4, be));
  c.beem_cluster_radius_m = r.num("/beem/cluster_radius_m", 25);
  r.check(c.beem_cluster_radius_m > 0, "/beem/cluster_radius_m", "must be > 0");

  // power
  c.power.tx_uw = r.integer("/power/tx_uw", 52200);
  c.power.listen_uw = r.integer("/power/listen_uw", 59100);
  c.power.cpu_uw = r.integer("/power/cpu_uw", 5400);
  c.power.lpm_uw = r.integer("/power/lpm_uw", 164);
  for (const char* f : {"/power/tx_uw", "/power/listen_uw", "/power/cpu_uw", "/power/lpm_uw"})
    r.check(r.integer(f, 0) >= 0, f, "must be >= 0");
  const double mwh = r.num("/power/battery_mwh", 6);
  r.check(mwh > 0, "/power/battery_mwh", "must be > 0");
  c.power.battery_pj = static_cast<std::int64_t>(std::llround(mwh * 3.6e12));

  c.horizon_s = r.num("/horizon_s", 1000);
  r.check(c.horizon_s >= 0, "/horizon_s", "must be >= 0");
  if (const json* seeds = r.at("/seeds")) {
    if (!seeds->is_array() || seeds->empty()) {
      errs.push_back({"/seeds", "expected a non-empty array"});
    } else {
      c.seeds.clear();
      for (std::size_t i = 0; i < seeds->size(); ++i) {
        const auto s = r.integer("/seeds/" + std::to_string(i), 0);
        r.check(s >= 0, "/seeds/" + std::to_string(i), "must be >= 0");
        c.seeds.push_back(static_cast<std::uint64_t>(std::max<std::int64_t>(0, s)));
      }
    }
  }
  try {
    c.level = trace_level_from(r.str("/trace/level", "events"));
  } catch (const std::exception&) {
    errs.push_back({"/trace/level", "must be summary, events or full"});
  }
  const std::string fmt = r.str("/trace/format", "jsonl");
  r.check(fmt == "jsonl" || fmt == "cbor", "/trace/format", "must be jsonl or cbor");
  c.binary_trace = fmt == "cbor";
  const auto sr = r.integer("/trace/snapshot_rounds", 1);
  r.check(sr >= 1, "/trace/snapshot_rounds", "must be >= 1");
  c.snapshot_rounds = static_cast<std::uint32_t>(std::max<std::int64_t>(1, sr));
  if (!r.null("/stop_after_settled_s")) {
    c.stop_after_settled_s = r.num("/stop_after_settled_s", 0);
    r.check(*c.stop_after_settled_s >= 0, "/stop_after_settled_s", "must be >= 0");
  }
  c.cpu_ticks = r.integer("/cpu_ticks", 100);
  r.check(c.cpu_ticks >= 0, "/cpu_ticks", "must be >= 0");
  c.boot_jitter = r.integer("/boot_jitter_us", 1000);
  r.check(c.boot_jitter >= 0, "/boot_jitter_us", "must be >= 0");
  c.out_dir = r.str("/output/dir", "out");

  if (errs.empty()) {
    try {
      c.mac.validate();
      c.rdc.txn_freq = c.round_len();
      c.rdc.validate();
      c.power.validate();
    } catch (const std::exception& e) {
      errs.push_back({"/mac", e.what()});
    }
  }
  if (!errs.empty()) return v;
  if (doc.at("mac").at("n").is_null()) doc["mac"]["n"] = c.mac.n;
  c.doc = doc;
  v.config = std::move(c);
  return v;
}

Validation validate_text(const std::string& text) {
  bool blank = true;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) blank = false;
  if (blank) return validate(json());
  try {
    return validate(json::parse(text));
  } catch (const json::parse_error& e) {
    Validation v;
    v.errors.push_back({"", std::string("parse error: ") + e.what()});
    return v;
  }
}

namespace {
std::string joined(const std::vector<ConfigError>& errs) {
  std::ostringstream os;
  for (const auto& e : errs) os << (e.path.empty() ? "/" : e.path) << ": " << e.message << '\n';
  return os.str();
}
}  // namespace

ScenarioConfig config_from_json(const json& in) {
  Validation v = validate(in);
  if (!v.ok()) throw std::invalid_argument(joined(v.errors));
  return *v.config;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("cannot open config " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  Validation v = validate_text(ss.str());
  if (!v.ok()) throw std::invalid_argument(joined(v.errors));
  return *v.config;
}

Topology make_topology(const ScenarioConfig& c, std::uint64_t seed) {
  Topology t = c.topology_source == "file" ? load_topology(c.topology_path)
                                           : generate_random_topology(c.n_nodes, c.width, c.height, seed);
  t.width = c.width;
  t.height = c.height;
  t.radio_range = c.radio_range;
  t.rssi_threshold = c.rssi_threshold;
  t.path_loss = calibrate_path_loss(c.radio_range, c.sensitivity_dbm, c.gamma, c.tx_power_dbm, c.d0_m);
  return t;
}

std::vector<FaultAction> fault_plan(const ScenarioConfig& c) {
  std::vector<FaultAction> plan;
  for (const auto& f : c.faults) plan.push_back({seconds_to_ticks(f.t_s), f.node, f.add, f.pos});
  return plan;
}

ResilienceBounds resilience_bounds(const ScenarioConfig& c) {
  ResilienceBounds b;
  b.cycle = c.cycle();
  b.t_fail_ch = static_cast<std::uint32_t>(std::llround(c.t_fail_ch_cycles * b.cycle));
  b.t_fail_nch = static_cast<std::uint32_t>(std::llround(c.t_fail_nch_cycles * b.cycle));
  b.join_rounds = c.decoric.join_affiliate_rounds;
  return b;
}

RunSpec make_run_spec(const ScenarioConfig& c, std::uint64_t seed) {
  RunSpec s;
  s.protocol = c.protocol;
  s.topo = make_topology(c, seed);
  s.mac = c.mac;
  s.rdc = c.rdc;
  s.rdc.txn_freq = c.round_len();
  s.round_len = c.round_len();
  s.cycle_rounds = c.cycle();
  s.decoric = c.decoric;
  s.decoric.cycle = s.cycle_rounds;
  s.decoric.t_fail_ch = static_cast<std::uint32_t>(std::llround(c.t_fail_ch_cycles * s.cycle_rounds));
  s.decoric.t_fail_nch = static_cast<std::uint32_t>(std::llround(c.t_fail_nch_cycles * s.cycle_rounds));
  s.leach = c.leach;
  s.beem = c.beem;
  s.beem.cluster_rssi_dbm = s.topo.path_loss.rssi_at(c.beem_cluster_radius_m);
  s.power = c.power;
  s.horizon = seconds_to_ticks(c.horizon_s);
  s.faults = fault_plan(c);
  s.level = c.level;
  s.snapshot_rounds = c.snapshot_rounds;
  s.cpu_ticks = c.cpu_ticks;
  s.boot_jitter = c.boot_jitter;
  if (c.stop_after_settled_s) s.stop_after_settled = seconds_to_ticks(*c.stop_after_settled_s);
  s.config = c.doc;
  return s;
}

}  // namespace decoric
