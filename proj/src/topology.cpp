#include "decoric/topology.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>

#include "decoric/rng.hpp"

namespace decoric {

const char* to_string(LinkClass c) {
  switch (c) {
    case LinkClass::OutOfRange: return "out_of_range";
    case LinkClass::External: return "external";
    case LinkClass::Potential: return "potential";
  }
  return "?";
}

double PathLoss::rssi_at(double d) const {
  const double dd = std::max(d, d0_m);
  return tx_power_dbm - pl0_db - 10.0 * gamma * std::log10(dd / d0_m);
}

double PathLoss::distance_for(double rssi_dbm) const {
  return d0_m * std::pow(10.0, (tx_power_dbm - pl0_db - rssi_dbm) / (10.0 * gamma));
}

PathLoss calibrate_path_loss(double range_m, double sensitivity_dbm, double gamma, double tx_power_dbm, double d0_m) {
  PathLoss p;
  p.tx_power_dbm = tx_power_dbm;
  p.gamma = gamma;
  p.d0_m = d0_m;
  p.pl0_db = tx_power_dbm - sensitivity_dbm - 10.0 * gamma * std::log10(range_m / d0_m);
  return p;
}

std::vector<NodeId> Topology::ids() const {
  std::vector<NodeId> out;
  out.reserve(positions.size());
  for (const auto& [id, _] : positions) out.push_back(id);
  return out;
}

NodeId Topology::next_free_id() const {
  return positions.empty() ? NodeId{0} : static_cast<NodeId>(positions.rbegin()->first + 1);
}

Topology generate_random_topology(std::size_t n, double width, double height, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("topology: n must be >= 1");
  if (!(width > 0) || !(height > 0)) throw std::invalid_argument("topology: area must be positive");
  Topology t;
  t.width = width;
  t.height = height;
  Rng rng(mix_seed(seed, 0x7090));
  for (std::size_t i = 0; i < n; ++i) {
    const double x = rng.unit() * width;
    const double y = rng.unit() * height;
    t.positions[static_cast<NodeId>(i)] = Point{x, y};
  }
  return t;
}

double distance(const Topology& t, NodeId a, NodeId b) {
  const Point& pa = t.positions.at(a);
  const Point& pb = t.positions.at(b);
  return std::hypot(pa.x - pb.x, pa.y - pb.y);
}

double link_rssi(NodeId a, NodeId b, const Topology& t) { return t.path_loss.rssi_at(distance(t, a, b)); }

bool in_range(NodeId a, NodeId b, const Topology& t) { return a != b && distance(t, a, b) <= t.radio_range; }

LinkClass classify_link(NodeId a, NodeId b, const Topology& t) {
  if (!in_range(a, b, t)) return LinkClass::OutOfRange;
  return link_rssi(a, b, t) < t.rssi_threshold ? LinkClass::External : LinkClass::Potential;
}

bool is_connected(const Topology& t) {
  if (t.positions.empty()) return true;
  const auto ids = t.ids();
  std::set<NodeId> seen{ids.front()};
  std::queue<NodeId> q;
  q.push(ids.front());
  while (!q.empty()) {
    const NodeId u = q.front();
    q.pop();
    for (NodeId v : ids)
      if (!seen.count(v) && in_range(u, v, t)) {
        seen.insert(v);
        q.push(v);
      }
  }
  return seen.size() == ids.size();
}

std::string topology_to_text(const Topology& t) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "# area " << t.width << ' ' << t.height << '\n';
  os << "# radio_range " << t.radio_range << '\n';
  os << "# rssi_threshold " << t.rssi_threshold << '\n';
  for (const auto& [id, p] : t.positions) os << id << ' ' << p.x << ' ' << p.y << '\n';
  return os.str();
}

Topology topology_from_text(const std::string& text) {
  Topology t;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    if (line[0] == '#') {
      std::string hash, key;
      ls >> hash >> key;
      if (key == "area") ls >> t.width >> t.height;
      else if (key == "radio_range") ls >> t.radio_range;
      else if (key == "rssi_threshold") ls >> t.rssi_threshold;
      continue;
    }
    long id = -1;
    Point p;
    if (!(ls >> id >> p.x >> p.y) || id < 0 || id >= kNoNode)
      throw std::runtime_error("topology text: bad record at line " + std::to_string(lineno));
    if (t.positions.count(static_cast<NodeId>(id)))
      throw std::runtime_error("topology text: duplicate id " + std::to_string(id));
    if (p.x < 0 || p.y < 0 || p.x > t.width || p.y > t.height)
      throw std::runtime_error("topology text: node " + std::to_string(id) + " outside area");
    t.positions[static_cast<NodeId>(id)] = p;
  }
  return t;
}

Topology load_topology(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open topology file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return topology_from_text(ss.str());
}

}  // namespace decoric
