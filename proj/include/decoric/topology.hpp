#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "decoric/types.hpp"

namespace decoric {

struct Point {
  double x = 0;
  double y = 0;
};

enum class LinkClass : std::uint8_t { OutOfRange, External, Potential };
const char* to_string(LinkClass c);

// Log-distance path loss: RSSI(d) = P_tx - PL0 - 10*gamma*log10(d/d0).
struct PathLoss {
  double tx_power_dbm = 0.0;
  double pl0_db = 33.02;
  double gamma = 2.0;
  double d0_m = 1.0;

  double rssi_at(double d) const;
  // Inverse of rssi_at for d >= d0.
  double distance_for(double rssi_dbm) const;
};

// Picks PL0 so that RSSI(range) == sensitivity.
PathLoss calibrate_path_loss(double range_m, double sensitivity_dbm, double gamma = 2.0, double tx_power_dbm = 0.0,
                             double d0_m = 1.0);

struct Topology {
  std::map<NodeId, Point> positions;
  double width = 100.0;
  double height = 100.0;
  double radio_range = 50.0;
  double rssi_threshold = -65.0;
  PathLoss path_loss = calibrate_path_loss(50.0, -67.0);

  bool contains(NodeId id) const { return positions.count(id) != 0; }
  std::vector<NodeId> ids() const;
  NodeId next_free_id() const;
};

Topology generate_random_topology(std::size_t n, double width, double height, std::uint64_t seed);

double distance(const Topology& t, NodeId a, NodeId b);
double link_rssi(NodeId a, NodeId b, const Topology& t);
bool in_range(NodeId a, NodeId b, const Topology& t);
LinkClass classify_link(NodeId a, NodeId b, const Topology& t);

// Unit-disk graph at radio_range is connected (single node counts as connected).
bool is_connected(const Topology& t);

// One record per node: "id x y"; header lines carry area, range and threshold.
std::string topology_to_text(const Topology& t);
Topology topology_from_text(const std::string& text);
Topology load_topology(const std::string& path);

}  // namespace decoric
