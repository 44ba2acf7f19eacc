#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "decoric/types.hpp"

namespace decoric {

// Fixed-size membership set over the NodeId space [0, max_nodes).
class NodeSet {
 public:
  NodeSet() = default;
  explicit NodeSet(std::size_t max_nodes) : bits_((max_nodes + 63) / 64, 0), size_(max_nodes) {}

  std::size_t capacity() const { return size_; }
  bool test(NodeId i) const { return i < size_ && ((bits_[i / 64] >> (i % 64)) & 1u); }
  void set(NodeId i, bool v = true);
  void reset(NodeId i) { set(i, false); }
  std::size_t count() const;
  std::vector<NodeId> members() const;
  bool operator==(const NodeSet& o) const { return size_ == o.size_ && bits_ == o.bits_; }

 private:
  std::vector<std::uint64_t> bits_;
  std::size_t size_ = 0;
};

struct Frame {
  NodeId node_id = 0;
  NodeId ch_id = 0;
  std::uint16_t degree = 0;
  NodeSet neighbors;
  NodeSet connectivity;
  std::optional<NodeId> new_ch_id;

  bool operator==(const Frame& o) const = default;
};

inline constexpr std::size_t kMacPayloadMax = 127 - 11;  // 802.15.4 frame minus MAC header and FCS
inline constexpr std::size_t kFrameHeaderBytes = 8;

std::size_t bitset_bytes(std::size_t max_nodes);
std::size_t encoded_size(std::size_t max_nodes);

Frame make_frame(NodeId id, std::size_t max_nodes);
Frame discovery_ping(NodeId id, std::size_t max_nodes);

std::vector<std::uint8_t> encode(const Frame& f, std::size_t max_nodes);
Frame decode(const std::vector<std::uint8_t>& bytes, std::size_t max_nodes);

}  // namespace decoric
