#include "decoric/frame.hpp"

#include <bit>
#include <stdexcept>
#include <string>

namespace decoric {

void NodeSet::set(NodeId i, bool v) {
  if (i >= size_) throw std::out_of_range("NodeSet: id " + std::to_string(i) + " outside capacity");
  const std::uint64_t m = std::uint64_t{1} << (i % 64);
  if (v) bits_[i / 64] |= m;
  else bits_[i / 64] &= ~m;
}

std::size_t NodeSet::count() const {
  std::size_t c = 0;
  for (auto w : bits_) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

std::vector<NodeId> NodeSet::members() const {
  std::vector<NodeId> out;
  for (std::size_t i = 0; i < size_; ++i)
    if (test(static_cast<NodeId>(i))) out.push_back(static_cast<NodeId>(i));
  return out;
}

std::size_t bitset_bytes(std::size_t max_nodes) { return (max_nodes + 7) / 8; }
std::size_t encoded_size(std::size_t max_nodes) { return kFrameHeaderBytes + 2 * bitset_bytes(max_nodes); }

Frame make_frame(NodeId id, std::size_t max_nodes) {
  Frame f;
  f.node_id = id;
  f.ch_id = id;
  f.neighbors = NodeSet(max_nodes);
  f.connectivity = NodeSet(max_nodes);
  return f;
}

Frame discovery_ping(NodeId id, std::size_t max_nodes) { return make_frame(id, max_nodes); }

namespace {
void put16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}
std::uint16_t get16(const std::vector<std::uint8_t>& in, std::size_t at) {
  return static_cast<std::uint16_t>(in[at] | (in[at + 1] << 8));
}
void put_set(std::vector<std::uint8_t>& out, const NodeSet& s, std::size_t max_nodes) {
  const std::size_t nb = bitset_bytes(max_nodes);
  for (std::size_t b = 0; b < nb; ++b) {
    std::uint8_t byte = 0;
    for (std::size_t k = 0; k < 8; ++k) {
      const std::size_t i = b * 8 + k;
      if (i < max_nodes && s.test(static_cast<NodeId>(i))) byte |= static_cast<std::uint8_t>(1u << k);
    }
    out.push_back(byte);
  }
}
NodeSet get_set(const std::vector<std::uint8_t>& in, std::size_t at, std::size_t max_nodes) {
  NodeSet s(max_nodes);
  for (std::size_t i = 0; i < max_nodes; ++i)
    if ((in[at + i / 8] >> (i % 8)) & 1u) s.set(static_cast<NodeId>(i));
  return s;
}
}  // namespace

std::vector<std::uint8_t> encode(const Frame& f, std::size_t max_nodes) {
  if (max_nodes == 0 || encoded_size(max_nodes) > kMacPayloadMax)
    throw std::invalid_argument("frame: max_nodes " + std::to_string(max_nodes) + " does not fit the MAC payload");
  auto check = [&](NodeId id, const char* field) {
    if (id >= max_nodes) throw std::invalid_argument(std::string("frame: ") + field + " out of range");
  };
  check(f.node_id, "node_id");
  check(f.ch_id, "ch_id");
  if (f.new_ch_id) check(*f.new_ch_id, "new_ch_id");
  for (const NodeSet* s : {&f.neighbors, &f.connectivity})
    for (std::size_t i = max_nodes; i < s->capacity(); ++i)
      if (s->test(static_cast<NodeId>(i))) throw std::invalid_argument("frame: list member out of range");

  std::vector<std::uint8_t> out;
  out.reserve(encoded_size(max_nodes));
  put16(out, f.node_id);
  put16(out, f.ch_id);
  put16(out, f.degree);
  put16(out, f.new_ch_id ? *f.new_ch_id : kNoNode);
  put_set(out, f.neighbors, max_nodes);
  put_set(out, f.connectivity, max_nodes);
  return out;
}

Frame decode(const std::vector<std::uint8_t>& bytes, std::size_t max_nodes) {
  if (max_nodes == 0 || encoded_size(max_nodes) > kMacPayloadMax)
    throw std::invalid_argument("frame: max_nodes does not fit the MAC payload");
  if (bytes.size() != encoded_size(max_nodes))
    throw std::invalid_argument("frame: expected " + std::to_string(encoded_size(max_nodes)) + " bytes, got " +
                                std::to_string(bytes.size()));
  // padding bits past max_nodes in the last bitset byte are reserved
  if (max_nodes % 8 != 0) {
    const std::uint8_t pad = static_cast<std::uint8_t>(0xFF << (max_nodes % 8));
    const std::size_t nb = bitset_bytes(max_nodes);
    if ((bytes[kFrameHeaderBytes + nb - 1] & pad) || (bytes[kFrameHeaderBytes + 2 * nb - 1] & pad))
      throw std::invalid_argument("frame: reserved bits set");
  }
  Frame f;
  f.node_id = get16(bytes, 0);
  f.ch_id = get16(bytes, 2);
  f.degree = get16(bytes, 4);
  const std::uint16_t nc = get16(bytes, 6);
  if (nc != kNoNode) f.new_ch_id = nc;
  if (f.node_id >= max_nodes || f.ch_id >= max_nodes || (f.new_ch_id && *f.new_ch_id >= max_nodes))
    throw std::invalid_argument("frame: id field out of range");
  f.neighbors = get_set(bytes, kFrameHeaderBytes, max_nodes);
  f.connectivity = get_set(bytes, kFrameHeaderBytes + bitset_bytes(max_nodes), max_nodes);
  return f;
}

}  // namespace decoric
