#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "decoric/energy.hpp"
#include "decoric/protocol.hpp"
#include "decoric/topology.hpp"

namespace decoric {

enum class TraceLevel : std::uint8_t { Summary, Events, Full };
const char* to_string(TraceLevel l);
TraceLevel trace_level_from(const std::string& s);

struct TxRecord {
  Tick start = 0, end = 0;
  NodeId node = 0;
  MsgKind kind = MsgKind::Decoric;
  TxMode mode = TxMode::Single;
  std::uint16_t copy = 0;
  NodeId dest = kNoNode;
  NodeId ch_id = kNoNode;  // frame's ch field, for protocol checks
  bool takeover = false;
};

struct RxRecord {
  Tick t = 0;  // end of the received copy
  NodeId node = 0;
  NodeId from = 0;
  MsgKind kind = MsgKind::Decoric;
  bool ok = true;  // false: lost to a collision or half-duplex
};

struct NoteRecord {
  Tick t = 0;
  NodeId node = 0;
  Note note{NoteKind::PhaseChange};
};

struct InjectRecord {
  Tick t = 0;
  NodeId node = 0;
  bool add = false;
  Point pos;
};

struct DeathRecord {
  Tick t = 0;
  NodeId node = 0;
  bool battery = true;
};

struct NodeSnap {
  NodeId id = 0;
  bool alive = true;
  Phase phase = Phase::Discovery;
  Role role = Role::CH;
  NodeId ch = kNoNode;
  std::uint16_t degree = 0;
  std::int64_t consumed_pj = 0;
  std::int64_t residual_pj = 0;
  StateTimes times;
  bool conserved = true;
};

struct Snapshot {
  Tick t = 0;
  bool settled = false;  // the first snapshot at which every alive node was settled
  std::vector<NodeSnap> nodes;
};

using Record = std::variant<TxRecord, RxRecord, NoteRecord, InjectRecord, DeathRecord, Snapshot>;

struct Trace {
  nlohmann::json config;  // normalised scenario
  Topology topology;      // final topology, including added nodes
  std::uint64_t seed = 0;
  Tick round_len = 0;
  Tick horizon = 0;
  std::uint32_t cycle_rounds = 0;
  std::vector<Record> records;

  template <class T>
  std::vector<const T*> all() const {
    std::vector<const T*> v;
    for (const auto& r : records)
      if (auto* p = std::get_if<T>(&r)) v.push_back(p);
    return v;
  }
};

nlohmann::json record_to_json(const Record& r);
Record record_from_json(const nlohmann::json& j);

// JSON Lines: a header object, then one record per line.
void write_jsonl(const Trace& t, std::ostream& os);
// Each object as a 4-byte little-endian length followed by its CBOR encoding.
void write_cbor(const Trace& t, std::ostream& os);
std::string trace_to_string(const Trace& t, bool binary);
Trace read_trace(std::istream& is);  // detects the format
Trace load_trace(const std::string& path);
void save_trace(const Trace& t, const std::string& path, bool binary);

}  // namespace decoric
