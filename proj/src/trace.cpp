#include "decoric/trace.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace decoric {

using nlohmann::json;

const char* to_string(TraceLevel l) {
  switch (l) {
    case TraceLevel::Summary: return "summary";
    case TraceLevel::Events: return "events";
    case TraceLevel::Full: return "full";
  }
  return "?";
}

TraceLevel trace_level_from(const std::string& s) {
  if (s == "summary") return TraceLevel::Summary;
  if (s == "events") return TraceLevel::Events;
  if (s == "full") return TraceLevel::Full;
  throw std::invalid_argument("unknown trace level '" + s + "'");
}

namespace {

json times_json(const StateTimes& t) { return json::array({t.tx, t.listen, t.cpu, t.lpm}); }

StateTimes times_from(const json& j) {
  StateTimes t;
  t.tx = j.at(0);
  t.listen = j.at(1);
  t.cpu = j.at(2);
  t.lpm = j.at(3);
  return t;
}

template <class E>
int en(E e) {
  return static_cast<int>(e);
}

}  // namespace

json record_to_json(const Record& rec) {
  return std::visit(
      [](const auto& r) -> json {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, TxRecord>) {
          return {{"type", "tx"}, {"t", r.start}, {"end", r.end},     {"node", r.node}, {"kind", en(r.kind)},
                  {"mode", en(r.mode)}, {"copy", r.copy}, {"dest", r.dest}, {"ch", r.ch_id}, {"takeover", r.takeover}};
        } else if constexpr (std::is_same_v<T, RxRecord>) {
          return {{"type", "rx"}, {"t", r.t}, {"node", r.node}, {"from", r.from}, {"kind", en(r.kind)}, {"ok", r.ok}};
        } else if constexpr (std::is_same_v<T, NoteRecord>) {
          return {{"type", "note"}, {"t", r.t}, {"node", r.node}, {"note", to_string(r.note.kind)},
                  {"k", en(r.note.kind)}, {"a", r.note.a}, {"b", r.note.b}};
        } else if constexpr (std::is_same_v<T, InjectRecord>) {
          return {{"type", "inject"}, {"t", r.t}, {"node", r.node}, {"add", r.add}, {"x", r.pos.x}, {"y", r.pos.y}};
        } else if constexpr (std::is_same_v<T, DeathRecord>) {
          return {{"type", "death"}, {"t", r.t}, {"node", r.node}, {"battery", r.battery}};
        } else {
          json nodes = json::array();
          for (const auto& n : r.nodes)
            nodes.push_back({n.id, n.alive, en(n.phase), en(n.role), n.ch, n.degree, n.consumed_pj, n.residual_pj,
                             times_json(n.times), n.conserved});
          return {{"type", "snapshot"}, {"t", r.t}, {"settled", r.settled}, {"nodes", nodes}};
        }
      },
      rec);
}

Record record_from_json(const json& j) {
  const std::string type = j.at("type");
  if (type == "tx") {
    TxRecord r;
    r.start = j.at("t");
    r.end = j.at("end");
    r.node = j.at("node");
    r.kind = static_cast<MsgKind>(j.at("kind").get<int>());
    r.mode = static_cast<TxMode>(j.at("mode").get<int>());
    r.copy = j.at("copy");
    r.dest = j.at("dest");
    r.ch_id = j.at("ch");
    r.takeover = j.at("takeover");
    return r;
  }
  if (type == "rx") {
    RxRecord r;
    r.t = j.at("t");
    r.node = j.at("node");
    r.from = j.at("from");
    r.kind = static_cast<MsgKind>(j.at("kind").get<int>());
    r.ok = j.at("ok");
    return r;
  }
  if (type == "note") {
    NoteRecord r;
    r.t = j.at("t");
    r.node = j.at("node");
    r.note.kind = static_cast<NoteKind>(j.at("k").get<int>());
    r.note.a = j.at("a");
    r.note.b = j.at("b");
    return r;
  }
  if (type == "inject") {
    InjectRecord r;
    r.t = j.at("t");
    r.node = j.at("node");
    r.add = j.at("add");
    r.pos = {j.at("x"), j.at("y")};
    return r;
  }
  if (type == "death") {
    DeathRecord r;
    r.t = j.at("t");
    r.node = j.at("node");
    r.battery = j.at("battery");
    return r;
  }
  if (type == "snapshot") {
    Snapshot s;
    s.t = j.at("t");
    s.settled = j.at("settled");
    for (const auto& n : j.at("nodes")) {
      NodeSnap x;
      x.id = n.at(0);
      x.alive = n.at(1);
      x.phase = static_cast<Phase>(n.at(2).get<int>());
      x.role = static_cast<Role>(n.at(3).get<int>());
      x.ch = n.at(4);
      x.degree = n.at(5);
      x.consumed_pj = n.at(6);
      x.residual_pj = n.at(7);
      x.times = times_from(n.at(8));
      x.conserved = n.at(9);
      s.nodes.push_back(x);
    }
    return s;
  }
  throw std::runtime_error("unknown trace record type '" + type + "'");
}

namespace {

json header_json(const Trace& t) {
  return {{"type", "header"},        {"config", t.config},
          {"seed", t.seed},          {"round_len", t.round_len},
          {"horizon", t.horizon},    {"cycle_rounds", t.cycle_rounds},
          {"topology", topology_to_text(t.topology)}};
}

void apply_header(Trace& t, const json& h) {
  if (h.value("type", "") != "header") throw std::runtime_error("trace does not start with a header");
  t.config = h.at("config");
  t.seed = h.at("seed");
  t.round_len = h.at("round_len");
  t.horizon = h.at("horizon");
  t.cycle_rounds = h.at("cycle_rounds");
  t.topology = topology_from_text(h.at("topology").get<std::string>());
}

void put_cbor(std::ostream& os, const json& j) {
  const auto bytes = json::to_cbor(j);
  const auto n = static_cast<std::uint32_t>(bytes.size());
  const char len[4] = {static_cast<char>(n & 0xff), static_cast<char>((n >> 8) & 0xff),
                       static_cast<char>((n >> 16) & 0xff), static_cast<char>((n >> 24) & 0xff)};
  os.write(len, 4);
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

void write_jsonl(const Trace& t, std::ostream& os) {
  os << header_json(t).dump() << '\n';
  for (const auto& r : t.records) os << record_to_json(r).dump() << '\n';
}

void write_cbor(const Trace& t, std::ostream& os) {
  put_cbor(os, header_json(t));
  for (const auto& r : t.records) put_cbor(os, record_to_json(r));
}

std::string trace_to_string(const Trace& t, bool binary) {
  std::ostringstream os;
  if (binary) write_cbor(t, os);
  else write_jsonl(t, os);
  return os.str();
}

Trace read_trace(std::istream& is) {
  Trace t;
  const int first = is.peek();
  if (first == '{') {
    std::string line;
    bool header = true;
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      const json j = json::parse(line);
      if (header) {
        apply_header(t, j);
        header = false;
      } else {
        t.records.push_back(record_from_json(j));
      }
    }
    if (header) throw std::runtime_error("empty trace");
    return t;
  }
  bool header = true;
  while (true) {
    unsigned char len[4];
    if (!is.read(reinterpret_cast<char*>(len), 4)) break;
    const std::uint32_t n = len[0] | (len[1] << 8) | (len[2] << 16) | (static_cast<std::uint32_t>(len[3]) << 24);
    std::vector<std::uint8_t> buf(n);
    if (!is.read(reinterpret_cast<char*>(buf.data()), n)) throw std::runtime_error("truncated binary trace");
    const json j = json::from_cbor(buf);
    if (header) {
      apply_header(t, j);
      header = false;
    } else {
      t.records.push_back(record_from_json(j));
    }
  }
  if (header) throw std::runtime_error("empty trace");
  return t;
}

Trace load_trace(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open trace " + path);
  return read_trace(f);
}

void save_trace(const Trace& t, const std::string& path, bool binary) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write trace " + path);
  if (binary) write_cbor(t, f);
  else write_jsonl(t, f);
}

}  // namespace decoric
