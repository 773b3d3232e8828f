#include "pcnoc/traffic.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pcnoc {

void TrafficSpec::validate() const {
  if (injection_rate < 0) throw std::invalid_argument("traffic: injection_rate < 0");
  if (min_packet_length < 2 || min_packet_length > max_packet_length)
    throw std::invalid_argument("traffic: need 2 <= min_packet_length <= max_packet_length");
  if (kind != TrafficKind::trace && injection_rate > mean_packet_length())
    throw std::invalid_argument("traffic: injection_rate exceeds one packet per cycle");
}

void TrafficMatrix::validate() const {
  if (static_cast<size_t>(n) * n != rates.size())
    throw std::invalid_argument("traffic matrix: bad dimensions");
  for (NodeId i = 0; i < n; ++i) {
    if (at(i, i) != 0.0) throw std::invalid_argument("traffic matrix: nonzero diagonal");
    for (NodeId j = 0; j < n; ++j)
      if (at(i, j) < 0.0) throw std::invalid_argument("traffic matrix: negative rate");
  }
}

void TrafficMatrix::require_interlayer_flow(const Topology& topo) const {
  if (n != topo.node_count())
    throw std::invalid_argument("traffic matrix: dimension mismatch with topology");
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = 0; j < n; ++j)
      if (topo.coord_of(i).z != topo.coord_of(j).z && at(i, j) > 0.0) return;
  throw std::invalid_argument("traffic matrix: no inter-layer flow");
}

std::optional<NodeId> shuffle_destination(NodeId src, int node_count) {
  int bits = 0;
  while ((1 << bits) < node_count) ++bits;
  if (bits == 0) return std::nullopt;
  const unsigned mask = (1u << bits) - 1;
  const unsigned s = static_cast<unsigned>(src);
  const unsigned dst = ((s << 1) | (s >> (bits - 1))) & mask;
  if (static_cast<NodeId>(dst) == src || static_cast<int>(dst) >= node_count)
    return std::nullopt;
  return static_cast<NodeId>(dst);
}

std::vector<TraceRecord> parse_trace_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("trace: empty file");
  // tolerate a UTF-8 BOM and trailing \r
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "src,dst,length,cycle")
    throw std::invalid_argument("trace: expected header src,dst,length,cycle");

  std::vector<TraceRecord> records;
  uint64_t prev_cycle = 0;
  size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    TraceRecord r;
    char c1, c2, c3;
    std::istringstream fields(line);
    if (!(fields >> r.src >> c1 >> r.dst >> c2 >> r.length >> c3 >> r.cycle) ||
        c1 != ',' || c2 != ',' || c3 != ',') {
      std::ostringstream msg;
      msg << "trace: malformed row " << row;
      throw std::invalid_argument(msg.str());
    }
    if (r.src == r.dst) throw std::invalid_argument("trace: src == dst");
    if (r.length < 2) throw std::invalid_argument("trace: packet length < 2");
    if (!records.empty() && r.cycle < prev_cycle)
      throw std::invalid_argument("trace: cycles must be nondecreasing");
    prev_cycle = r.cycle;
    records.push_back(r);
  }
  return records;
}

std::vector<TraceRecord> load_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("trace: unreadable file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_trace_csv(buf.str());
}

TrafficSource::TrafficSource(TrafficSpec spec, const Topology& topo, uint64_t seed)
    : spec_(std::move(spec)), node_count_(topo.node_count()) {
  spec_.validate();
  while ((1 << id_bits_) < node_count_) ++id_bits_;
  packet_probability_ = spec_.injection_rate / spec_.mean_packet_length();
  node_rng_.reserve(node_count_);
  for (NodeId i = 0; i < node_count_; ++i)
    node_rng_.push_back(Rng::stream(seed, rng_domain::traffic, static_cast<uint64_t>(i)));
  if (spec_.kind == TrafficKind::trace) index_trace(load_trace(spec_.trace_path));
}

TrafficSource::TrafficSource(TrafficSpec spec, const Topology& topo,
                             std::vector<TraceRecord> records)
    : spec_(std::move(spec)), node_count_(topo.node_count()) {
  spec_.kind = TrafficKind::trace;
  index_trace(std::move(records));
}

void TrafficSource::index_trace(std::vector<TraceRecord> records) {
  trace_by_src_.assign(node_count_, {});
  trace_cursor_.assign(node_count_, 0);
  trace_remaining_ = records.size();
  for (auto& r : records) {
    if (r.src < 0 || r.src >= node_count_ || r.dst < 0 || r.dst >= node_count_)
      throw std::invalid_argument("trace: node id out of range");
    if (r.src == r.dst) throw std::invalid_argument("trace: src == dst");
    if (r.length < 2) throw std::invalid_argument("trace: packet length < 2");
    trace_by_src_[r.src].push_back(r);
  }
}

std::optional<PacketDescriptor> TrafficSource::next_packet(NodeId node, uint64_t cycle) {
  if (spec_.kind == TrafficKind::trace) {
    auto& cursor = trace_cursor_[node];
    const auto& records = trace_by_src_[node];
    if (cursor < records.size() && records[cursor].cycle <= cycle) {
      PacketDescriptor p{records[cursor].dst, records[cursor].length};
      ++cursor;
      --trace_remaining_;
      return p;
    }
    return std::nullopt;
  }

  auto& rng = node_rng_[node];
  if (rng.next_double() >= packet_probability_) return std::nullopt;

  NodeId dst;
  if (spec_.kind == TrafficKind::uniform) {
    dst = static_cast<NodeId>(rng.next_below(static_cast<uint64_t>(node_count_ - 1)));
    if (dst >= node) ++dst;  // skip self
  } else {
    const auto image = shuffle_destination(node, node_count_);
    if (!image) return std::nullopt;  // self-map: skip this injection
    dst = *image;
  }
  const int length = rng.next_int(spec_.min_packet_length, spec_.max_packet_length);
  return PacketDescriptor{dst, length};
}

bool TrafficSource::exhausted() const {
  return spec_.kind == TrafficKind::trace && trace_remaining_ == 0;
}

TrafficMatrix frequency_matrix(const TrafficSpec& spec, const Topology& topo) {
  const int n = topo.node_count();
  TrafficMatrix m;
  m.n = n;
  m.rates.assign(static_cast<size_t>(n) * n, 0.0);
  switch (spec.kind) {
    case TrafficKind::uniform:
      for (NodeId i = 0; i < n; ++i)
        for (NodeId j = 0; j < n; ++j)
          if (i != j) m.at(i, j) = 1.0;
      break;
    case TrafficKind::shuffle:
      for (NodeId i = 0; i < n; ++i)
        if (const auto dst = shuffle_destination(i, n)) m.at(i, *dst) = 1.0;
      break;
    case TrafficKind::trace:
      for (const auto& r : load_trace(spec.trace_path)) m.at(r.src, r.dst) += 1.0;
      break;
  }
  m.validate();
  return m;
}

}  // namespace pcnoc
