#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pcnoc/rng.hpp"
#include "pcnoc/topology.hpp"

namespace pcnoc {

enum class TrafficKind { uniform, shuffle, trace };

// Static description of a workload; instantiate a TrafficSource to draw from
// it. injection_rate is in flits per node per cycle (matching the axes of the
// latency sweeps).
struct TrafficSpec {
  TrafficKind kind = TrafficKind::uniform;
  double injection_rate = 1e-3;
  int min_packet_length = 10;
  int max_packet_length = 30;
  std::string trace_path;  // trace kind only

  double mean_packet_length() const { return 0.5 * (min_packet_length + max_packet_length); }
  void validate() const;
};

struct PacketDescriptor {
  NodeId dst = 0;
  int length = 0;
};

struct TraceRecord {
  NodeId src = 0;
  NodeId dst = 0;
  int length = 0;
  uint64_t cycle = 0;
};

// Pairwise flow frequencies f_ij feeding the offline objectives. Diagonal is
// zero; entries are non-negative relative weights.
struct TrafficMatrix {
  int n = 0;
  std::vector<double> rates;  // row-major, n*n

  double at(NodeId i, NodeId j) const { return rates[static_cast<size_t>(i) * n + j]; }
  double& at(NodeId i, NodeId j) { return rates[static_cast<size_t>(i) * n + j]; }
  void validate() const;
  // Throws unless some inter-layer pair has positive rate; elevator
  // optimization is vacuous otherwise.
  void require_interlayer_flow(const Topology& topo) const;
};

// CSV with header "src,dst,length,cycle", one packet per row, cycles
// nondecreasing.
std::vector<TraceRecord> load_trace(const std::string& path);
std::vector<TraceRecord> parse_trace_csv(const std::string& text);

// Per-simulation packet generator. Each node owns an independent rng stream,
// so the full injection sequence is reproducible regardless of the order
// nodes are polled in.
class TrafficSource {
 public:
  TrafficSource(TrafficSpec spec, const Topology& topo, uint64_t seed);
  // Trace replay with in-memory records (used by tests and the trace kind).
  TrafficSource(TrafficSpec spec, const Topology& topo, std::vector<TraceRecord> records);

  // At most one packet per node per call; call once per node per cycle.
  std::optional<PacketDescriptor> next_packet(NodeId node, uint64_t cycle);

  // Trace workloads only: all records have been replayed.
  bool exhausted() const;

  const TrafficSpec& spec() const { return spec_; }

 private:
  void index_trace(std::vector<TraceRecord> records);

  TrafficSpec spec_;
  int node_count_ = 0;
  int id_bits_ = 0;
  double packet_probability_ = 0.0;
  std::vector<Rng> node_rng_;
  std::vector<std::vector<TraceRecord>> trace_by_src_;
  std::vector<size_t> trace_cursor_;
  size_t trace_remaining_ = 0;
};

// Expected pairwise frequencies of a workload: uniform -> all-ones off the
// diagonal, shuffle -> the bit-rotation permutation, trace -> empirical
// packet counts.
TrafficMatrix frequency_matrix(const TrafficSpec& spec, const Topology& topo);

// dst of the shuffle permutation: rotate the node id left by one within
// ceil(log2 N) bits. Returns nullopt for self-maps and out-of-range images.
std::optional<NodeId> shuffle_destination(NodeId src, int node_count);

}  // namespace pcnoc
