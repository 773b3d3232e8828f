#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pcnoc/assignment.hpp"
#include "pcnoc/routing.hpp"
#include "pcnoc/selection.hpp"
#include "pcnoc/topology.hpp"
#include "pcnoc/traffic.hpp"

namespace pcnoc {

enum class Policy { nearest, rr, adele, cda };
Policy policy_from_string(const std::string& name);
std::string to_string(Policy p);

// Per-hop energy coefficients, arbitrary units. Vertical hops are cheaper
// than horizontal ones by default; results are meant to be compared
// relatively, not against silicon.
struct EnergyModel {
  double e_router = 0.8;
  double e_link = 0.4;
  double e_tsv = 0.2;
  void validate() const;
};

struct SimConfig {
  Topology topology;
  TrafficSpec traffic;
  std::optional<std::vector<TraceRecord>> trace_records;  // in-memory trace replay
  Policy policy = Policy::nearest;
  AdeleParams adele;
  std::optional<ElevatorAssignment> assignment;  // required by rr/adele only
  uint64_t warmup_cycles = 10000;
  uint64_t measure_cycles = 100000;
  uint64_t seed = 1;
  EnergyModel energy;
  std::string cycle_csv_path;  // when set, per-cycle cumulative counts land here

  void validate() const;
};

struct SimMetrics {
  // Latency is injection-to-tail-delivery in cycles, averaged over packets
  // injected during the measurement window and delivered by the end.
  double avg_latency = 0.0;
  double avg_hops = 0.0;
  uint64_t injected = 0;   // packets injected inside the window
  uint64_t delivered = 0;  // of those, fully delivered
  uint64_t injected_flits = 0;
  uint64_t delivered_flits = 0;
  double energy_total = 0.0;     // flit-hops of window packets
  double energy_per_flit = 0.0;  // energy_total / delivered_flits
  std::vector<uint64_t> elevator_traversals;      // packets per elevator
  std::vector<uint64_t> router_forwarded_flits;   // flits each router forwarded
  std::vector<uint64_t> delivered_checkpoints;    // cumulative, every 10k cycles
  uint64_t total_cycles = 0;
};

// Cycle-level wormhole simulation: 4-flit input buffers per (port, VN),
// credit-based flow control, one flit per output port per cycle, rotating
// round-robin arbitration. Single-threaded and deterministic: identical
// (config, seed) gives bit-identical metrics. Throws std::logic_error on any
// internal consistency violation (conservation, credit, wormhole order).
SimMetrics simulate(const SimConfig& config);

struct SweepPoint {
  double rate = 0.0;
  SimMetrics metrics;
};

struct SweepResult {
  std::vector<SweepPoint> points;
  double zero_load_latency = 0.0;  // measured at the lowest swept rate
  int saturation_index = -1;       // first rate with latency > 10x zero-load
  double saturation_rate = 0.0;    // 0 when not reached inside the sweep
};

// Independent runs per rate (seed offset by index), fanned out across
// worker threads. rates must be positive and ascending.
SweepResult latency_sweep(const SimConfig& base, const std::vector<double>& rates);

struct LoadDistribution {
  std::vector<double> router_load;    // per router
  std::vector<double> elevator_load;  // per elevator: column mean
  bool normalized = false;  // true: divided by the mean elevator-less router load
};

// Forwarded-flit load per router, normalized to the average load of routers
// without an elevator (absolute loads when that average is zero).
LoadDistribution load_distribution(const SimMetrics& metrics, const Topology& topo);

}  // namespace pcnoc
