#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pcnoc/assignment.hpp"
#include "pcnoc/rng.hpp"
#include "pcnoc/topology.hpp"

namespace pcnoc {

// Timestamps of a finished transmission at the source router: the cycle the
// header flit left and the first cycle after the tail flit left. With
// wormhole switching, blocking anywhere up to the elevator stretches this
// window, so it proxies for path congestion using local information only.
struct SelectionCostSample {
  uint64_t t_head = 0;
  uint64_t t_tail = 0;
  int packet_length = 0;
};

// Per-flit blocking latency of the transmission: (t_tail - t_head - l_p) / l_p.
// Zero means the packet streamed out back to back.
double selection_latency(const SelectionCostSample& sample);

// Exponential smoothing C_k <- a*T + (1-a)*C_k.
double smoothed_cost(double old_cost, double sample, double a);

// Cost of elevator k relative to the rest of the subset: C_k / sum(C_p).
// An all-zero cost vector is read as uniform (1/|A|), so a fresh selector
// behaves like plain round robin.
double relative_cost(std::span<const double> costs, size_t k);

// Probability that the round robin passes over an elevator with relative
// cost c_rel in a subset of the given size. Piecewise linear: 0 up to the
// uniform share 1/|A|, rising to 1-xi at 2/|A|, clamped at 1-xi beyond. xi
// keeps every elevator selectable so its cost can still be refreshed.
double skip_probability(double c_rel, size_t subset_size, double xi);

struct AdeleParams {
  double a = 0.2;                 // smoothing coefficient of the cost update
  double xi = 0.05;               // exploration floor
  double minimal_threshold = 0.5; // below this (max over costs), take the minimal path
  void validate() const;
};

// Selection state for one source router: its subset A_i, the round-robin
// pointer, and the smoothed per-elevator costs. Owned by the simulation core;
// not shared.
class SelectorState {
 public:
  SelectorState(std::vector<ElevatorId> subset, AdeleParams params, Rng rng);

  const std::vector<ElevatorId>& subset() const { return subset_; }
  const std::vector<double>& costs() const { return costs_; }
  double cost(ElevatorId k) const { return costs_[index_of(k)]; }
  const AdeleParams& params() const { return params_; }

  void update_cost(ElevatorId k, double latency);

  double relative_cost_of(ElevatorId k) const;
  double skip_probability_of(ElevatorId k) const;

  // Plain round robin over the subset.
  ElevatorId select_rr();

  // AdEle: below the cost threshold pick the minimal-path elevator for this
  // (src, dst); otherwise round robin where elevator k is passed over with
  // probability skip_probability_of(k) per visit. A visit with zero skip
  // probability consumes no randomness, so with all-zero costs the produced
  // sequence equals select_rr exactly. Bounded by 10*|A| draws, after which
  // the plain round-robin choice is taken.
  ElevatorId select_adele(Coord src, Coord dst, const Topology& topo);

 private:
  size_t index_of(ElevatorId k) const;

  std::vector<ElevatorId> subset_;
  std::vector<double> costs_;
  size_t rr_pointer_ = 0;
  AdeleParams params_;
  Rng rng_;
};

// Elevator-First baseline: nearest elevator to the source, assignment ignored.
ElevatorId select_nearest(const Topology& topo, Coord src);

// Idealized global-information baseline: the elevator whose XY approach path
// from src carries the least total buffer occupancy (ties: shorter path, then
// lower id). router_occupancy is a per-router snapshot of occupied buffer
// slots, read with zero staleness.
ElevatorId select_cda(const Topology& topo, Coord src, Coord dst,
                      std::span<const int> router_occupancy);

// Minimal-path elevator within a subset: minimizes src -> e -> dst hops,
// ties toward the lowest elevator id.
ElevatorId minimal_path_elevator(const Topology& topo, Coord src, Coord dst,
                                 std::span<const ElevatorId> subset);

}  // namespace pcnoc
