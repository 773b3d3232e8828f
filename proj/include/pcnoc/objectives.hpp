#pragma once

#include <span>
#include <vector>

#include "pcnoc/assignment.hpp"
#include "pcnoc/topology.hpp"
#include "pcnoc/traffic.hpp"

namespace pcnoc {

struct ObjectiveVector {
  double variance = 0.0;      // elevator-utilization variance, minimized
  double avg_distance = 0.0;  // mean source-elevator-destination hops, minimized
};

// Population variance of per-elevator utilizations.
double utilization_variance(std::span<const double> utilization);

// Precomputes the traffic- and distance-dependent terms once so that a single
// objective evaluation is O(sum |A_i|) instead of O(N^2 * E); the annealer
// calls it tens of thousands of times. The precompute loops are OpenMP
// parallel but accumulate in fixed order, so results do not depend on the
// thread count.
class ObjectiveEvaluator {
 public:
  ObjectiveEvaluator(const Topology& topo, const TrafficMatrix& traffic);

  // U_e = sum_i (1/|A_i|) sum_j f_ij * P_ije over inter-layer pairs.
  std::vector<double> elevator_utilization(const ElevatorAssignment& a) const;

  // AD: mean of D_ij^e over ordered inter-layer pairs, averaged uniformly
  // over each source's subset.
  double average_distance(const ElevatorAssignment& a) const;

  ObjectiveVector evaluate(const ElevatorAssignment& a) const;

  const Topology& topology() const { return topo_; }
  double interlayer_pair_count() const { return interlayer_pairs_; }

 private:
  const Topology& topo_;
  std::vector<double> interlayer_flow_;  // per source: sum_j inter-layer f_ij
  std::vector<double> dist_total_;       // per (source, elevator): sum_j D_ij^e
  double interlayer_pairs_ = 0.0;        // N * ((L-1)/L * N)
};

// Convenience wrappers matching the evaluator methods for one-shot use.
std::vector<double> elevator_utilization(const ElevatorAssignment& a,
                                         const TrafficMatrix& traffic,
                                         const Topology& topo);
double average_distance(const ElevatorAssignment& a, const Topology& topo);

}  // namespace pcnoc
