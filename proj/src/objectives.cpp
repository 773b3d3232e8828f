#include "pcnoc/objectives.hpp"

#include <stdexcept>

namespace pcnoc {

double utilization_variance(std::span<const double> utilization) {
  const double e = static_cast<double>(utilization.size());
  double mean = 0.0;
  for (const double u : utilization) mean += u;
  mean /= e;
  double var = 0.0;
  for (const double u : utilization) var += (u - mean) * (u - mean);
  return var / e;
}

ObjectiveEvaluator::ObjectiveEvaluator(const Topology& topo, const TrafficMatrix& traffic)
    : topo_(topo) {
  const int n = topo.node_count();
  const int e_count = topo.elevator_count();
  if (traffic.n != n)
    throw std::invalid_argument("objectives: traffic matrix does not match topology");

  const int per_layer = topo.nodes_per_layer();
  const int layers = topo.layers();
  interlayer_pairs_ = static_cast<double>(n) *
                      (static_cast<double>(layers - 1) / layers * static_cast<double>(n));

  interlayer_flow_.assign(n, 0.0);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    const int zi = topo.coord_of(i).z;
    double sum = 0.0;
    for (int j = 0; j < n; ++j)
      if (j / per_layer != zi) sum += traffic.at(i, j);
    interlayer_flow_[i] = sum;
  }

  // sum_j D_ij^e in closed form: for every other layer z, the d_se and |dz|
  // terms repeat per node of that layer, and the column-to-node part is the
  // same grid sum on every layer.
  std::vector<double> column_grid_sum(e_count, 0.0);
  for (ElevatorId e = 0; e < e_count; ++e) {
    const auto [ex, ey] = topo.elevator_column(e);
    double s = 0.0;
    for (int y = 0; y < topo.depth(); ++y)
      for (int x = 0; x < topo.width(); ++x) s += std::abs(x - ex) + std::abs(y - ey);
    column_grid_sum[e] = s;
  }

  dist_total_.assign(static_cast<size_t>(n) * e_count, 0.0);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    const Coord src = topo.coord_of(i);
    double dz_sum = 0.0;
    for (int z = 0; z < layers; ++z)
      if (z != src.z) dz_sum += std::abs(z - src.z);
    for (ElevatorId e = 0; e < e_count; ++e) {
      const auto [ex, ey] = topo.elevator_column(e);
      const double d_se = std::abs(src.x - ex) + std::abs(src.y - ey);
      dist_total_[static_cast<size_t>(i) * e_count + e] =
          (layers - 1) * per_layer * d_se + per_layer * dz_sum +
          (layers - 1) * column_grid_sum[e];
    }
  }
}

std::vector<double> ObjectiveEvaluator::elevator_utilization(
    const ElevatorAssignment& a) const {
  const int n = topo_.node_count();
  std::vector<double> u(topo_.elevator_count(), 0.0);
  for (NodeId i = 0; i < n; ++i) {
    const auto& subset = a.subset(i);
    const double share = interlayer_flow_[i] / static_cast<double>(subset.size());
    for (const ElevatorId e : subset) u[e] += share;
  }
  return u;
}

double ObjectiveEvaluator::average_distance(const ElevatorAssignment& a) const {
  const int n = topo_.node_count();
  const int e_count = topo_.elevator_count();
  double total = 0.0;
  for (NodeId i = 0; i < n; ++i) {
    const auto& subset = a.subset(i);
    double per_source = 0.0;
    for (const ElevatorId e : subset)
      per_source += dist_total_[static_cast<size_t>(i) * e_count + e];
    total += per_source / static_cast<double>(subset.size());
  }
  return total / interlayer_pairs_;
}

ObjectiveVector ObjectiveEvaluator::evaluate(const ElevatorAssignment& a) const {
  const auto u = elevator_utilization(a);
  return {utilization_variance(u), average_distance(a)};
}

std::vector<double> elevator_utilization(const ElevatorAssignment& a,
                                         const TrafficMatrix& traffic,
                                         const Topology& topo) {
  return ObjectiveEvaluator(topo, traffic).elevator_utilization(a);
}

double average_distance(const ElevatorAssignment& a, const Topology& topo) {
  TrafficMatrix unused;
  unused.n = topo.node_count();
  unused.rates.assign(static_cast<size_t>(unused.n) * unused.n, 0.0);
  return ObjectiveEvaluator(topo, unused).average_distance(a);
}

}  // namespace pcnoc
