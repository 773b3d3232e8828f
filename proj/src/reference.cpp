#include "pcnoc/reference.hpp"

namespace pcnoc::reference {

std::vector<double> elevator_utilization(const ElevatorAssignment& a,
                                         const TrafficMatrix& traffic,
                                         const Topology& topo) {
  const int n = topo.node_count();
  std::vector<double> u(topo.elevator_count(), 0.0);
  for (NodeId i = 0; i < n; ++i) {
    const Coord src = topo.coord_of(i);
    const auto& subset = a.subset(i);
    for (NodeId j = 0; j < n; ++j) {
      const Coord dst = topo.coord_of(j);
      if (src.z == dst.z) continue;  // P_ije = 0 on the same layer
      for (const ElevatorId e : subset)
        u[e] += traffic.at(i, j) / static_cast<double>(subset.size());
    }
  }
  return u;
}

double average_distance(const ElevatorAssignment& a, const Topology& topo) {
  const int n = topo.node_count();
  double total = 0.0;
  for (NodeId i = 0; i < n; ++i) {
    const Coord src = topo.coord_of(i);
    const auto& subset = a.subset(i);
    for (const ElevatorId e : subset) {
      double per_elevator = 0.0;
      for (NodeId j = 0; j < n; ++j)
        per_elevator += elevator_path_distance(topo, src, topo.coord_of(j), e);
      total += per_elevator / static_cast<double>(subset.size());
    }
  }
  const double layers = topo.layers();
  const double pairs = n * ((layers - 1.0) / layers * n);
  return total / pairs;
}

}  // namespace pcnoc::reference
