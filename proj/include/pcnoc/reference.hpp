#pragma once

#include <vector>

#include "pcnoc/assignment.hpp"
#include "pcnoc/topology.hpp"
#include "pcnoc/traffic.hpp"

namespace pcnoc::reference {

// Serial brute-force enumerators kept as the test oracle for the fast
// kernels in ObjectiveEvaluator: every (source, destination, elevator)
// triple is visited literally, with no precomputation or algebraic
// reshuffling. The benchmark target compares the two paths.

std::vector<double> elevator_utilization(const ElevatorAssignment& a,
                                         const TrafficMatrix& traffic,
                                         const Topology& topo);

double average_distance(const ElevatorAssignment& a, const Topology& topo);

}  // namespace pcnoc::reference
