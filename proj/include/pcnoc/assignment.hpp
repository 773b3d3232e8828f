#pragma once

#include <string>
#include <vector>

#include "pcnoc/topology.hpp"

namespace pcnoc {

// Per-router elevator subsets A_i: the set of elevators router i may pick
// from when it sources an inter-layer packet. Subsets are kept sorted and
// unique; every subset is non-empty.
struct ElevatorAssignment {
  std::vector<std::vector<ElevatorId>> subsets;  // indexed by router id

  void validate(const Topology& topo) const;
  const std::vector<ElevatorId>& subset(NodeId i) const { return subsets[i]; }
};

// Elevator-First baseline: every router gets the singleton {nearest elevator}.
ElevatorAssignment nearest_assignment(const Topology& topo);

// All routers may use every elevator.
ElevatorAssignment full_assignment(const Topology& topo);

// JSON form: {"subsets":[[e,...],...]}
ElevatorAssignment assignment_from_json_text(const std::string& text);
std::string assignment_to_json_text(const ElevatorAssignment& a);

}  // namespace pcnoc
