#include "pcnoc/assignment.hpp"

#include <algorithm>
#include <stdexcept>

#include "json.hpp"

namespace pcnoc {

void ElevatorAssignment::validate(const Topology& topo) const {
  if (static_cast<int>(subsets.size()) != topo.node_count())
    throw std::invalid_argument("assignment: subset count does not match topology");
  for (const auto& subset : subsets) {
    if (subset.empty()) throw std::invalid_argument("assignment: empty elevator subset");
    for (size_t k = 0; k < subset.size(); ++k) {
      if (subset[k] < 0 || subset[k] >= topo.elevator_count())
        throw std::invalid_argument("assignment: elevator id out of range");
      if (k > 0 && subset[k] <= subset[k - 1])
        throw std::invalid_argument("assignment: subset not sorted/unique");
    }
  }
}

ElevatorAssignment nearest_assignment(const Topology& topo) {
  ElevatorAssignment a;
  a.subsets.resize(topo.node_count());
  for (NodeId i = 0; i < topo.node_count(); ++i)
    a.subsets[i] = {nearest_elevator(topo, topo.coord_of(i))};
  return a;
}

ElevatorAssignment full_assignment(const Topology& topo) {
  std::vector<ElevatorId> all(topo.elevator_count());
  for (ElevatorId e = 0; e < topo.elevator_count(); ++e) all[e] = e;
  ElevatorAssignment a;
  a.subsets.assign(topo.node_count(), all);
  return a;
}

ElevatorAssignment assignment_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("assignment json: ") + e.what());
  }
  ElevatorAssignment a;
  for (const auto& subset : j.at("subsets")) {
    std::vector<ElevatorId> s;
    for (const auto& e : subset) s.push_back(e.get<int>());
    std::sort(s.begin(), s.end());
    a.subsets.push_back(std::move(s));
  }
  return a;
}

std::string assignment_to_json_text(const ElevatorAssignment& a) {
  nlohmann::json j;
  j["subsets"] = a.subsets;
  return j.dump();
}

}  // namespace pcnoc
