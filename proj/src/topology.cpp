#include "pcnoc/topology.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "pcnoc/presets.hpp"

namespace pcnoc {

Topology::Topology(Dims dims, std::vector<std::pair<int, int>> elevator_columns)
    : dims_(dims), elevators_(std::move(elevator_columns)) {
  if (dims_.x < 1 || dims_.y < 1)
    throw std::invalid_argument("topology: dims must be at least 1x1");
  if (dims_.layers < 2)
    throw std::invalid_argument("topology: need at least 2 layers");
  if (elevators_.empty())
    throw std::invalid_argument("topology: need at least one elevator");

  column_index_.assign(dims_.x * dims_.y, -1);
  for (size_t e = 0; e < elevators_.size(); ++e) {
    const auto [x, y] = elevators_[e];
    if (x < 0 || x >= dims_.x || y < 0 || y >= dims_.y) {
      std::ostringstream msg;
      msg << "topology: elevator (" << x << "," << y << ") outside " << dims_.x << "x"
          << dims_.y << " grid";
      throw std::invalid_argument(msg.str());
    }
    if (column_index_[y * dims_.x + x] != -1) {
      std::ostringstream msg;
      msg << "topology: duplicate elevator at (" << x << "," << y << ")";
      throw std::invalid_argument(msg.str());
    }
    column_index_[y * dims_.x + x] = static_cast<ElevatorId>(e);
  }
}

std::pair<int, int> Topology::elevator_column(ElevatorId e) const {
  if (e < 0 || e >= elevator_count())
    throw std::invalid_argument("topology: invalid elevator id");
  return elevators_[e];
}

int manhattan_xy(Coord a, Coord b) { return std::abs(a.x - b.x) + std::abs(a.y - b.y); }

int vertical_distance(Coord a, Coord b) { return std::abs(a.z - b.z); }

int elevator_path_distance(const Topology& topo, Coord src, Coord dst, ElevatorId e) {
  const auto [ex, ey] = topo.elevator_column(e);
  if (src.z == dst.z) return 0;
  const Coord col_src{ex, ey, src.z};
  const Coord col_dst{ex, ey, dst.z};
  return manhattan_xy(src, col_src) + vertical_distance(src, dst) +
         manhattan_xy(col_dst, dst);
}

ElevatorId nearest_elevator(const Topology& topo, Coord node) {
  ElevatorId best = 0;
  int best_dist = -1;
  for (ElevatorId e = 0; e < topo.elevator_count(); ++e) {
    const auto [ex, ey] = topo.elevator_column(e);
    const int d = std::abs(node.x - ex) + std::abs(node.y - ey);
    if (best_dist < 0 || d < best_dist) {
      best = e;
      best_dist = d;
    }
  }
  return best;
}

Topology topology_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("topology json: ") + e.what());
  }
  if (!j.contains("dims") || !j["dims"].is_array() || j["dims"].size() != 3)
    throw std::invalid_argument("topology json: \"dims\" must be [X,Y,L]");
  Dims dims{j["dims"][0].get<int>(), j["dims"][1].get<int>(), j["dims"][2].get<int>()};
  std::vector<std::pair<int, int>> cols;
  for (const auto& e : j.at("elevators"))
    cols.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
  return Topology(dims, std::move(cols));
}

std::string topology_to_json_text(const Topology& topo) {
  nlohmann::json j;
  j["dims"] = {topo.width(), topo.depth(), topo.layers()};
  auto elevators = nlohmann::json::array();
  for (const auto& [x, y] : topo.elevators()) elevators.push_back({x, y});
  j["elevators"] = elevators;
  return j.dump();
}

Topology load_topology(const std::string& preset_or_path) {
  if (const char* preset = preset_topology_json(preset_or_path))
    return topology_from_json_text(preset);
  std::ifstream in(preset_or_path);
  if (!in)
    throw std::invalid_argument("topology: unknown preset or unreadable file: " +
                                preset_or_path);
  std::stringstream buf;
  buf << in.rdbuf();
  return topology_from_json_text(buf.str());
}

}  // namespace pcnoc
