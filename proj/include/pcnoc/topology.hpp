#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace pcnoc {

using NodeId = int;
using ElevatorId = int;

struct Coord {
  int x = 0;
  int y = 0;
  int z = 0;  // layer index
  bool operator==(const Coord&) const = default;
};

struct Dims {
  int x = 0;       // routers per row
  int y = 0;       // routers per column
  int layers = 0;  // stacked layers
  bool operator==(const Dims&) const = default;
};

// A stack of identical X*Y mesh layers. Vertical connectivity exists only at
// the elevator columns; each elevator is an (x, y) position whose vertical
// link spans all layers. Immutable after construction, safe to share across
// threads.
class Topology {
 public:
  Topology(Dims dims, std::vector<std::pair<int, int>> elevator_columns);
  // Smallest valid network; placeholder until a real topology is assigned.
  Topology() : Topology({1, 1, 2}, {{0, 0}}) {}

  int width() const { return dims_.x; }
  int depth() const { return dims_.y; }
  int layers() const { return dims_.layers; }
  Dims dims() const { return dims_; }
  int node_count() const { return dims_.x * dims_.y * dims_.layers; }
  int nodes_per_layer() const { return dims_.x * dims_.y; }
  int elevator_count() const { return static_cast<int>(elevators_.size()); }
  const std::vector<std::pair<int, int>>& elevators() const { return elevators_; }
  std::pair<int, int> elevator_column(ElevatorId e) const;

  bool contains(Coord c) const {
    return c.x >= 0 && c.x < dims_.x && c.y >= 0 && c.y < dims_.y && c.z >= 0 &&
           c.z < dims_.layers;
  }

  // Router ids are row-major within a layer, then layer-major:
  // id = z*X*Y + y*X + x. Fixed so traces and matrices stay portable.
  NodeId id_of(Coord c) const { return c.z * nodes_per_layer() + c.y * dims_.x + c.x; }
  Coord coord_of(NodeId id) const {
    const int plane = nodes_per_layer();
    return Coord{(id % plane) % dims_.x, (id % plane) / dims_.x, id / plane};
  }

  // Elevator index at (x, y), or -1 if the column has no vertical link.
  ElevatorId elevator_at(int x, int y) const { return column_index_[y * dims_.x + x]; }
  bool on_elevator_column(Coord c, ElevatorId e) const {
    const auto& col = elevator_column(e);
    return c.x == col.first && c.y == col.second;
  }

 private:
  Dims dims_;
  std::vector<std::pair<int, int>> elevators_;
  std::vector<ElevatorId> column_index_;  // per (x, y), -1 if none
};

// Intra-layer Manhattan distance; the vertical component is reported
// separately by vertical_distance so callers can price it differently.
int manhattan_xy(Coord a, Coord b);
int vertical_distance(Coord a, Coord b);

// Hop count of the path src -> elevator column -> dst: d_se + d_e + d_ed.
// Zero when src and dst share a layer (same-layer traffic never takes an
// elevator).
int elevator_path_distance(const Topology& topo, Coord src, Coord dst, ElevatorId e);

// Elevator with minimum intra-layer distance from node; ties break toward the
// lowest elevator index.
ElevatorId nearest_elevator(const Topology& topo, Coord node);

// JSON form: {"dims":[X,Y,L], "elevators":[[x,y],...]}
Topology topology_from_json_text(const std::string& text);
std::string topology_to_json_text(const Topology& topo);

// Resolves a preset name (p_s1, p_s2, p_s3, p_m) or a JSON file path.
Topology load_topology(const std::string& preset_or_path);

}  // namespace pcnoc
