#include "pcnoc/routing.hpp"

#include <sstream>
#include <stdexcept>

namespace pcnoc {

namespace {

RouteDecision xy_hop(Coord cur, Coord target, Vn vn) {
  if (cur.x != target.x)
    return {cur.x < target.x ? Port::East : Port::West, vn};
  return {cur.y < target.y ? Port::South : Port::North, vn};
}

[[noreturn]] void corrupt(const char* what) {
  throw std::logic_error(std::string("route: inconsistent packet state: ") + what);
}

}  // namespace

PacketRouteState initial_route_state(Coord src, Coord dst, ElevatorId elevator,
                                     const Topology& topo) {
  PacketRouteState st;
  if (src.z == dst.z) return st;  // same layer: never touches an elevator
  st.assigned_elevator = elevator;
  st.descending = dst.z < src.z;
  st.phase = topo.on_elevator_column(src, elevator) ? RoutePhase::vertical
                                                    : RoutePhase::to_elevator;
  return st;
}

RouteDecision route(Coord current, Coord dst, const PacketRouteState& state,
                    const Topology& topo) {
  if (!topo.contains(current) || !topo.contains(dst))
    corrupt("coordinate outside topology");

  const Vn late_vn = state.descending ? Vn::vn1 : Vn::vn0;
  if (current == dst) return {Port::Local, late_vn};

  if (state.assigned_elevator < 0) {
    // Same-layer packet: plain XY on VN0.
    if (current.z != dst.z) corrupt("same-layer packet off its layer");
    return xy_hop(current, dst, Vn::vn0);
  }

  const auto [ex, ey] = topo.elevator_column(state.assigned_elevator);
  switch (state.phase) {
    case RoutePhase::to_elevator:
      if (current.z == dst.z) corrupt("to_elevator phase on destination layer");
      if (current.x == ex && current.y == ey) corrupt("to_elevator phase on the column");
      return xy_hop(current, Coord{ex, ey, current.z}, Vn::vn0);
    case RoutePhase::vertical:
      if (current.x != ex || current.y != ey) corrupt("vertical phase off the column");
      if (current.z == dst.z) corrupt("vertical phase on destination layer");
      return current.z < dst.z ? RouteDecision{Port::Up, Vn::vn0}
                               : RouteDecision{Port::Down, Vn::vn1};
    case RoutePhase::to_destination:
      if (current.z != dst.z) corrupt("to_destination phase off destination layer");
      return xy_hop(current, dst, late_vn);
  }
  corrupt("unknown phase");
}

PacketRouteState advance_route_state(PacketRouteState state, Coord next, Coord dst,
                                     const Topology& topo) {
  if (state.assigned_elevator < 0) return state;
  RoutePhase phase;
  if (next.z == dst.z) {
    phase = RoutePhase::to_destination;
  } else if (topo.on_elevator_column(next, state.assigned_elevator)) {
    phase = RoutePhase::vertical;
  } else {
    phase = RoutePhase::to_elevator;
  }
  if (static_cast<int>(phase) < static_cast<int>(state.phase))
    throw std::logic_error("route: phase regression");
  state.phase = phase;
  return state;
}

// --- dependency graph ----------------------------------------------------

DependencyGraph::ChannelId DependencyGraph::channel(NodeId router, Port port, Vn vn) {
  const int want = router * kPortCount * kVnCount + static_cast<int>(port) * kVnCount +
                   static_cast<int>(vn);
  if (want >= dense_stride_) {
    dense_.resize(want + 1, -1);
    dense_stride_ = want + 1;
  }
  if (dense_[want] < 0) {
    dense_[want] = next_id_++;
    keys_.push_back({router, port, vn});
    adj_.emplace_back();
    edge_seen_.emplace_back();
  }
  return dense_[want];
}

void DependencyGraph::add_edge(ChannelId from, ChannelId to) {
  auto& seen = edge_seen_[from];
  if (static_cast<size_t>(to) >= seen.size()) seen.resize(to + 1, 0);
  if (seen[to]) return;
  seen[to] = 1;
  adj_[from].push_back(to);
}

std::string DependencyGraph::describe(ChannelId c) const {
  static const char* port_names[] = {"N", "S", "E", "W", "Up", "Down", "Local"};
  const Key& k = keys_[c];
  std::ostringstream out;
  out << "r" << k.router << ":" << port_names[static_cast<int>(k.port)] << "/vn"
      << static_cast<int>(k.vn);
  return out.str();
}

std::vector<DependencyGraph::ChannelId> DependencyGraph::find_cycle() const {
  enum : char { white, grey, black };
  std::vector<char> color(next_id_, white);
  std::vector<ChannelId> stack, path;
  std::vector<size_t> edge_pos;

  for (ChannelId root = 0; root < next_id_; ++root) {
    if (color[root] != white) continue;
    stack = {root};
    edge_pos = {0};
    path = {root};
    color[root] = grey;
    while (!stack.empty()) {
      const ChannelId u = stack.back();
      if (edge_pos.back() < adj_[u].size()) {
        const ChannelId v = adj_[u][edge_pos.back()++];
        if (color[v] == grey) {
          // unwind path to v to report the cycle
          std::vector<ChannelId> cycle;
          auto it = path.end();
          do {
            --it;
            cycle.push_back(*it);
          } while (*it != v);
          std::reverse(cycle.begin(), cycle.end());
          return cycle;
        }
        if (color[v] == white) {
          color[v] = grey;
          stack.push_back(v);
          edge_pos.push_back(0);
          path.push_back(v);
        }
      } else {
        color[u] = black;
        stack.pop_back();
        edge_pos.pop_back();
        path.pop_back();
      }
    }
  }
  return {};
}

namespace {

// Walks one packet's path and adds its channel-to-channel dependencies.
void trace_path(DependencyGraph& graph, const Topology& topo, Coord src, Coord dst,
                ElevatorId elevator) {
  PacketRouteState state = initial_route_state(src, dst, elevator, topo);
  Coord cur = src;
  int prev_channel = -1;
  int guard = 4 * (topo.width() + topo.depth() + topo.layers());
  while (!(cur == dst)) {
    if (--guard < 0) throw std::logic_error("route: no progress while tracing path");
    const RouteDecision d = route(cur, dst, state, topo);
    const int ch = graph.channel(topo.id_of(cur), d.port, d.vn);
    if (prev_channel >= 0) graph.add_edge(prev_channel, ch);
    prev_channel = ch;
    Coord next = cur;
    switch (d.port) {
      case Port::North: next.y -= 1; break;
      case Port::South: next.y += 1; break;
      case Port::East: next.x += 1; break;
      case Port::West: next.x -= 1; break;
      case Port::Up: next.z += 1; break;
      case Port::Down: next.z -= 1; break;
      case Port::Local: throw std::logic_error("route: Local before destination");
    }
    state = advance_route_state(state, next, dst, topo);
    cur = next;
  }
  // Ejection never blocks in this model, so the final Local channel is not a
  // contended resource and is left out of the graph.
}

}  // namespace

DeadlockReport check_deadlock_freedom(const Topology& topo,
                                      const ElevatorAssignment& assignment) {
  assignment.validate(topo);
  DependencyGraph graph;
  const int n = topo.node_count();
  for (NodeId s = 0; s < n; ++s) {
    const Coord src = topo.coord_of(s);
    for (NodeId t = 0; t < n; ++t) {
      if (s == t) continue;
      const Coord dst = topo.coord_of(t);
      if (src.z == dst.z) {
        trace_path(graph, topo, src, dst, -1);
      } else {
        for (ElevatorId e : assignment.subset(s)) trace_path(graph, topo, src, dst, e);
      }
    }
  }

  DeadlockReport report;
  report.channels = static_cast<size_t>(graph.node_count());
  size_t edges = 0;
  for (const auto& out : graph.adjacency()) edges += out.size();
  report.dependencies = edges;
  const auto cycle = graph.find_cycle();
  report.acyclic = cycle.empty();
  for (const auto c : cycle) report.cycle.push_back(graph.describe(c));
  return report;
}

}  // namespace pcnoc
