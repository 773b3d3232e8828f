#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pcnoc/assignment.hpp"
#include "pcnoc/topology.hpp"

namespace pcnoc {

enum class Port : uint8_t { North, South, East, West, Up, Down, Local };
constexpr int kPortCount = 7;

// Two virtual networks break the cyclic dependencies between ascending and
// descending traffic (Elevator-First). VN0 carries intra-layer packets,
// ascending packets, and the pre-elevator leg of descending packets; a packet
// moves to VN1 once it starts going down and stays there.
enum class Vn : uint8_t { vn0 = 0, vn1 = 1 };
constexpr int kVnCount = 2;

struct RouteDecision {
  Port port = Port::Local;
  Vn vn = Vn::vn0;
  bool operator==(const RouteDecision&) const = default;
};

enum class RoutePhase : uint8_t { to_elevator, vertical, to_destination };

// Per-packet routing state. The elevator is chosen once at the source and
// never re-selected; phases advance monotonically.
struct PacketRouteState {
  ElevatorId assigned_elevator = -1;  // -1 for same-layer packets
  RoutePhase phase = RoutePhase::to_destination;
  bool descending = false;
};

PacketRouteState initial_route_state(Coord src, Coord dst, ElevatorId elevator,
                                     const Topology& topo);

// Pure function of its arguments. Intra-layer legs are X-then-Y dimension
// order; inter-layer packets go source -> elevator column -> vertical ->
// destination. Throws std::logic_error on a state/position mismatch, which
// indicates simulator corruption.
RouteDecision route(Coord current, Coord dst, const PacketRouteState& state,
                    const Topology& topo);

// State after the packet's head arrives at `next`.
PacketRouteState advance_route_state(PacketRouteState state, Coord next, Coord dst,
                                     const Topology& topo);

// --- channel-dependency analysis ---------------------------------------

// Nodes are (source router, output port, vn) resources; an edge a->b means
// some packet holds a while waiting for b.
class DependencyGraph {
 public:
  using ChannelId = int;
  ChannelId channel(NodeId router, Port port, Vn vn);
  void add_edge(ChannelId from, ChannelId to);
  int node_count() const { return next_id_; }
  const std::vector<std::vector<ChannelId>>& adjacency() const { return adj_; }
  std::string describe(ChannelId c) const;

  // First cycle found (as a channel sequence), empty if acyclic.
  std::vector<ChannelId> find_cycle() const;

 private:
  struct Key {
    NodeId router;
    Port port;
    Vn vn;
    bool operator==(const Key&) const = default;
  };
  std::vector<Key> keys_;
  std::vector<std::vector<ChannelId>> adj_;
  std::vector<std::vector<char>> edge_seen_;
  int next_id_ = 0;
  // dense index: router * kPortCount * kVnCount + port * kVnCount + vn
  std::vector<ChannelId> dense_;
  int dense_stride_ = 0;
};

struct DeadlockReport {
  bool acyclic = true;
  std::vector<std::string> cycle;  // human-readable channels along one cycle
  size_t channels = 0;
  size_t dependencies = 0;
};

// Walks route(...) over every (src, dst, elevator in A_src) triple, collects
// the channel-dependency graph, and reports any cycle. Report-only; safe on
// any assignment.
DeadlockReport check_deadlock_freedom(const Topology& topo,
                                      const ElevatorAssignment& assignment);

}  // namespace pcnoc
