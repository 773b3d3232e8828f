#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "pcnoc/rng.hpp"
#include "pcnoc/routing.hpp"

using namespace pcnoc;

namespace {

// Walks a packet from src to dst, collecting the per-hop decisions.
std::vector<RouteDecision> walk(const Topology& topo, Coord src, Coord dst,
                                ElevatorId elevator) {
  std::vector<RouteDecision> decisions;
  PacketRouteState state = initial_route_state(src, dst, elevator, topo);
  Coord cur = src;
  while (true) {
    const RouteDecision d = route(cur, dst, state, topo);
    decisions.push_back(d);
    if (d.port == Port::Local) break;
    Coord next = cur;
    switch (d.port) {
      case Port::North: next.y -= 1; break;
      case Port::South: next.y += 1; break;
      case Port::East: next.x += 1; break;
      case Port::West: next.x -= 1; break;
      case Port::Up: next.z += 1; break;
      case Port::Down: next.z -= 1; break;
      case Port::Local: break;
    }
    state = advance_route_state(state, next, dst, topo);
    cur = next;
    REQUIRE(decisions.size() < 1000);
  }
  return decisions;
}

}  // namespace

TEST_CASE("basic route decisions") {
  const Topology t({4, 4, 4}, {{0, 0}});

  SUBCASE("delivery at the destination") {
    const PacketRouteState state = initial_route_state({2, 2, 1}, {2, 2, 1}, -1, t);
    CHECK(route({2, 2, 1}, {2, 2, 1}, state, t) == RouteDecision{Port::Local, Vn::vn0});
  }

  SUBCASE("intra-layer XY on VN0, no elevator involved") {
    const auto path = walk(t, {0, 0, 0}, {2, 0, 0}, -1);
    REQUIRE(path.size() == 3);
    CHECK(path[0] == RouteDecision{Port::East, Vn::vn0});
    CHECK(path[1] == RouteDecision{Port::East, Vn::vn0});
    CHECK(path[2] == RouteDecision{Port::Local, Vn::vn0});
  }

  SUBCASE("ascent through a co-located elevator") {
    const auto path = walk(t, {0, 0, 0}, {0, 0, 2}, 0);
    REQUIRE(path.size() == 3);
    CHECK(path[0] == RouteDecision{Port::Up, Vn::vn0});
    CHECK(path[1] == RouteDecision{Port::Up, Vn::vn0});
    CHECK(path[2] == RouteDecision{Port::Local, Vn::vn0});
  }
}

TEST_CASE("virtual network discipline") {
  const Topology t({4, 4, 4}, {{1, 1}});

  // ascending: VN0 throughout
  for (const auto& d : walk(t, {0, 0, 0}, {3, 2, 3}, 0)) CHECK(d.vn == Vn::vn0);

  // descending: VN0 until the first Down hop, VN1 from there on
  const auto down = walk(t, {0, 0, 3}, {3, 2, 0}, 0);
  bool seen_down = false;
  for (const auto& d : down) {
    if (d.port == Port::Down) seen_down = true;
    CHECK(d.vn == (seen_down ? Vn::vn1 : Vn::vn0));
  }
  CHECK(seen_down);
}

TEST_CASE("XY ordering and strict progress on random pairs") {
  Rng rng(4);
  const Topology t({5, 4, 3}, {{0, 0}, {3, 2}, {4, 3}});
  for (int trial = 0; trial < 300; ++trial) {
    const Coord src{static_cast<int>(rng.next_below(5)), static_cast<int>(rng.next_below(4)),
                    static_cast<int>(rng.next_below(3))};
    const Coord dst{static_cast<int>(rng.next_below(5)), static_cast<int>(rng.next_below(4)),
                    static_cast<int>(rng.next_below(3))};
    if (src == dst) continue;
    const ElevatorId e =
        src.z == dst.z ? -1 : static_cast<ElevatorId>(rng.next_below(3));
    const auto path = walk(t, src, dst, e);

    // path length is exactly the piecewise distance: strict progress per hop
    const int want = src.z == dst.z ? manhattan_xy(src, dst)
                                    : elevator_path_distance(t, src, dst, e);
    CHECK(static_cast<int>(path.size()) == want + 1);  // + Local

    // X before Y inside each intra-layer segment
    bool y_seen = false;
    for (const auto& d : path) {
      if (d.port == Port::Up || d.port == Port::Down || d.port == Port::Local) {
        y_seen = false;  // new segment
        continue;
      }
      if (d.port == Port::North || d.port == Port::South) y_seen = true;
      if (d.port == Port::East || d.port == Port::West) CHECK_FALSE(y_seen);
    }
  }
}

TEST_CASE("inconsistent state is rejected") {
  const Topology t({4, 4, 2}, {{1, 1}});
  PacketRouteState state = initial_route_state({0, 0, 0}, {2, 2, 1}, 0, t);
  state.phase = RoutePhase::vertical;  // but we are not on the column
  CHECK_THROWS_AS(route({0, 0, 0}, {2, 2, 1}, state, t), std::logic_error);

  PacketRouteState regression = initial_route_state({1, 1, 0}, {2, 2, 1}, 0, t);
  REQUIRE(regression.phase == RoutePhase::vertical);
  CHECK_THROWS_AS(advance_route_state(regression, {2, 1, 0}, {2, 2, 1}, t),
                  std::logic_error);
}

TEST_CASE("channel dependency graphs are acyclic") {
  SUBCASE("2x2x2 with one elevator, nearest assignment") {
    const Topology t({2, 2, 2}, {{0, 0}});
    const auto report = check_deadlock_freedom(t, nearest_assignment(t));
    CHECK(report.acyclic);
    CHECK(report.channels > 0);
  }

  SUBCASE("all small instances with full assignments") {
    for (const int x : {1, 2})
      for (const int y : {1, 2}) {
        // every non-empty subset of columns as the elevator set
        for (int mask = 1; mask < (1 << (x * y)); ++mask) {
          std::vector<std::pair<int, int>> cols;
          for (int c = 0; c < x * y; ++c)
            if (mask & (1 << c)) cols.emplace_back(c % x, c / x);
          const Topology t({x, y, 2}, cols);
          // the full assignment covers the paths of every possible assignment
          const auto report = check_deadlock_freedom(t, full_assignment(t));
          CHECK(report.acyclic);
        }
      }
  }

  SUBCASE("4x4x4 preset with the full assignment") {
    const Topology t = load_topology("p_s2");
    const auto report = check_deadlock_freedom(t, full_assignment(t));
    CHECK(report.acyclic);
  }
}

TEST_CASE("the cycle detector detects a planted cycle") {
  DependencyGraph g;
  const auto a = g.channel(0, Port::East, Vn::vn0);
  const auto b = g.channel(1, Port::South, Vn::vn0);
  const auto c = g.channel(2, Port::West, Vn::vn0);
  g.add_edge(a, b);
  g.add_edge(b, c);
  CHECK(g.find_cycle().empty());
  g.add_edge(c, a);
  const auto cycle = g.find_cycle();
  CHECK(cycle.size() == 3);
}
