#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "pcnoc/objectives.hpp"
#include "pcnoc/reference.hpp"
#include "pcnoc/rng.hpp"

using namespace pcnoc;

namespace {

TrafficMatrix uniform_matrix(const Topology& t) {
  TrafficSpec spec;
  spec.kind = TrafficKind::uniform;
  return frequency_matrix(spec, t);
}

ElevatorAssignment random_assignment(const Topology& t, Rng& rng) {
  ElevatorAssignment a;
  a.subsets.resize(t.node_count());
  for (auto& subset : a.subsets) {
    for (ElevatorId e = 0; e < t.elevator_count(); ++e)
      if (rng.next_double() < 0.5) subset.push_back(e);
    if (subset.empty())
      subset.push_back(static_cast<ElevatorId>(rng.next_below(t.elevator_count())));
  }
  return a;
}

}  // namespace

TEST_CASE("utilization variance") {
  const std::vector<double> equal{4, 4, 4};
  CHECK(utilization_variance(equal) == 0.0);
  const std::vector<double> two{0, 2};
  CHECK(utilization_variance(two) == doctest::Approx(1.0).epsilon(1e-12));
  const std::vector<double> four{1, 2, 3, 6};
  CHECK(utilization_variance(four) == doctest::Approx(3.5).epsilon(1e-12));

  // permutation invariance and quadratic scaling
  const std::vector<double> p{6, 1, 3, 2};
  CHECK(utilization_variance(p) == doctest::Approx(3.5).epsilon(1e-12));
  std::vector<double> scaled;
  for (const double v : four) scaled.push_back(3.0 * v);
  CHECK(utilization_variance(scaled) == doctest::Approx(9.0 * 3.5).epsilon(1e-9));
}

TEST_CASE("elevator utilization on known instances") {
  const Topology t({2, 2, 2}, {{0, 0}, {1, 1}});
  const TrafficMatrix uniform = uniform_matrix(t);
  const ObjectiveEvaluator eval(t, uniform);

  SUBCASE("zero traffic annihilates") {
    TrafficMatrix zero;
    zero.n = t.node_count();
    zero.rates.assign(64, 0.0);
    const ObjectiveEvaluator zero_eval(t, zero);
    for (const double u : zero_eval.elevator_utilization(full_assignment(t)))
      CHECK(u == 0.0);
  }

  SUBCASE("single elevator carries every inter-layer pair") {
    const Topology one({2, 2, 2}, {{0, 0}});
    const ObjectiveEvaluator one_eval(one, uniform_matrix(one));
    const auto u = one_eval.elevator_utilization(full_assignment(one));
    REQUIRE(u.size() == 1);
    // N * N * (L-1) / L = 8 * 8 / 2
    CHECK(u[0] == doctest::Approx(32.0).epsilon(1e-12));
  }

  SUBCASE("two shared elevators split the 32 pairs evenly") {
    const auto u = eval.elevator_utilization(full_assignment(t));
    REQUIRE(u.size() == 2);
    CHECK(u[0] == doctest::Approx(16.0).epsilon(1e-12));
    CHECK(u[1] == doctest::Approx(16.0).epsilon(1e-12));
  }

  SUBCASE("conservation: total utilization equals total inter-layer flow") {
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
      const auto a = random_assignment(t, rng);
      const auto u = eval.elevator_utilization(a);
      double total = 0.0;
      for (const double v : u) total += v;
      CHECK(total == doctest::Approx(32.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("average distance on known instances") {
  SUBCASE("smallest network") {
    const Topology t({1, 1, 2}, {{0, 0}});
    CHECK(average_distance(full_assignment(t), t) == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("2x1x2 enumerates to 2.0") {
    const Topology t({2, 1, 2}, {{0, 0}});
    CHECK(average_distance(full_assignment(t), t) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(reference::average_distance(full_assignment(t), t) ==
          doctest::Approx(2.0).epsilon(1e-12));
  }

  SUBCASE("minimal-subset assignments attain the distance lower bound") {
    const Topology t({3, 3, 2}, {{0, 0}, {2, 2}});
    // lower bound: per-pair minimum over all elevators
    double bound = 0.0;
    for (NodeId i = 0; i < t.node_count(); ++i)
      for (NodeId j = 0; j < t.node_count(); ++j) {
        const Coord a = t.coord_of(i), b = t.coord_of(j);
        if (a.z == b.z) continue;
        int best = elevator_path_distance(t, a, b, 0);
        for (ElevatorId e = 1; e < t.elevator_count(); ++e)
          best = std::min(best, elevator_path_distance(t, a, b, e));
        bound += best;
      }
    bound /= t.node_count() * (t.node_count() / 2.0);
    Rng rng(8);
    for (int trial = 0; trial < 30; ++trial) {
      const double ad = average_distance(random_assignment(t, rng), t);
      CHECK(ad >= bound - 1e-9);
    }
  }
}

TEST_CASE("fast kernels match the brute-force reference exactly") {
  Rng rng(1234);
  const std::vector<Topology> topologies{
      Topology({2, 2, 2}, {{0, 0}, {1, 1}}),
      Topology({2, 2, 4}, {{0, 1}, {1, 0}, {1, 1}}),
      Topology({4, 2, 2}, {{0, 0}, {3, 1}}),
      Topology({1, 2, 4}, {{0, 0}}),
  };
  for (const auto& t : topologies) {
    // integer-valued uniform traffic: results must agree exactly
    const TrafficMatrix uniform = uniform_matrix(t);
    const ObjectiveEvaluator eval(t, uniform);
    for (int trial = 0; trial < 60; ++trial) {
      const auto a = random_assignment(t, rng);
      const auto fast_u = eval.elevator_utilization(a);
      const auto ref_u = reference::elevator_utilization(a, uniform, t);
      REQUIRE(fast_u.size() == ref_u.size());
      for (size_t e = 0; e < fast_u.size(); ++e)
        CHECK(fast_u[e] == doctest::Approx(ref_u[e]).epsilon(1e-12));
      CHECK(eval.average_distance(a) ==
            doctest::Approx(reference::average_distance(a, t)).epsilon(1e-12));
    }

    // real-valued random traffic: 1e-9 relative agreement
    TrafficMatrix noisy;
    noisy.n = t.node_count();
    noisy.rates.assign(static_cast<size_t>(noisy.n) * noisy.n, 0.0);
    for (NodeId i = 0; i < noisy.n; ++i)
      for (NodeId j = 0; j < noisy.n; ++j)
        if (i != j) noisy.at(i, j) = rng.next_double() * 3.0;
    const ObjectiveEvaluator noisy_eval(t, noisy);
    for (int trial = 0; trial < 20; ++trial) {
      const auto a = random_assignment(t, rng);
      const auto fast_u = noisy_eval.elevator_utilization(a);
      const auto ref_u = reference::elevator_utilization(a, noisy, t);
      for (size_t e = 0; e < fast_u.size(); ++e)
        CHECK(fast_u[e] == doctest::Approx(ref_u[e]).epsilon(1e-9));
    }
  }
}
