#include <cmath>
#include <set>
#include <stdexcept>

#include "doctest.h"
#include "pcnoc/traffic.hpp"

using namespace pcnoc;

namespace {
const Topology kT8({2, 2, 2}, {{0, 0}});
const Topology kT64({4, 4, 4}, {{0, 0}});
}  // namespace

TEST_CASE("uniform injection covers every destination") {
  TrafficSpec spec;
  spec.kind = TrafficKind::uniform;
  spec.injection_rate = spec.mean_packet_length();  // inject every cycle
  TrafficSource source(spec, kT64, 7);
  std::set<NodeId> seen;
  for (uint64_t cycle = 0; cycle < 20000; ++cycle) {
    const auto p = source.next_packet(5, cycle);
    REQUIRE(p.has_value());
    CHECK(p->dst != 5);
    CHECK(p->length >= 10);
    CHECK(p->length <= 30);
    seen.insert(p->dst);
  }
  CHECK(seen.size() == 63);
}

TEST_CASE("shuffle is the bit-rotation permutation") {
  CHECK(shuffle_destination(0b000001, 64) == 0b000010);
  CHECK(shuffle_destination(0b100000, 64) == 0b000001);
  CHECK_FALSE(shuffle_destination(0, 64).has_value());    // self-map
  CHECK_FALSE(shuffle_destination(63, 64).has_value());   // self-map
  TrafficSpec spec;
  spec.kind = TrafficKind::shuffle;
  spec.injection_rate = spec.mean_packet_length();
  TrafficSource source(spec, kT64, 3);
  const auto p = source.next_packet(1, 0);
  REQUIRE(p.has_value());
  CHECK(p->dst == 2);
  CHECK_FALSE(source.next_packet(0, 0).has_value());  // node 0 maps to itself
}

TEST_CASE("trace replay emits each record at its cycle") {
  TrafficSpec spec;
  spec.kind = TrafficKind::trace;
  TrafficSource source(spec, kT64, std::vector<TraceRecord>{{3, 40, 12, 100}});
  int emitted = 0;
  for (uint64_t cycle = 0; cycle < 300; ++cycle) {
    for (NodeId node = 0; node < kT64.node_count(); ++node) {
      const auto p = source.next_packet(node, cycle);
      if (!p) continue;
      ++emitted;
      CHECK(node == 3);
      CHECK(cycle == 100);
      CHECK(p->dst == 40);
      CHECK(p->length == 12);
    }
  }
  CHECK(emitted == 1);
  CHECK(source.exhausted());
}

TEST_CASE("injection sequence is deterministic for a seed") {
  TrafficSpec spec;
  spec.injection_rate = 0.05;
  TrafficSource a(spec, kT8, 42);
  TrafficSource b(spec, kT8, 42);
  for (uint64_t cycle = 0; cycle < 5000; ++cycle) {
    for (NodeId node = 0; node < kT8.node_count(); ++node) {
      const auto pa = a.next_packet(node, cycle);
      const auto pb = b.next_packet(node, cycle);
      REQUIRE(pa.has_value() == pb.has_value());
      if (pa) {
        CHECK(pa->dst == pb->dst);
        CHECK(pa->length == pb->length);
      }
    }
  }
}

TEST_CASE("aggregate injected flits approach the configured rate") {
  TrafficSpec spec;
  spec.injection_rate = 0.01;
  const Topology t16({4, 2, 2}, {{0, 0}});
  TrafficSource source(spec, t16, 11);
  const uint64_t cycles = 1000000;
  uint64_t flits = 0;
  for (uint64_t cycle = 0; cycle < cycles; ++cycle)
    for (NodeId node = 0; node < t16.node_count(); ++node)
      if (const auto p = source.next_packet(node, cycle)) flits += p->length;
  const double measured =
      static_cast<double>(flits) / (static_cast<double>(cycles) * t16.node_count());
  CHECK(std::abs(measured - spec.injection_rate) / spec.injection_rate < 0.02);
}

TEST_CASE("frequency matrices") {
  TrafficSpec spec;

  SUBCASE("uniform: ones off the diagonal, symmetric") {
    spec.kind = TrafficKind::uniform;
    const TrafficMatrix m = frequency_matrix(spec, kT8);
    int nonzero = 0;
    for (NodeId i = 0; i < 8; ++i)
      for (NodeId j = 0; j < 8; ++j) {
        if (i == j) {
          CHECK(m.at(i, j) == 0.0);
        } else {
          CHECK(m.at(i, j) == 1.0);
          ++nonzero;
        }
        CHECK(m.at(i, j) == m.at(j, i));
      }
    CHECK(nonzero == 56);
  }

  SUBCASE("shuffle: permutation support without self-maps") {
    spec.kind = TrafficKind::shuffle;
    const TrafficMatrix m = frequency_matrix(spec, kT8);
    int nonzero = 0;
    for (NodeId i = 0; i < 8; ++i)
      for (NodeId j = 0; j < 8; ++j)
        if (m.at(i, j) != 0.0) {
          CHECK(m.at(i, j) == 1.0);
          CHECK(j == shuffle_destination(i, 8));
          ++nonzero;
        }
    // ids 0 and 7 are fixed points of the 3-bit rotation and are skipped
    CHECK(nonzero == 6);
  }

  SUBCASE("trace: empirical counts with matching row sums") {
    const std::string csv = "src,dst,length,cycle\n0,5,10,0\n0,5,12,4\n1,6,11,9\n";
    const auto records = parse_trace_csv(csv);
    REQUIRE(records.size() == 3);
    TrafficMatrix m;
    m.n = kT8.node_count();
    m.rates.assign(64, 0.0);
    for (const auto& r : records) m.at(r.src, r.dst) += 1.0;
    CHECK(m.at(0, 5) == 2.0);
    CHECK(m.at(1, 6) == 1.0);
    double total = 0.0;
    for (const double v : m.rates) total += v;
    CHECK(total == 3.0);
  }
}

TEST_CASE("trace csv validation") {
  CHECK_THROWS_AS(parse_trace_csv("src,dst\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_trace_csv("src,dst,length,cycle\n1,1,10,0\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_trace_csv("src,dst,length,cycle\n0,1,10,5\n1,2,10,3\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(load_trace("/nonexistent/trace.csv"), std::invalid_argument);
}

TEST_CASE("matrix invariants") {
  TrafficMatrix m;
  m.n = 2;
  m.rates = {0.0, 1.0, 1.0, 0.5};
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);  // nonzero diagonal
  m.rates = {0.0, -1.0, 1.0, 0.0};
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);  // negative

  // no inter-layer flow on a 1x2x2 where the only pairs are intra-layer
  const Topology t({2, 1, 2}, {{0, 0}});
  TrafficMatrix intra;
  intra.n = 4;
  intra.rates.assign(16, 0.0);
  intra.at(0, 1) = 1.0;  // same layer
  CHECK_THROWS_AS(intra.require_interlayer_flow(t), std::invalid_argument);
  intra.at(0, 2) = 1.0;  // crosses layers
  CHECK_NOTHROW(intra.require_interlayer_flow(t));
}
