// Timing comparison between the serial brute-force reference enumerators and
// the precomputed (OpenMP) objective kernels, plus the sweep fan-out. Run
// manually: build/bench/bench_kernels [repeats]

#include <chrono>
#include <cstdio>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "pcnoc/engine.hpp"
#include "pcnoc/objectives.hpp"
#include "pcnoc/optimizer.hpp"
#include "pcnoc/reference.hpp"

using namespace pcnoc;
using clock_type = std::chrono::steady_clock;

namespace {

double seconds_since(clock_type::time_point start) {
  return std::chrono::duration<double>(clock_type::now() - start).count();
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

int main(int argc, char** argv) {
  const int repeats = argc > 1 ? std::atoi(argv[1]) : 200;
  const Topology topo = load_topology("p_m");  // 8x8x4, the large configuration
  TrafficSpec uniform;
  uniform.kind = TrafficKind::uniform;
  const TrafficMatrix traffic = frequency_matrix(uniform, topo);

  Rng rng(7);
  std::vector<ElevatorAssignment> assignments;
  for (int i = 0; i < repeats; ++i) assignments.push_back(random_assignment(topo, rng));

#ifdef _OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#else
  std::printf("threads: 1 (built without OpenMP)\n");
#endif
  std::printf("network: %dx%dx%d, %d elevators, %d evaluations\n\n", topo.width(),
              topo.depth(), topo.layers(), topo.elevator_count(), repeats);

  // evaluator construction (the parallel precompute)
  auto start = clock_type::now();
  const ObjectiveEvaluator eval(topo, traffic);
  const double precompute_s = seconds_since(start);

  // fast path
  start = clock_type::now();
  double sink = 0.0;
  for (const auto& a : assignments) {
    const ObjectiveVector f = eval.evaluate(a);
    sink += f.variance + f.avg_distance;
  }
  const double fast_s = seconds_since(start);

  // serial reference
  start = clock_type::now();
  double ref_sink = 0.0;
  for (const auto& a : assignments) {
    const auto u = reference::elevator_utilization(a, traffic, topo);
    ref_sink += utilization_variance(u) + reference::average_distance(a, topo);
  }
  const double ref_s = seconds_since(start);

  std::printf("objective evaluation, %d assignments\n", repeats);
  std::printf("  precompute          %10.4f s (once)\n", precompute_s);
  std::printf("  fast kernels        %10.4f s  (%.1f us/eval)\n", fast_s,
              1e6 * fast_s / repeats);
  std::printf("  serial reference    %10.4f s  (%.1f us/eval)\n", ref_s,
              1e6 * ref_s / repeats);
  std::printf("  speedup             %10.1fx\n", ref_s / fast_s);
  if (std::abs(sink - ref_sink) / std::abs(ref_sink) > 1e-9) {
    std::printf("MISMATCH between fast and reference paths: %.17g vs %.17g\n", sink,
                ref_sink);
    return 1;
  }

  // sweep fan-out: same work, worker pool vs one thread
  SimConfig sim;
  sim.topology = load_topology("p_s1");
  sim.warmup_cycles = 500;
  sim.measure_cycles = 5000;
  const std::vector<double> rates{0.002, 0.004, 0.008, 0.016, 0.032, 0.064};

#ifdef _OPENMP
  const int max_threads = omp_get_max_threads();
  omp_set_num_threads(1);
#endif
  start = clock_type::now();
  latency_sweep(sim, rates);
  const double serial_sweep_s = seconds_since(start);
#ifdef _OPENMP
  omp_set_num_threads(max_threads);
#endif
  start = clock_type::now();
  latency_sweep(sim, rates);
  const double parallel_sweep_s = seconds_since(start);

  std::printf("\nlatency sweep, %zu rates x %llu cycles\n", rates.size(),
              static_cast<unsigned long long>(sim.warmup_cycles + sim.measure_cycles));
  std::printf("  one worker          %10.4f s\n", serial_sweep_s);
  std::printf("  worker pool         %10.4f s  (%.2fx)\n", parallel_sweep_s,
              serial_sweep_s / parallel_sweep_s);
  return 0;
}
