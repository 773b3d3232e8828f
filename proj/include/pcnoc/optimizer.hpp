#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pcnoc/assignment.hpp"
#include "pcnoc/objectives.hpp"
#include "pcnoc/rng.hpp"
#include "pcnoc/topology.hpp"
#include "pcnoc/traffic.hpp"

namespace pcnoc {

// Domination amounts are normalized to archive objective ranges, so the
// temperature scale is O(1): acceptance of dominated moves starts near 1/2
// and decays as T drops through the magnitude of the normalized gaps.
struct AmosaConfig {
  double t_initial = 1.0;
  double t_final = 1e-4;
  double cooling_ratio = 0.95;
  int iterations_per_temp = 200;
  int soft_limit = 60;  // archive size that triggers clustering
  int hard_limit = 20;  // archive size after clustering
  int subset_min = 1;
  int subset_max = 0;  // 0 means "up to E"
  uint64_t seed = 1;

  void validate(const Topology& topo) const;
  int effective_subset_max(const Topology& topo) const;
};

struct ArchiveSolution {
  ElevatorAssignment assignment;
  ObjectiveVector objectives;
};

// a is at least as good in both objectives and strictly better in one.
bool dominates(const ObjectiveVector& a, const ObjectiveVector& b);

// One neighborhood move: on a uniformly chosen router, add, remove, or swap
// one elevator (equiprobable among the feasible kinds after resampling).
// Always returns a valid assignment; identity when no move is feasible
// (e.g. a single-elevator network).
ElevatorAssignment perturb(const ElevatorAssignment& a, const Topology& topo,
                           const AmosaConfig& config, Rng& rng);

// Archived multi-objective simulated annealing over per-router elevator
// subsets, minimizing (utilization variance, average distance). The chain
// starts from the nearest-elevator baseline and the archive is seeded with
// it, so the result always contains solutions at least as good as the
// baseline in each objective. Deterministic for a fixed seed. Returns the
// archive sorted by variance ascending.
std::vector<ArchiveSolution> amosa_optimize(const Topology& topo,
                                            const TrafficMatrix& traffic,
                                            const AmosaConfig& config);

enum class PickStrategy { min_variance, min_distance, knee };
PickStrategy pick_strategy_from_string(const std::string& name);

// min_variance / min_distance take the archive ends; knee maximizes the
// normalized distance from the (max variance, max distance) reference point.
const ArchiveSolution& pick_solution(std::span<const ArchiveSolution> archive,
                                     PickStrategy strategy);

// Greedy + local-swap placement of `elevator_count` columns minimizing the
// average inter-layer distance with every router allowed to use every
// elevator. Pass traffic to weight pairs by f_ij; null weights uniformly.
std::vector<std::pair<int, int>> optimize_placement(Dims dims, int elevator_count,
                                                    const TrafficMatrix* traffic = nullptr);

// Archive JSON: [{"objectives":{"variance":..,"avg_distance":..},"subsets":[[..],..]},..]
std::string archive_to_json_text(std::span<const ArchiveSolution> archive);
std::vector<ArchiveSolution> archive_from_json_text(const std::string& text);

}  // namespace pcnoc
