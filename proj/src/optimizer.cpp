#include "pcnoc/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "json.hpp"

namespace pcnoc {

void AmosaConfig::validate(const Topology& topo) const {
  if (!(0.0 < t_final && t_final < t_initial))
    throw std::invalid_argument("amosa: need 0 < t_final < t_initial");
  if (!(0.0 < cooling_ratio && cooling_ratio < 1.0))
    throw std::invalid_argument("amosa: cooling_ratio must be in (0,1)");
  if (iterations_per_temp < 1) throw std::invalid_argument("amosa: iterations_per_temp < 1");
  if (hard_limit < 2 || soft_limit < hard_limit)
    throw std::invalid_argument("amosa: need soft_limit >= hard_limit >= 2");
  const int max = effective_subset_max(topo);
  if (subset_min < 1 || subset_min > max)
    throw std::invalid_argument("amosa: bad subset size range");
}

int AmosaConfig::effective_subset_max(const Topology& topo) const {
  const int e = topo.elevator_count();
  return subset_max <= 0 ? e : std::min(subset_max, e);
}

bool dominates(const ObjectiveVector& a, const ObjectiveVector& b) {
  return a.variance <= b.variance && a.avg_distance <= b.avg_distance &&
         (a.variance < b.variance || a.avg_distance < b.avg_distance);
}

namespace {

bool weakly_dominates(const ObjectiveVector& a, const ObjectiveVector& b) {
  return a.variance <= b.variance && a.avg_distance <= b.avg_distance;
}

struct Ranges {
  double variance = 1.0;
  double avg_distance = 1.0;
};

Ranges objective_ranges(const std::vector<ArchiveSolution>& archive,
                        const ObjectiveVector& extra_a, const ObjectiveVector& extra_b) {
  double vmin = std::min(extra_a.variance, extra_b.variance);
  double vmax = std::max(extra_a.variance, extra_b.variance);
  double dmin = std::min(extra_a.avg_distance, extra_b.avg_distance);
  double dmax = std::max(extra_a.avg_distance, extra_b.avg_distance);
  for (const auto& s : archive) {
    vmin = std::min(vmin, s.objectives.variance);
    vmax = std::max(vmax, s.objectives.variance);
    dmin = std::min(dmin, s.objectives.avg_distance);
    dmax = std::max(dmax, s.objectives.avg_distance);
  }
  return {std::max(vmax - vmin, 1e-12), std::max(dmax - dmin, 1e-12)};
}

// Amount of domination: product of the normalized objective gaps where the
// two points differ.
double domination_amount(const ObjectiveVector& a, const ObjectiveVector& b,
                         const Ranges& r) {
  double amount = 1.0;
  bool any = false;
  if (a.variance != b.variance) {
    amount *= std::abs(a.variance - b.variance) / r.variance;
    any = true;
  }
  if (a.avg_distance != b.avg_distance) {
    amount *= std::abs(a.avg_distance - b.avg_distance) / r.avg_distance;
    any = true;
  }
  return any ? amount : 0.0;
}

size_t index_min_variance(std::span<const ArchiveSolution> archive) {
  size_t best = 0;
  for (size_t i = 1; i < archive.size(); ++i) {
    const auto& a = archive[i].objectives;
    const auto& b = archive[best].objectives;
    if (a.variance < b.variance ||
        (a.variance == b.variance && a.avg_distance < b.avg_distance))
      best = i;
  }
  return best;
}

size_t index_min_distance(std::span<const ArchiveSolution> archive) {
  size_t best = 0;
  for (size_t i = 1; i < archive.size(); ++i) {
    const auto& a = archive[i].objectives;
    const auto& b = archive[best].objectives;
    if (a.avg_distance < b.avg_distance ||
        (a.avg_distance == b.avg_distance && a.variance < b.variance))
      best = i;
  }
  return best;
}

// Greedy farthest-point thinning in normalized objective space. The two
// extreme members are always kept, so clustering can never lose the
// best-variance or best-distance solution.
void cluster_archive(std::vector<ArchiveSolution>& archive, int keep) {
  if (static_cast<int>(archive.size()) <= keep) return;
  const Ranges r =
      objective_ranges(archive, archive[0].objectives, archive[0].objectives);
  auto normalized = [&](const ObjectiveVector& o) {
    return std::make_pair(o.variance / r.variance, o.avg_distance / r.avg_distance);
  };

  std::vector<size_t> selected;
  std::vector<char> in(archive.size(), 0);
  auto take = [&](size_t i) {
    if (!in[i]) {
      in[i] = 1;
      selected.push_back(i);
    }
  };
  take(index_min_variance(archive));
  take(index_min_distance(archive));

  while (static_cast<int>(selected.size()) < keep) {
    double best_gap = -1.0;
    size_t best = 0;
    for (size_t i = 0; i < archive.size(); ++i) {
      if (in[i]) continue;
      const auto [vi, di] = normalized(archive[i].objectives);
      double nearest = std::numeric_limits<double>::max();
      for (const size_t s : selected) {
        const auto [vs, ds] = normalized(archive[s].objectives);
        nearest = std::min(nearest, std::hypot(vi - vs, di - ds));
      }
      if (nearest > best_gap) {
        best_gap = nearest;
        best = i;
      }
    }
    take(best);
  }

  std::sort(selected.begin(), selected.end());
  std::vector<ArchiveSolution> kept;
  kept.reserve(selected.size());
  for (const size_t i : selected) kept.push_back(std::move(archive[i]));
  archive = std::move(kept);
}

// Insert while keeping the archive mutually non-dominated. Points weakly
// dominated by a member (including duplicates) are not inserted.
bool archive_insert(std::vector<ArchiveSolution>& archive, ArchiveSolution sol,
                    const AmosaConfig& config) {
  for (const auto& m : archive)
    if (weakly_dominates(m.objectives, sol.objectives)) return false;
  std::erase_if(archive, [&](const ArchiveSolution& m) {
    return dominates(sol.objectives, m.objectives);
  });
  archive.push_back(std::move(sol));
  if (static_cast<int>(archive.size()) > config.soft_limit)
    cluster_archive(archive, config.hard_limit);
  return true;
}

}  // namespace

ElevatorAssignment perturb(const ElevatorAssignment& a, const Topology& topo,
                           const AmosaConfig& config, Rng& rng) {
  const int e_count = topo.elevator_count();
  const int max_size = config.effective_subset_max(topo);
  const int min_size = config.subset_min;

  ElevatorAssignment result = a;
  enum Move { add = 0, remove = 1, swap = 2 };

  auto feasible = [&](const std::vector<ElevatorId>& subset, Move m) {
    const int size = static_cast<int>(subset.size());
    switch (m) {
      case add: return size < max_size && size < e_count;
      case remove: return size > min_size;
      case swap: return size < e_count;
    }
    return false;
  };

  auto apply = [&](std::vector<ElevatorId>& subset, Move m) {
    auto pick_non_member = [&] {
      std::vector<ElevatorId> out;
      for (ElevatorId e = 0; e < e_count; ++e)
        if (!std::binary_search(subset.begin(), subset.end(), e)) out.push_back(e);
      return out[rng.next_below(out.size())];
    };
    switch (m) {
      case add: {
        const ElevatorId e = pick_non_member();
        subset.insert(std::upper_bound(subset.begin(), subset.end(), e), e);
        break;
      }
      case remove:
        subset.erase(subset.begin() + rng.next_below(subset.size()));
        break;
      case swap: {
        const ElevatorId incoming = pick_non_member();
        subset.erase(subset.begin() + rng.next_below(subset.size()));
        subset.insert(std::upper_bound(subset.begin(), subset.end(), incoming), incoming);
        break;
      }
    }
  };

  for (int attempt = 0; attempt < 64; ++attempt) {
    const NodeId i = static_cast<NodeId>(rng.next_below(result.subsets.size()));
    const Move m = static_cast<Move>(rng.next_below(3));
    if (!feasible(result.subsets[i], m)) continue;
    apply(result.subsets[i], m);
    return result;
  }
  // Rare: sampling kept hitting infeasible pairs. Scan for any feasible move;
  // a fully constrained instance (E == 1) stays unchanged.
  for (NodeId i = 0; i < static_cast<NodeId>(result.subsets.size()); ++i)
    for (const Move m : {add, remove, swap})
      if (feasible(result.subsets[i], m)) {
        apply(result.subsets[i], m);
        return result;
      }
  return result;
}

std::vector<ArchiveSolution> amosa_optimize(const Topology& topo,
                                            const TrafficMatrix& traffic,
                                            const AmosaConfig& config) {
  config.validate(topo);
  traffic.validate();
  traffic.require_interlayer_flow(topo);
  const ObjectiveEvaluator eval(topo, traffic);
  Rng rng = Rng::stream(config.seed, rng_domain::optimizer, 0);

  // Start from the Elevator-First baseline; when the configured minimum
  // subset size asks for redundancy, pad each router with its next-nearest
  // elevators so the whole chain stays inside the feasible region.
  ElevatorAssignment current = nearest_assignment(topo);
  for (NodeId i = 0; i < topo.node_count(); ++i) {
    auto& subset = current.subsets[i];
    while (static_cast<int>(subset.size()) < config.subset_min) {
      const Coord c = topo.coord_of(i);
      ElevatorId best = -1;
      int best_dist = 0;
      for (ElevatorId e = 0; e < topo.elevator_count(); ++e) {
        if (std::binary_search(subset.begin(), subset.end(), e)) continue;
        const auto [ex, ey] = topo.elevator_column(e);
        const int d = manhattan_xy(c, {ex, ey, c.z});
        if (best < 0 || d < best_dist) {
          best = e;
          best_dist = d;
        }
      }
      subset.insert(std::upper_bound(subset.begin(), subset.end(), best), best);
    }
  }
  ObjectiveVector f_current = eval.evaluate(current);
  std::vector<ArchiveSolution> archive;
  archive.push_back({current, f_current});

  for (double temp = config.t_initial; temp > config.t_final;
       temp *= config.cooling_ratio) {
    for (int it = 0; it < config.iterations_per_temp; ++it) {
      ElevatorAssignment candidate = perturb(current, topo, config, rng);
      const ObjectiveVector f_new = eval.evaluate(candidate);

      // Every visited point may enter the archive; dominance rules keep it
      // a Pareto set regardless of whether the chain moves.
      archive_insert(archive, {candidate, f_new}, config);

      double dom_sum = 0.0;
      int dom_count = 0;
      const Ranges ranges = objective_ranges(archive, f_current, f_new);
      if (dominates(f_current, f_new)) {
        dom_sum += domination_amount(f_current, f_new, ranges);
        ++dom_count;
      }
      for (const auto& m : archive)
        if (dominates(m.objectives, f_new)) {
          dom_sum += domination_amount(m.objectives, f_new, ranges);
          ++dom_count;
        }

      bool accept;
      if (dom_count == 0) {
        accept = true;  // non-dominated or improving move
      } else {
        const double avg = dom_sum / dom_count;
        const double p = 1.0 / (1.0 + std::exp(avg / temp));
        accept = rng.next_double() < p;
      }
      if (accept) {
        current = std::move(candidate);
        f_current = f_new;
      }
    }
  }

  std::sort(archive.begin(), archive.end(), [](const auto& a, const auto& b) {
    if (a.objectives.variance != b.objectives.variance)
      return a.objectives.variance < b.objectives.variance;
    return a.objectives.avg_distance < b.objectives.avg_distance;
  });
  return archive;
}

PickStrategy pick_strategy_from_string(const std::string& name) {
  if (name == "min_variance") return PickStrategy::min_variance;
  if (name == "min_distance") return PickStrategy::min_distance;
  if (name == "knee") return PickStrategy::knee;
  throw std::invalid_argument("unknown pick strategy: " + name);
}

const ArchiveSolution& pick_solution(std::span<const ArchiveSolution> archive,
                                     PickStrategy strategy) {
  if (archive.empty()) throw std::invalid_argument("pick_solution: empty archive");
  switch (strategy) {
    case PickStrategy::min_variance:
      return archive[index_min_variance(archive)];
    case PickStrategy::min_distance:
      return archive[index_min_distance(archive)];
    case PickStrategy::knee: {
      double vmax = archive[0].objectives.variance;
      double vmin = vmax;
      double dmax = archive[0].objectives.avg_distance;
      double dmin = dmax;
      for (const auto& s : archive) {
        vmax = std::max(vmax, s.objectives.variance);
        vmin = std::min(vmin, s.objectives.variance);
        dmax = std::max(dmax, s.objectives.avg_distance);
        dmin = std::min(dmin, s.objectives.avg_distance);
      }
      const double vr = std::max(vmax - vmin, 1e-12);
      const double dr = std::max(dmax - dmin, 1e-12);
      size_t best = 0;
      double best_dist = -1.0;
      for (size_t i = 0; i < archive.size(); ++i) {
        const double dv = (vmax - archive[i].objectives.variance) / vr;
        const double dd = (dmax - archive[i].objectives.avg_distance) / dr;
        const double dist = std::hypot(dv, dd);
        if (dist > best_dist) {
          best_dist = dist;
          best = i;
        }
      }
      return archive[best];
    }
  }
  throw std::logic_error("pick_solution: unknown strategy");
}

std::vector<std::pair<int, int>> optimize_placement(Dims dims, int elevator_count,
                                                    const TrafficMatrix* traffic) {
  const int columns = dims.x * dims.y;
  const int n = columns * dims.layers;
  if (dims.x < 1 || dims.y < 1 || dims.layers < 2)
    throw std::invalid_argument("placement: bad dims");
  if (elevator_count < 1 || elevator_count > columns)
    throw std::invalid_argument("placement: elevator count must be in [1, X*Y]");
  if (traffic && traffic->n != n)
    throw std::invalid_argument("placement: traffic matrix does not match dims");

  auto coord_of = [&](NodeId id) {
    const int plane = columns;
    return Coord{(id % plane) % dims.x, (id % plane) / dims.x, id / plane};
  };

  // Total weighted path length through each candidate column. With every
  // router using the full elevator set, the objective is the mean of these
  // totals over the chosen columns.
  std::vector<double> column_total(columns, 0.0);
#pragma omp parallel for schedule(static)
  for (int c = 0; c < columns; ++c) {
    const int cx = c % dims.x;
    const int cy = c / dims.x;
    double total = 0.0;
    for (NodeId i = 0; i < n; ++i) {
      const Coord a = coord_of(i);
      for (NodeId j = 0; j < n; ++j) {
        const Coord b = coord_of(j);
        if (a.z == b.z) continue;
        const double w = traffic ? traffic->at(i, j) : 1.0;
        if (w == 0.0) continue;
        total += w * (std::abs(a.x - cx) + std::abs(a.y - cy) + std::abs(a.z - b.z) +
                      std::abs(b.x - cx) + std::abs(b.y - cy));
      }
    }
    column_total[c] = total;
  }

  std::vector<char> chosen(columns, 0);
  std::vector<int> picked;
  double picked_sum = 0.0;
  // greedy build-up
  for (int k = 0; k < elevator_count; ++k) {
    int best = -1;
    double best_cost = 0.0;
    for (int c = 0; c < columns; ++c) {
      if (chosen[c]) continue;
      const double cost = (picked_sum + column_total[c]) / static_cast<double>(k + 1);
      if (best < 0 || cost < best_cost) {
        best = c;
        best_cost = cost;
      }
    }
    chosen[best] = 1;
    picked.push_back(best);
    picked_sum += column_total[best];
  }
  // local swap until no improvement
  for (bool improved = true; improved;) {
    improved = false;
    for (int& s : picked) {
      for (int c = 0; c < columns; ++c) {
        if (chosen[c]) continue;
        if (column_total[c] + 1e-12 < column_total[s]) {
          picked_sum += column_total[c] - column_total[s];
          chosen[s] = 0;
          chosen[c] = 1;
          s = c;
          improved = true;
        }
      }
    }
  }

  std::sort(picked.begin(), picked.end());
  std::vector<std::pair<int, int>> positions;
  positions.reserve(picked.size());
  for (const int c : picked) positions.emplace_back(c % dims.x, c / dims.x);
  return positions;
}

std::string archive_to_json_text(std::span<const ArchiveSolution> archive) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& s : archive) {
    nlohmann::json entry;
    entry["objectives"] = {{"variance", s.objectives.variance},
                           {"avg_distance", s.objectives.avg_distance}};
    entry["subsets"] = s.assignment.subsets;
    j.push_back(entry);
  }
  return j.dump(2);
}

std::vector<ArchiveSolution> archive_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("archive json: ") + e.what());
  }
  std::vector<ArchiveSolution> archive;
  for (const auto& entry : j) {
    ArchiveSolution s;
    s.objectives.variance = entry.at("objectives").at("variance").get<double>();
    s.objectives.avg_distance = entry.at("objectives").at("avg_distance").get<double>();
    for (const auto& subset : entry.at("subsets")) {
      std::vector<ElevatorId> ids;
      for (const auto& e : subset) ids.push_back(e.get<int>());
      s.assignment.subsets.push_back(std::move(ids));
    }
    archive.push_back(std::move(s));
  }
  return archive;
}

}  // namespace pcnoc
