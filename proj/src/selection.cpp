#include "pcnoc/selection.hpp"

#include <algorithm>
#include <stdexcept>

namespace pcnoc {

double selection_latency(const SelectionCostSample& sample) {
  if (sample.packet_length <= 0)
    throw std::logic_error("selection: packet_length must be positive");
  if (sample.t_tail < sample.t_head + static_cast<uint64_t>(sample.packet_length))
    throw std::logic_error("selection: tail left before the packet could drain");
  const double lp = static_cast<double>(sample.packet_length);
  return (static_cast<double>(sample.t_tail - sample.t_head) - lp) / lp;
}

double smoothed_cost(double old_cost, double sample, double a) {
  return a * sample + (1.0 - a) * old_cost;
}

double relative_cost(std::span<const double> costs, size_t k) {
  double total = 0.0;
  for (const double c : costs) total += c;
  if (total <= 0.0) return 1.0 / static_cast<double>(costs.size());
  return costs[k] / total;
}

double skip_probability(double c_rel, size_t subset_size, double xi) {
  const double n = static_cast<double>(subset_size);
  const double share = 1.0 / n;
  if (c_rel >= 2.0 * share) return 1.0 - xi;
  if (c_rel >= share) return n * (c_rel - share) * (1.0 - xi);
  return 0.0;
}

void AdeleParams::validate() const {
  if (a < 0.0 || a > 1.0) throw std::invalid_argument("adele: a must be in [0,1]");
  if (xi < 0.0 || xi >= 1.0) throw std::invalid_argument("adele: xi must be in [0,1)");
  if (minimal_threshold < 0.0)
    throw std::invalid_argument("adele: threshold must be non-negative");
}

SelectorState::SelectorState(std::vector<ElevatorId> subset, AdeleParams params, Rng rng)
    : subset_(std::move(subset)),
      costs_(subset_.size(), 0.0),
      params_(params),
      rng_(rng) {
  if (subset_.empty()) throw std::invalid_argument("selector: empty subset");
  params_.validate();
}

size_t SelectorState::index_of(ElevatorId k) const {
  const auto it = std::find(subset_.begin(), subset_.end(), k);
  if (it == subset_.end())
    throw std::invalid_argument("selector: elevator not in this router's subset");
  return static_cast<size_t>(it - subset_.begin());
}

void SelectorState::update_cost(ElevatorId k, double latency) {
  auto& c = costs_[index_of(k)];
  c = smoothed_cost(c, latency, params_.a);
}

double SelectorState::relative_cost_of(ElevatorId k) const {
  return relative_cost(costs_, index_of(k));
}

double SelectorState::skip_probability_of(ElevatorId k) const {
  return skip_probability(relative_cost_of(k), subset_.size(), params_.xi);
}

ElevatorId SelectorState::select_rr() {
  const ElevatorId e = subset_[rr_pointer_];
  rr_pointer_ = (rr_pointer_ + 1) % subset_.size();
  return e;
}

ElevatorId SelectorState::select_adele(Coord src, Coord dst, const Topology& topo) {
  const double max_cost = *std::max_element(costs_.begin(), costs_.end());
  if (max_cost < params_.minimal_threshold)
    return minimal_path_elevator(topo, src, dst, subset_);

  const size_t n = subset_.size();
  const size_t max_draws = 10 * n;
  for (size_t draw = 0; draw < max_draws; ++draw) {
    const size_t idx = rr_pointer_;
    const double p_skip = skip_probability(relative_cost(costs_, idx), n, params_.xi);
    rr_pointer_ = (rr_pointer_ + 1) % n;
    if (p_skip <= 0.0) return subset_[idx];
    if (rng_.next_double() >= p_skip) return subset_[idx];
  }
  return select_rr();  // every candidate kept skipping; fall back to plain RR
}

ElevatorId select_nearest(const Topology& topo, Coord src) {
  return nearest_elevator(topo, src);
}

ElevatorId minimal_path_elevator(const Topology& topo, Coord src, Coord dst,
                                 std::span<const ElevatorId> subset) {
  ElevatorId best = subset[0];
  int best_dist = elevator_path_distance(topo, src, dst, best);
  for (size_t i = 1; i < subset.size(); ++i) {
    const int d = elevator_path_distance(topo, src, dst, subset[i]);
    if (d < best_dist || (d == best_dist && subset[i] < best)) {
      best = subset[i];
      best_dist = d;
    }
  }
  return best;
}

ElevatorId select_cda(const Topology& topo, Coord src, Coord dst,
                      std::span<const int> router_occupancy) {
  (void)dst;
  ElevatorId best = 0;
  long best_load = -1;
  int best_dist = -1;
  for (ElevatorId e = 0; e < topo.elevator_count(); ++e) {
    const auto [ex, ey] = topo.elevator_column(e);
    // occupancy along the dimension-order path, src excluded, column included
    long load = 0;
    Coord c = src;
    while (c.x != ex || c.y != ey) {
      if (c.x != ex)
        c.x += c.x < ex ? 1 : -1;
      else
        c.y += c.y < ey ? 1 : -1;
      load += router_occupancy[topo.id_of(c)];
    }
    const int dist = manhattan_xy(src, Coord{ex, ey, src.z});
    if (best_load < 0 || load < best_load ||
        (load == best_load && dist < best_dist)) {
      best = e;
      best_load = load;
      best_dist = dist;
    }
  }
  return best;
}

}  // namespace pcnoc
