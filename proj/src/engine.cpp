#include "pcnoc/engine.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pcnoc {

namespace {

constexpr int kBufferDepth = 4;
constexpr int kSlotCount = kPortCount * kVnCount;  // candidate slots per router
constexpr uint64_t kCheckpointInterval = 10000;
constexpr uint64_t kRecountInterval = 1024;

enum class FlitKind : uint8_t { head, body, tail };

struct Flit {
  int packet = -1;
  FlitKind kind = FlitKind::head;
};

struct PacketInfo {
  NodeId src = 0;
  NodeId dst = 0;
  int length = 0;
  ElevatorId elevator = -1;
  uint64_t inject_cycle = 0;
  bool in_window = false;
  bool elevator_counted = false;
  PacketRouteState route_state;
  Coord head_pos;        // router currently holding the head (pre-ejection)
  bool head_ejected = false;
  int ejected_flits = 0;
  int head_hops = 0;
  uint64_t t_head_leave = 0;  // head departure from the source router
};

// Per-(input port, vn) virtual channel: FIFO plus the route its streaming
// packet follows between head and tail.
struct VcState {
  std::deque<Flit> fifo;
  int active_packet = -1;
  Port out_port = Port::Local;
  Vn out_vn = Vn::vn0;
};

struct OutState {
  int owner = -1;
  int credits = kBufferDepth;
};

struct Move {
  NodeId router;
  int in_slot;  // in_port * kVnCount + vn
  Port out_port;
  Vn out_vn;
};

Port opposite(Port p) {
  switch (p) {
    case Port::North: return Port::South;
    case Port::South: return Port::North;
    case Port::East: return Port::West;
    case Port::West: return Port::East;
    case Port::Up: return Port::Down;
    case Port::Down: return Port::Up;
    case Port::Local: return Port::Local;
  }
  return Port::Local;
}

class Simulator {
 public:
  explicit Simulator(const SimConfig& config)
      : cfg_(config),
        topo_(config.topology),
        traffic_(make_traffic(config)),
        n_(topo_.node_count()) {
    vcs_.resize(static_cast<size_t>(n_) * kSlotCount);
    outs_.resize(static_cast<size_t>(n_) * kSlotCount);
    arb_.assign(static_cast<size_t>(n_) * kPortCount, 0);
    occupancy_.assign(n_, 0);
    metrics_.elevator_traversals.assign(topo_.elevator_count(), 0);
    metrics_.router_forwarded_flits.assign(n_, 0);

    if (cfg_.policy == Policy::rr || cfg_.policy == Policy::adele) {
      selectors_.reserve(n_);
      for (NodeId i = 0; i < n_; ++i)
        selectors_.emplace_back(cfg_.assignment->subset(i), cfg_.adele,
                                Rng::stream(cfg_.seed, rng_domain::selector,
                                            static_cast<uint64_t>(i)));
    }
  }

  SimMetrics run() {
    std::ofstream cycle_csv;
    if (!cfg_.cycle_csv_path.empty()) {
      cycle_csv.open(cfg_.cycle_csv_path);
      if (!cycle_csv)
        throw std::invalid_argument("sim: cannot write " + cfg_.cycle_csv_path);
      cycle_csv << "cycle,injected_packets,delivered_packets\n";
    }
    const uint64_t total = cfg_.warmup_cycles + cfg_.measure_cycles;
    for (uint64_t cycle = 0; cycle < total; ++cycle) {
      inject(cycle);
      step(cycle);
      if ((cycle + 1) % kCheckpointInterval == 0)
        metrics_.delivered_checkpoints.push_back(delivered_total_);
      if ((cycle + 1) % kRecountInterval == 0) verify_conservation();
      if (cycle_csv.is_open())
        cycle_csv << cycle << ',' << packets_.size() << ',' << delivered_total_ << '\n';
    }
    verify_conservation();
    finalize();
    return metrics_;
  }

 private:
  static TrafficSource make_traffic(const SimConfig& config) {
    if (config.trace_records)
      return TrafficSource(config.traffic, config.topology, *config.trace_records);
    return TrafficSource(config.traffic, config.topology, config.seed);
  }

  size_t slot(NodeId r, Port p, Vn v) const {
    return (static_cast<size_t>(r) * kPortCount + static_cast<int>(p)) * kVnCount +
           static_cast<int>(v);
  }

  ElevatorId choose_elevator(NodeId node, Coord src, Coord dst) {
    switch (cfg_.policy) {
      case Policy::nearest: return select_nearest(topo_, src);
      case Policy::rr: return selectors_[node].select_rr();
      case Policy::adele: return selectors_[node].select_adele(src, dst, topo_);
      case Policy::cda: return select_cda(topo_, src, dst, occupancy_);
    }
    throw std::logic_error("engine: unknown policy");
  }

  void inject(uint64_t cycle) {
    const bool in_window =
        cycle >= cfg_.warmup_cycles && cycle < cfg_.warmup_cycles + cfg_.measure_cycles;
    for (NodeId node = 0; node < n_; ++node) {
      const auto pkt = traffic_.next_packet(node, cycle);
      if (!pkt) continue;
      const Coord src = topo_.coord_of(node);
      const Coord dst = topo_.coord_of(pkt->dst);

      PacketInfo info;
      info.src = node;
      info.dst = pkt->dst;
      info.length = pkt->length;
      info.inject_cycle = cycle;
      info.in_window = in_window;
      info.head_pos = src;
      if (src.z != dst.z) info.elevator = choose_elevator(node, src, dst);
      info.route_state = initial_route_state(src, dst, info.elevator, topo_);

      const int id = static_cast<int>(packets_.size());
      packets_.push_back(info);
      auto& queue = vcs_[slot(node, Port::Local, Vn::vn0)].fifo;
      queue.push_back({id, FlitKind::head});
      for (int k = 0; k < pkt->length - 2; ++k) queue.push_back({id, FlitKind::body});
      queue.push_back({id, FlitKind::tail});
      flits_entered_ += pkt->length;
      if (in_window) {
        ++metrics_.injected;
        metrics_.injected_flits += pkt->length;
      }
    }
  }

  void step(uint64_t cycle) {
    decide(cycle);
    for (const Move& m : moves_) commit(m, cycle);
    moves_.clear();
  }

  void decide(uint64_t cycle) {
    (void)cycle;
    struct Candidate {
      int in_slot;
      Vn out_vn;
    };
    Candidate cands[kPortCount][kSlotCount];
    int cand_count[kPortCount];

    for (NodeId r = 0; r < n_; ++r) {
      for (auto& c : cand_count) c = 0;
      const Coord here = topo_.coord_of(r);
      bool any = false;
      const size_t base = static_cast<size_t>(r) * kSlotCount;
      for (int in_slot = 0; in_slot < kSlotCount; ++in_slot) {
        VcState& vc = vcs_[base + in_slot];
        if (vc.fifo.empty()) continue;
        const Flit f = vc.fifo.front();
        Port out_port;
        Vn out_vn;
        if (vc.active_packet == f.packet) {
          out_port = vc.out_port;
          out_vn = vc.out_vn;
        } else {
          if (f.kind != FlitKind::head)
            throw std::logic_error("engine: body flit without an active wormhole");
          const PacketInfo& info = packets_[f.packet];
          const RouteDecision d =
              route(here, topo_.coord_of(info.dst), info.route_state, topo_);
          out_port = d.port;
          out_vn = d.vn;
        }
        const OutState& out = outs_[slot(r, out_port, out_vn)];
        if (f.kind == FlitKind::head && vc.active_packet != f.packet) {
          if (out.owner != -1) continue;  // output still owned by another wormhole
        } else if (out.owner != f.packet) {
          throw std::logic_error("engine: wormhole ownership lost mid-packet");
        }
        if (out_port != Port::Local && out.credits <= 0) continue;
        auto& list = cands[static_cast<int>(out_port)];
        list[cand_count[static_cast<int>(out_port)]++] = {in_slot, out_vn};
        any = true;
      }
      if (!any) continue;

      for (int p = 0; p < kPortCount; ++p) {
        const int count = cand_count[p];
        if (count == 0) continue;
        // rotating priority over input slots
        int& pointer = arb_[static_cast<size_t>(r) * kPortCount + p];
        int best = 0;
        int best_rank = kSlotCount + 1;
        for (int c = 0; c < count; ++c) {
          const int rank = (cands[p][c].in_slot - pointer + kSlotCount) % kSlotCount;
          if (rank < best_rank) {
            best_rank = rank;
            best = c;
          }
        }
        pointer = (cands[p][best].in_slot + 1) % kSlotCount;
        moves_.push_back(
            {r, cands[p][best].in_slot, static_cast<Port>(p), cands[p][best].out_vn});
      }
    }
  }

  void commit(const Move& m, uint64_t cycle) {
    const bool window_cycle =
        cycle >= cfg_.warmup_cycles && cycle < cfg_.warmup_cycles + cfg_.measure_cycles;
    VcState& vc = vcs_[static_cast<size_t>(m.router) * kSlotCount + m.in_slot];
    const Flit f = vc.fifo.front();
    vc.fifo.pop_front();
    PacketInfo& info = packets_[f.packet];
    const Port in_port = static_cast<Port>(m.in_slot / kVnCount);

    // wormhole bookkeeping on the sending VC
    if (f.kind == FlitKind::head) {
      vc.active_packet = f.packet;
      vc.out_port = m.out_port;
      vc.out_vn = m.out_vn;
    }
    if (f.kind == FlitKind::tail) vc.active_packet = -1;

    // credit return to the upstream router this VC's buffer belongs to
    if (in_port != Port::Local) {
      const Coord here = topo_.coord_of(m.router);
      const Coord up = neighbor(here, in_port);
      ++outs_[slot(topo_.id_of(up), opposite(in_port), static_cast<Vn>(m.in_slot % 2))]
            .credits;
      --occupancy_[m.router];
    }

    // source-router departure timestamps feed the selector's cost tracking
    if (in_port == Port::Local) {
      if (f.kind == FlitKind::head) info.t_head_leave = cycle;
      if (f.kind == FlitKind::tail && info.elevator >= 0 &&
          cfg_.policy == Policy::adele) {
        const SelectionCostSample sample{info.t_head_leave, cycle + 1, info.length};
        selectors_[info.src].update_cost(info.elevator, selection_latency(sample));
      }
    }

    if (window_cycle) ++metrics_.router_forwarded_flits[m.router];
    if (info.in_window) {
      metrics_.energy_total += cfg_.energy.e_router;
      if (m.out_port == Port::Up || m.out_port == Port::Down)
        metrics_.energy_total += cfg_.energy.e_tsv;
      else if (m.out_port != Port::Local)
        metrics_.energy_total += cfg_.energy.e_link;
    }

    OutState& out = outs_[slot(m.router, m.out_port, m.out_vn)];
    if (f.kind == FlitKind::head) out.owner = f.packet;
    if (out.owner != f.packet)
      throw std::logic_error("engine: flit crossed an output it does not own");
    if (f.kind == FlitKind::tail) out.owner = -1;

    if (m.out_port == Port::Local) {
      eject(f, info, cycle);
      return;
    }

    if (--out.credits < 0) throw std::logic_error("engine: flit sent without credit");
    const Coord here = topo_.coord_of(m.router);
    const Coord next = neighbor(here, m.out_port);
    if (!topo_.contains(next)) throw std::logic_error("engine: route left the mesh");
    const NodeId next_id = topo_.id_of(next);
    VcState& down = vcs_[slot(next_id, opposite(m.out_port), m.out_vn)];
    if (static_cast<int>(down.fifo.size()) >= kBufferDepth)
      throw std::logic_error("engine: buffer overflow past credit bound");
    down.fifo.push_back(f);
    ++occupancy_[next_id];

    if (f.kind == FlitKind::head) {
      ++info.head_hops;
      if ((m.out_port == Port::Up || m.out_port == Port::Down) &&
          !info.elevator_counted) {
        info.elevator_counted = true;
        if (window_cycle) ++metrics_.elevator_traversals[info.elevator];
      }
      info.route_state =
          advance_route_state(info.route_state, next, topo_.coord_of(info.dst), topo_);
      info.head_pos = next;
    }
  }

  void eject(const Flit& f, PacketInfo& info, uint64_t cycle) {
    // wormhole integrity: flits of a packet leave in order, head first
    const int expected = info.ejected_flits;
    if (f.kind == FlitKind::head && expected != 0)
      throw std::logic_error("engine: head flit delivered out of order");
    if (f.kind == FlitKind::tail && expected != info.length - 1)
      throw std::logic_error("engine: tail flit delivered out of order");
    if (f.kind == FlitKind::body && (expected <= 0 || expected >= info.length - 1))
      throw std::logic_error("engine: body flit delivered out of order");
    ++info.ejected_flits;
    ++flits_ejected_;
    if (f.kind == FlitKind::head) info.head_ejected = true;
    if (info.in_window) ++metrics_.delivered_flits;

    if (f.kind == FlitKind::tail) {
      ++delivered_total_;
      if (info.in_window) {
        ++metrics_.delivered;
        latency_sum_ += static_cast<double>(cycle + 1 - info.inject_cycle);
        hop_sum_ += info.head_hops;
      }
    }
  }

  Coord neighbor(Coord c, Port p) const {
    switch (p) {
      case Port::North: c.y -= 1; break;
      case Port::South: c.y += 1; break;
      case Port::East: c.x += 1; break;
      case Port::West: c.x -= 1; break;
      case Port::Up: c.z += 1; break;
      case Port::Down: c.z -= 1; break;
      case Port::Local: break;
    }
    return c;
  }

  void verify_conservation() const {
    uint64_t in_network = 0;
    for (const auto& vc : vcs_) in_network += vc.fifo.size();
    if (flits_entered_ != flits_ejected_ + in_network)
      throw std::logic_error("engine: flit conservation violated");
  }

  void finalize() {
    metrics_.total_cycles = cfg_.warmup_cycles + cfg_.measure_cycles;
    if (metrics_.delivered > 0) {
      metrics_.avg_latency = latency_sum_ / static_cast<double>(metrics_.delivered);
      metrics_.avg_hops = hop_sum_ / static_cast<double>(metrics_.delivered);
    }
    if (metrics_.delivered_flits > 0)
      metrics_.energy_per_flit =
          metrics_.energy_total / static_cast<double>(metrics_.delivered_flits);
  }

  SimConfig cfg_;
  Topology topo_;
  TrafficSource traffic_;
  int n_;

  std::vector<VcState> vcs_;   // [router][port][vn]
  std::vector<OutState> outs_; // [router][port][vn]
  std::vector<int> arb_;       // [router][port]
  std::vector<int> occupancy_; // network-buffer flits per router (CDA snapshot)
  std::vector<SelectorState> selectors_;
  std::vector<PacketInfo> packets_;
  std::vector<Move> moves_;

  SimMetrics metrics_;
  double latency_sum_ = 0.0;
  double hop_sum_ = 0.0;
  uint64_t delivered_total_ = 0;
  uint64_t flits_entered_ = 0;
  uint64_t flits_ejected_ = 0;
};

}  // namespace

Policy policy_from_string(const std::string& name) {
  if (name == "nearest") return Policy::nearest;
  if (name == "rr") return Policy::rr;
  if (name == "adele") return Policy::adele;
  if (name == "cda") return Policy::cda;
  throw std::invalid_argument("unknown policy: " + name);
}

std::string to_string(Policy p) {
  switch (p) {
    case Policy::nearest: return "nearest";
    case Policy::rr: return "rr";
    case Policy::adele: return "adele";
    case Policy::cda: return "cda";
  }
  return "?";
}

void EnergyModel::validate() const {
  if (e_router < 0 || e_link < 0 || e_tsv < 0)
    throw std::invalid_argument("energy: coefficients must be non-negative");
}

void SimConfig::validate() const {
  if (measure_cycles == 0) throw std::invalid_argument("sim: measure_cycles must be > 0");
  traffic.validate();
  energy.validate();
  adele.validate();
  const bool needs_assignment = policy == Policy::rr || policy == Policy::adele;
  if (needs_assignment != assignment.has_value()) {
    throw std::invalid_argument(needs_assignment
                                    ? "sim: policy requires an elevator assignment"
                                    : "sim: policy does not take an assignment");
  }
  if (assignment) assignment->validate(topology);
}

SimMetrics simulate(const SimConfig& config) {
  config.validate();
  Simulator sim(config);
  return sim.run();
}

SweepResult latency_sweep(const SimConfig& base, const std::vector<double>& rates) {
  if (rates.empty()) throw std::invalid_argument("sweep: no rates");
  for (size_t i = 0; i < rates.size(); ++i) {
    if (rates[i] <= 0.0) throw std::invalid_argument("sweep: rates must be positive");
    if (i > 0 && rates[i] <= rates[i - 1])
      throw std::invalid_argument("sweep: rates must be ascending");
  }

  SweepResult result;
  result.points.resize(rates.size());
  std::string failure;  // exceptions may not unwind out of the parallel region
#pragma omp parallel for schedule(dynamic, 1)
  for (int i = 0; i < static_cast<int>(rates.size()); ++i) {
    try {
      SimConfig cfg = base;
      cfg.traffic.injection_rate = rates[i];
      cfg.seed = base.seed + static_cast<uint64_t>(i);
      result.points[i] = {rates[i], simulate(cfg)};
    } catch (const std::exception& e) {
#pragma omp critical
      if (failure.empty()) failure = e.what();
    }
  }
  if (!failure.empty()) throw std::runtime_error("sweep: " + failure);

  result.zero_load_latency = result.points.front().metrics.avg_latency;
  for (size_t i = 0; i < result.points.size(); ++i) {
    const auto& m = result.points[i].metrics;
    const bool saturated =
        m.delivered == 0 || m.avg_latency > 10.0 * result.zero_load_latency;
    if (saturated) {
      result.saturation_index = static_cast<int>(i);
      result.saturation_rate = rates[i];
      break;
    }
  }
  return result;
}

LoadDistribution load_distribution(const SimMetrics& metrics, const Topology& topo) {
  LoadDistribution out;
  const int n = topo.node_count();
  if (static_cast<int>(metrics.router_forwarded_flits.size()) != n)
    throw std::invalid_argument("load_distribution: metrics do not match topology");

  double plain_sum = 0.0;
  int plain_count = 0;
  for (NodeId i = 0; i < n; ++i) {
    const Coord c = topo.coord_of(i);
    if (topo.elevator_at(c.x, c.y) < 0) {
      plain_sum += static_cast<double>(metrics.router_forwarded_flits[i]);
      ++plain_count;
    }
  }
  const double plain_mean = plain_count > 0 ? plain_sum / plain_count : 0.0;
  out.normalized = plain_mean > 0.0;
  const double scale = out.normalized ? plain_mean : 1.0;

  out.router_load.resize(n);
  for (NodeId i = 0; i < n; ++i)
    out.router_load[i] = static_cast<double>(metrics.router_forwarded_flits[i]) / scale;

  out.elevator_load.assign(topo.elevator_count(), 0.0);
  for (ElevatorId e = 0; e < topo.elevator_count(); ++e) {
    const auto [ex, ey] = topo.elevator_column(e);
    double sum = 0.0;
    for (int z = 0; z < topo.layers(); ++z)
      sum += out.router_load[topo.id_of({ex, ey, z})];
    out.elevator_load[e] = sum / topo.layers();
  }
  return out;
}

}  // namespace pcnoc
