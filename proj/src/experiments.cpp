#include "pcnoc/experiments.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace pcnoc {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool policy_needs_assignment(Policy p) {
  return p == Policy::rr || p == Policy::adele;
}

}  // namespace

nlohmann::json default_config_json() {
  return {
      {"topology", "p_s1"},
      {"traffic",
       {{"kind", "uniform"},
        {"injection_rate", 2e-3},
        {"packet_length", {10, 30}},
        {"trace_path", ""}}},
      {"policy", "nearest"},
      {"adele", {{"a", 0.2}, {"xi", 0.05}, {"threshold", 0.5}}},
      {"assignment", nullptr},
      {"warmup_cycles", 10000},
      {"measure_cycles", 100000},
      {"seed", 1},
      {"energy", {{"e_router", 0.8}, {"e_link", 0.4}, {"e_tsv", 0.2}}},
      {"amosa",
       {{"t_initial", 1.0},
        {"t_final", 1e-4},
        {"cooling_ratio", 0.95},
        {"iterations_per_temp", 200},
        {"soft_limit", 60},
        {"hard_limit", 20},
        {"subset_min", 1},
        {"subset_max", 0},
        {"seed", 1}}},
      {"pick_strategy", "min_variance"},
      {"rates", nlohmann::json::array()},
      {"policies", nlohmann::json::array()},
  };
}

nlohmann::json load_config_json(const std::string& path) {
  nlohmann::json user;
  try {
    user = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("config " + path + ": " + e.what());
  }
  nlohmann::json config = default_config_json();
  for (const auto& [key, value] : user.items()) {
    if (!config.contains(key))
      throw std::invalid_argument("config " + path + ": unknown key \"" + key + "\"");
    if (config[key].is_object() && value.is_object()) {
      for (const auto& [k2, v2] : value.items()) {
        if (!config[key].contains(k2))
          throw std::invalid_argument("config " + path + ": unknown key \"" + key + "." +
                                      k2 + "\"");
        config[key][k2] = v2;
      }
    } else {
      config[key] = value;
    }
  }
  return config;
}

void apply_override(nlohmann::json& config, const std::string& key,
                    const std::string& value) {
  nlohmann::json parsed;
  try {
    parsed = nlohmann::json::parse(value);
  } catch (const nlohmann::json::exception&) {
    parsed = value;  // bare strings are fine
  }
  nlohmann::json* node = &config;
  size_t start = 0;
  for (;;) {
    const size_t dot = key.find('.', start);
    const std::string part = key.substr(start, dot - start);
    if (part.empty()) throw std::invalid_argument("override: empty key segment");
    if (dot == std::string::npos) {
      (*node)[part] = parsed;
      return;
    }
    node = &(*node)[part];
    start = dot + 1;
  }
}

void apply_override_kv(nlohmann::json& config, const std::string& key_equals_value) {
  const size_t eq = key_equals_value.find('=');
  if (eq == std::string::npos)
    throw std::invalid_argument("override must be key=value: " + key_equals_value);
  apply_override(config, key_equals_value.substr(0, eq), key_equals_value.substr(eq + 1));
}

ExperimentConfig materialize_config(const nlohmann::json& config) {
  ExperimentConfig out;
  out.resolved = config;

  const auto& topo_spec = config.at("topology");
  if (topo_spec.is_string()) {
    out.sim.topology = load_topology(topo_spec.get<std::string>());
  } else {
    out.sim.topology = topology_from_json_text(topo_spec.dump());
  }

  const auto& traffic = config.at("traffic");
  std::string kind = traffic.at("kind").get<std::string>();
  if (kind.rfind("trace:", 0) == 0) {
    out.sim.traffic.kind = TrafficKind::trace;
    out.sim.traffic.trace_path = kind.substr(6);
  } else if (kind == "uniform") {
    out.sim.traffic.kind = TrafficKind::uniform;
  } else if (kind == "shuffle") {
    out.sim.traffic.kind = TrafficKind::shuffle;
  } else if (kind == "trace") {
    out.sim.traffic.kind = TrafficKind::trace;
    out.sim.traffic.trace_path = traffic.at("trace_path").get<std::string>();
  } else {
    throw std::invalid_argument("config: unknown traffic kind " + kind);
  }
  out.sim.traffic.injection_rate = traffic.at("injection_rate").get<double>();
  out.sim.traffic.min_packet_length = traffic.at("packet_length").at(0).get<int>();
  out.sim.traffic.max_packet_length = traffic.at("packet_length").at(1).get<int>();

  out.sim.policy = policy_from_string(config.at("policy").get<std::string>());
  out.sim.adele.a = config.at("adele").at("a").get<double>();
  out.sim.adele.xi = config.at("adele").at("xi").get<double>();
  out.sim.adele.minimal_threshold = config.at("adele").at("threshold").get<double>();

  const auto& assignment = config.at("assignment");
  if (assignment.is_string()) {
    out.sim.assignment = assignment_from_json_text(read_file(assignment.get<std::string>()));
  } else if (assignment.is_object()) {
    out.sim.assignment = assignment_from_json_text(assignment.dump());
  }

  out.sim.warmup_cycles = config.at("warmup_cycles").get<uint64_t>();
  out.sim.measure_cycles = config.at("measure_cycles").get<uint64_t>();
  out.sim.seed = config.at("seed").get<uint64_t>();
  out.sim.energy.e_router = config.at("energy").at("e_router").get<double>();
  out.sim.energy.e_link = config.at("energy").at("e_link").get<double>();
  out.sim.energy.e_tsv = config.at("energy").at("e_tsv").get<double>();

  const auto& amosa = config.at("amosa");
  out.amosa.t_initial = amosa.at("t_initial").get<double>();
  out.amosa.t_final = amosa.at("t_final").get<double>();
  out.amosa.cooling_ratio = amosa.at("cooling_ratio").get<double>();
  out.amosa.iterations_per_temp = amosa.at("iterations_per_temp").get<int>();
  out.amosa.soft_limit = amosa.at("soft_limit").get<int>();
  out.amosa.hard_limit = amosa.at("hard_limit").get<int>();
  out.amosa.subset_min = amosa.at("subset_min").get<int>();
  out.amosa.subset_max = amosa.at("subset_max").get<int>();
  out.amosa.seed = amosa.at("seed").get<uint64_t>();

  out.pick = pick_strategy_from_string(config.at("pick_strategy").get<std::string>());
  for (const auto& r : config.at("rates")) out.rates.push_back(r.get<double>());
  for (const auto& p : config.at("policies"))
    out.policies.push_back(policy_from_string(p.get<std::string>()));
  return out;
}

nlohmann::json metrics_to_json(const SimMetrics& m) {
  return {
      {"avg_latency", m.avg_latency},
      {"avg_hops", m.avg_hops},
      {"injected", m.injected},
      {"delivered", m.delivered},
      {"injected_flits", m.injected_flits},
      {"delivered_flits", m.delivered_flits},
      {"energy_total", m.energy_total},
      {"energy_per_flit", m.energy_per_flit},
      {"elevator_traversals", m.elevator_traversals},
      {"router_forwarded_flits", m.router_forwarded_flits},
      {"delivered_checkpoints", m.delivered_checkpoints},
      {"total_cycles", m.total_cycles},
  };
}

std::string metrics_report_text(const nlohmann::json& resolved_config,
                                const SimMetrics& m) {
  const nlohmann::json report = {{"config", resolved_config},
                                 {"results", metrics_to_json(m)}};
  return report.dump(2) + "\n";
}

SimMetrics run_simulate(const ExperimentConfig& cfg, const std::string& out_file,
                        std::ostream& log) {
  const SimMetrics m = simulate(cfg.sim);
  if (!out_file.empty()) write_file(out_file, metrics_report_text(cfg.resolved, m));

  const auto row = [&](const char* key, const std::string& value) {
    log << "  " << std::left << std::setw(22) << key << std::right << std::setw(14)
        << value << "\n";
  };
  log << "policy " << to_string(cfg.sim.policy) << ", injection rate "
      << fmt(cfg.sim.traffic.injection_rate) << ", seed " << cfg.sim.seed << "\n";
  row("avg latency (cycles)", fmt(m.avg_latency));
  row("avg hops", fmt(m.avg_hops));
  row("packets", std::to_string(m.delivered) + "/" + std::to_string(m.injected));
  row("energy per flit", fmt(m.energy_per_flit));
  std::ostringstream elevators;
  for (size_t e = 0; e < m.elevator_traversals.size(); ++e)
    elevators << (e ? " " : "") << m.elevator_traversals[e];
  row("elevator traversals", elevators.str());
  return m;
}

SweepResult run_sweep(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                      std::ostream& log) {
  if (cfg.rates.empty()) throw std::invalid_argument("sweep: config has no rates");
  std::filesystem::create_directories(out_dir);
  const SweepResult result = latency_sweep(cfg.sim, cfg.rates);

  std::ostringstream csv;
  csv << "rate,policy,metric,value\n";
  const std::string policy = to_string(cfg.sim.policy);
  for (const auto& point : result.points) {
    const auto emit = [&](const char* metric, double value) {
      csv << fmt(point.rate) << ',' << policy << ',' << metric << ',' << fmt(value)
          << '\n';
    };
    emit("avg_latency", point.metrics.avg_latency);
    emit("avg_hops", point.metrics.avg_hops);
    emit("energy_per_flit", point.metrics.energy_per_flit);
    emit("injected", static_cast<double>(point.metrics.injected));
    emit("delivered", static_cast<double>(point.metrics.delivered));
  }
  write_file(out_dir / "sweep.csv", csv.str());

  nlohmann::json points = nlohmann::json::array();
  for (const auto& point : result.points)
    points.push_back({{"rate", point.rate}, {"results", metrics_to_json(point.metrics)}});
  const nlohmann::json report = {{"config", cfg.resolved},
                                 {"zero_load_latency", result.zero_load_latency},
                                 {"saturation_rate", result.saturation_rate},
                                 {"points", points}};
  write_file(out_dir / "sweep.json", report.dump(2) + "\n");

  log << "sweep: " << result.points.size() << " rates, zero-load latency "
      << result.zero_load_latency << ", saturation rate "
      << (result.saturation_index < 0 ? std::string("not reached")
                                      : fmt(result.saturation_rate))
      << "\n";
  return result;
}

CompareResult run_compare(const ExperimentConfig& cfg,
                          const std::filesystem::path& out_dir, std::ostream& log) {
  if (cfg.policies.size() < 2)
    throw std::invalid_argument("compare: need at least two policies");
  std::filesystem::create_directories(out_dir);
  std::vector<double> rates = cfg.rates;
  if (rates.empty()) rates.push_back(cfg.sim.traffic.injection_rate);

  // Shared assignment for the subset-based policies: explicit config wins,
  // otherwise the offline optimizer supplies one (uniform traffic, the
  // pessimistic default).
  std::optional<ElevatorAssignment> assignment = cfg.sim.assignment;
  const bool any_needs = std::any_of(cfg.policies.begin(), cfg.policies.end(),
                                     policy_needs_assignment);
  if (any_needs && !assignment) {
    TrafficSpec uniform;
    uniform.kind = TrafficKind::uniform;
    const TrafficMatrix matrix = frequency_matrix(uniform, cfg.sim.topology);
    const auto archive = amosa_optimize(cfg.sim.topology, matrix, cfg.amosa);
    assignment = pick_solution(archive, cfg.pick).assignment;
    log << "compare: optimizer produced the shared assignment (archive size "
        << archive.size() << ")\n";
  }

  const size_t np = cfg.policies.size();
  const size_t nr = rates.size();
  std::vector<SimMetrics> grid(np * nr);
  std::string failure;
#pragma omp parallel for schedule(dynamic, 1)
  for (int flat = 0; flat < static_cast<int>(np * nr); ++flat) {
    const size_t pi = flat / nr;
    const size_t ri = flat % nr;
    try {
      SimConfig sim = cfg.sim;
      sim.policy = cfg.policies[pi];
      sim.assignment =
          policy_needs_assignment(sim.policy) ? assignment : std::nullopt;
      sim.traffic.injection_rate = rates[ri];
      sim.seed = cfg.sim.seed + static_cast<uint64_t>(ri);  // matched across policies
      grid[flat] = simulate(sim);
    } catch (const std::exception& e) {
#pragma omp critical
      if (failure.empty())
        failure = "policy " + to_string(cfg.policies[pi]) + ": " + e.what();
    }
  }
  if (!failure.empty()) throw std::runtime_error("compare: " + failure);

  // per-policy saturation from this grid (10x the policy's lowest-rate latency)
  std::vector<double> saturation(np, 0.0);
  if (nr >= 2) {
    for (size_t pi = 0; pi < np; ++pi) {
      const double zero_load = grid[pi * nr].avg_latency;
      for (size_t ri = 0; ri < nr; ++ri) {
        const auto& m = grid[pi * nr + ri];
        if (m.delivered == 0 || m.avg_latency > 10.0 * zero_load) {
          saturation[pi] = rates[ri];
          break;
        }
      }
    }
  }

  CompareResult result;
  for (size_t ri = 0; ri < nr; ++ri) {
    const auto& base = grid[0 * nr + ri];
    for (size_t pi = 0; pi < np; ++pi) {
      const auto& m = grid[pi * nr + ri];
      CompareRow row;
      row.policy = cfg.policies[pi];
      row.rate = rates[ri];
      row.avg_latency = m.avg_latency;
      row.energy_per_flit = m.energy_per_flit;
      row.delivered = m.delivered;
      row.injected = m.injected;
      row.saturation_rate = saturation[pi];
      row.max_elevator_load = 0.0;
      const auto load = load_distribution(m, cfg.sim.topology);
      for (const double l : load.elevator_load)
        row.max_elevator_load = std::max(row.max_elevator_load, l);
      row.latency_delta_pct =
          base.avg_latency > 0 ? 100.0 * (m.avg_latency - base.avg_latency) / base.avg_latency
                               : 0.0;
      row.energy_delta_pct = base.energy_per_flit > 0
                                 ? 100.0 * (m.energy_per_flit - base.energy_per_flit) /
                                       base.energy_per_flit
                                 : 0.0;
      result.rows.push_back(row);
    }
  }

  std::ostringstream csv;
  csv << "policy,rate,avg_latency,latency_delta_pct,energy_per_flit,energy_delta_pct,"
         "max_elevator_load,saturation_rate,delivered,injected\n";
  for (const auto& r : result.rows) {
    csv << to_string(r.policy) << ',' << fmt(r.rate) << ',' << fmt(r.avg_latency) << ','
        << fmt(r.latency_delta_pct) << ',' << fmt(r.energy_per_flit) << ','
        << fmt(r.energy_delta_pct) << ',' << fmt(r.max_elevator_load) << ','
        << fmt(r.saturation_rate) << ',' << r.delivered << ',' << r.injected << '\n';
  }
  write_file(out_dir / "compare.csv", csv.str());

  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : result.rows) {
    rows.push_back({{"policy", to_string(r.policy)},
                    {"rate", r.rate},
                    {"avg_latency", r.avg_latency},
                    {"latency_delta_pct", r.latency_delta_pct},
                    {"energy_per_flit", r.energy_per_flit},
                    {"energy_delta_pct", r.energy_delta_pct},
                    {"max_elevator_load", r.max_elevator_load},
                    {"saturation_rate", r.saturation_rate},
                    {"delivered", r.delivered},
                    {"injected", r.injected}});
  }
  write_file(out_dir / "compare.json",
             nlohmann::json({{"config", cfg.resolved}, {"results", rows}}).dump(2) + "\n");

  auto cell = [](double v) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return std::string(buf);
  };
  log << std::left << std::setw(9) << "policy" << std::right << std::setw(9) << "rate"
      << std::setw(11) << "latency" << std::setw(8) << "d%" << std::setw(13)
      << "energy/flit" << std::setw(8) << "d%" << std::setw(10) << "max-elev"
      << std::setw(10) << "sat-rate" << "\n";
  for (const auto& r : result.rows) {
    log << std::left << std::setw(9) << to_string(r.policy) << std::right << std::setw(9)
        << cell(r.rate) << std::setw(11) << cell(r.avg_latency) << std::setw(8)
        << cell(r.latency_delta_pct) << std::setw(13) << cell(r.energy_per_flit)
        << std::setw(8) << cell(r.energy_delta_pct) << std::setw(10)
        << cell(r.max_elevator_load) << std::setw(10) << cell(r.saturation_rate) << "\n";
  }
  return result;
}

PipelineResult run_pipeline(const ExperimentConfig& cfg,
                            const std::filesystem::path& out_dir, std::ostream& log) {
  std::filesystem::create_directories(out_dir);
  PipelineResult result;

  try {
    const TrafficMatrix matrix = frequency_matrix(cfg.sim.traffic, cfg.sim.topology);
    result.archive = amosa_optimize(cfg.sim.topology, matrix, cfg.amosa);
    write_file(out_dir / "archive.json", archive_to_json_text(result.archive) + "\n");
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("pipeline stage 'optimize' failed: ") + e.what());
  }
  log << "optimize: archive of " << result.archive.size() << " solutions\n";

  try {
    result.chosen = pick_solution(result.archive, cfg.pick);
    const std::vector<ArchiveSolution> one{result.chosen};
    nlohmann::json j = nlohmann::json::parse(archive_to_json_text(one));
    write_file(out_dir / "assignment.json", j[0].dump(2) + "\n");
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("pipeline stage 'pick' failed: ") + e.what());
  }
  log << "pick: variance=" << result.chosen.objectives.variance
      << " avg_distance=" << result.chosen.objectives.avg_distance << "\n";

  try {
    SimConfig sim = cfg.sim;
    if (policy_needs_assignment(sim.policy)) sim.assignment = result.chosen.assignment;
    result.metrics = simulate(sim);
    write_file(out_dir / "metrics.json", metrics_report_text(cfg.resolved, result.metrics));
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("pipeline stage 'simulate' failed: ") + e.what());
  }
  log << "simulate: avg_latency=" << result.metrics.avg_latency << " delivered="
      << result.metrics.delivered << "/" << result.metrics.injected << "\n";
  return result;
}

}  // namespace pcnoc
