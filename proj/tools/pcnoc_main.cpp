#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pcnoc/experiments.hpp"
#include "pcnoc/presets.hpp"

namespace {

using namespace pcnoc;

std::vector<double> parse_rates(const std::string& csv) {
  std::vector<double> rates;
  std::istringstream in(csv);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) rates.push_back(std::stod(item));
  }
  return rates;
}

Dims parse_dims(const std::string& text) {
  Dims d;
  char x1, x2;
  std::istringstream in(text);
  if (!(in >> d.x >> x1 >> d.y >> x2 >> d.layers) || x1 != 'x' || x2 != 'x')
    throw std::invalid_argument("expected dims like 4x4x4, got: " + text);
  return d;
}

struct CommonFlags {
  std::string config_path;
  std::string out;
  std::string seed;
  std::vector<std::string> overrides;  // --set key=value

  // dedicated flags, applied as overrides when present
  std::string topology, traffic, policy, assignment, pir, warmup, cycles;
  std::string rates, policies, strategy;
};

nlohmann::json build_config(const CommonFlags& f) {
  nlohmann::json config =
      f.config_path.empty() ? default_config_json() : load_config_json(f.config_path);
  auto set_if = [&](const char* key, const std::string& value) {
    if (!value.empty()) apply_override(config, key, value);
  };
  set_if("topology", f.topology);
  set_if("traffic.kind", f.traffic);
  set_if("traffic.injection_rate", f.pir);
  set_if("policy", f.policy);
  set_if("assignment", f.assignment);
  set_if("warmup_cycles", f.warmup);
  set_if("measure_cycles", f.cycles);
  set_if("seed", f.seed);
  set_if("pick_strategy", f.strategy);
  if (!f.rates.empty()) {
    nlohmann::json rates = nlohmann::json::array();
    for (const double r : parse_rates(f.rates)) rates.push_back(r);
    config["rates"] = rates;
  }
  if (!f.policies.empty()) {
    nlohmann::json policies = nlohmann::json::array();
    std::istringstream in(f.policies);
    std::string item;
    while (std::getline(in, item, ','))
      if (!item.empty()) policies.push_back(item);
    config["policies"] = policies;
  }
  for (const auto& kv : f.overrides) apply_override_kv(config, kv);
  return config;
}

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "JSON config file");
  cmd->add_option("--out", f.out, "output file or directory");
  cmd->add_option("--seed", f.seed, "rng seed");
  cmd->add_option("--set", f.overrides, "config override key=value (repeatable)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"partially connected 3D mesh NoC simulator and elevator-subset optimizer"};
  app.require_subcommand(1);

  CommonFlags f;

  auto* placement = app.add_subcommand(
      "placement", "place elevator columns by average-distance minimization");
  std::string dims_text = "4x4x4";
  int elevator_count = 3;
  placement->add_option("--dims", dims_text, "mesh dimensions XxYxL");
  placement->add_option("--elevators", elevator_count, "number of elevator columns");
  add_common(placement, f);

  auto* optimize =
      app.add_subcommand("optimize", "offline elevator-subset search (writes the archive)");
  optimize->add_option("--topology", f.topology, "preset name or topology JSON file");
  optimize->add_option("--traffic", f.traffic, "uniform|shuffle|trace:<path>");
  add_common(optimize, f);

  auto* simulate_cmd = app.add_subcommand("simulate", "run one simulation");
  std::string cycle_csv;
  simulate_cmd->add_option("--topology", f.topology, "preset name or topology JSON file");
  simulate_cmd->add_option("--traffic", f.traffic, "uniform|shuffle|trace:<path>");
  simulate_cmd->add_option("--pir", f.pir, "injection rate, flits/node/cycle");
  simulate_cmd->add_option("--policy", f.policy, "nearest|rr|adele|cda");
  simulate_cmd->add_option("--assignment", f.assignment, "assignment JSON file");
  simulate_cmd->add_option("--warmup", f.warmup, "warmup cycles");
  simulate_cmd->add_option("--cycles", f.cycles, "measured cycles");
  simulate_cmd->add_option("--cycle-csv", cycle_csv, "per-cycle counters CSV (debug)");
  add_common(simulate_cmd, f);

  auto* sweep_cmd = app.add_subcommand("sweep", "latency vs injection-rate sweep");
  sweep_cmd->add_option("--topology", f.topology, "preset name or topology JSON file");
  sweep_cmd->add_option("--traffic", f.traffic, "uniform|shuffle|trace:<path>");
  sweep_cmd->add_option("--policy", f.policy, "nearest|rr|adele|cda");
  sweep_cmd->add_option("--assignment", f.assignment, "assignment JSON file");
  sweep_cmd->add_option("--rates", f.rates, "comma-separated injection rates");
  add_common(sweep_cmd, f);

  auto* compare_cmd =
      app.add_subcommand("compare", "matched-seed comparison across policies");
  compare_cmd->add_option("--topology", f.topology, "preset name or topology JSON file");
  compare_cmd->add_option("--traffic", f.traffic, "uniform|shuffle|trace:<path>");
  compare_cmd->add_option("--policies", f.policies, "comma-separated policy list");
  compare_cmd->add_option("--rates", f.rates, "comma-separated injection rates");
  compare_cmd->add_option("--strategy", f.strategy,
                          "assignment pick strategy: min_variance|min_distance|knee");
  add_common(compare_cmd, f);

  auto* pipeline_cmd =
      app.add_subcommand("pipeline", "optimize, pick a solution, then simulate");
  pipeline_cmd->add_option("--topology", f.topology, "preset name or topology JSON file");
  pipeline_cmd->add_option("--traffic", f.traffic, "uniform|shuffle|trace:<path>");
  pipeline_cmd->add_option("--pir", f.pir, "injection rate, flits/node/cycle");
  pipeline_cmd->add_option("--policy", f.policy, "simulated policy (default adele)");
  pipeline_cmd->add_option("--strategy", f.strategy,
                           "pick strategy: min_variance|min_distance|knee");
  add_common(pipeline_cmd, f);

  CLI11_PARSE(app, argc, argv);

  try {
    if (placement->parsed()) {
      const Dims dims = parse_dims(dims_text);
      const auto positions = optimize_placement(dims, elevator_count);
      std::vector<std::pair<int, int>> cols(positions.begin(), positions.end());
      const Topology topo(dims, cols);
      const std::string text = topology_to_json_text(topo);
      if (f.out.empty()) {
        std::cout << text << "\n";
      } else {
        std::ofstream out(f.out);
        if (!out) throw std::runtime_error("cannot write " + f.out);
        out << text << "\n";
        std::cout << "wrote " << f.out << "\n";
      }
      return 0;
    }

    nlohmann::json config = build_config(f);

    if (optimize->parsed()) {
      const ExperimentConfig cfg = materialize_config(config);
      const TrafficMatrix matrix = frequency_matrix(cfg.sim.traffic, cfg.sim.topology);
      const auto archive = amosa_optimize(cfg.sim.topology, matrix, cfg.amosa);
      const std::string out_file = f.out.empty() ? "archive.json" : f.out;
      std::ofstream out(out_file);
      if (!out) throw std::runtime_error("cannot write " + out_file);
      out << archive_to_json_text(archive) << "\n";
      std::cout << "archive of " << archive.size() << " solutions -> " << out_file << "\n";
      return 0;
    }

    if (simulate_cmd->parsed()) {
      ExperimentConfig cfg = materialize_config(config);
      cfg.sim.cycle_csv_path = cycle_csv;
      run_simulate(cfg, f.out.empty() ? "metrics.json" : f.out, std::cout);
      return 0;
    }

    if (sweep_cmd->parsed()) {
      const ExperimentConfig cfg = materialize_config(config);
      run_sweep(cfg, f.out.empty() ? "." : f.out, std::cout);
      return 0;
    }

    if (compare_cmd->parsed()) {
      const ExperimentConfig cfg = materialize_config(config);
      run_compare(cfg, f.out.empty() ? "." : f.out, std::cout);
      return 0;
    }

    if (pipeline_cmd->parsed()) {
      if (f.policy.empty()) apply_override(config, "policy", "adele");
      const ExperimentConfig cfg = materialize_config(config);
      run_pipeline(cfg, f.out.empty() ? "." : f.out, std::cout);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
