#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "pcnoc/experiments.hpp"

using namespace pcnoc;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

nlohmann::json tiny_config() {
  nlohmann::json config = default_config_json();
  config["topology"] = {{"dims", {2, 2, 2}}, {"elevators", {{0, 0}, {1, 1}}}};
  config["warmup_cycles"] = 100;
  config["measure_cycles"] = 2000;
  config["traffic"]["injection_rate"] = 0.01;
  config["amosa"]["t_initial"] = 5.0;
  config["amosa"]["t_final"] = 0.2;
  config["amosa"]["iterations_per_temp"] = 40;
  return config;
}

fs::path fresh_dir(const char* name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("config defaults, overrides, and validation") {
  nlohmann::json config = default_config_json();
  apply_override(config, "adele.xi", "0.1");
  apply_override(config, "policy", "adele");
  apply_override_kv(config, "seed=42");
  CHECK(config["adele"]["xi"] == 0.1);
  CHECK(config["seed"] == 42);

  const ExperimentConfig cfg = materialize_config(config);
  CHECK(cfg.sim.adele.xi == 0.1);
  CHECK(cfg.sim.policy == Policy::adele);
  CHECK(cfg.sim.seed == 42);
  CHECK(cfg.sim.topology.elevator_count() == 3);  // p_s1 default

  CHECK_THROWS_AS(apply_override_kv(config, "no-equals-sign"), std::invalid_argument);
  CHECK_THROWS_AS(materialize_config(nlohmann::json{{"policy", "warp"}}), std::exception);
}

TEST_CASE("config files reject unknown keys") {
  const fs::path dir = fresh_dir("pcnoc_cfg");
  {
    std::ofstream out(dir / "bad.json");
    out << R"({"polic":"adele"})";
  }
  CHECK_THROWS_AS(load_config_json((dir / "bad.json").string()), std::invalid_argument);
  {
    std::ofstream out(dir / "good.json");
    out << R"({"policy":"cda","traffic":{"injection_rate":0.004}})";
  }
  const nlohmann::json config = load_config_json((dir / "good.json").string());
  CHECK(config["policy"] == "cda");
  CHECK(config["traffic"]["injection_rate"] == 0.004);
  CHECK(config["traffic"]["kind"] == "uniform");  // default survives the merge
}

TEST_CASE("pipeline persists reproducible artifacts") {
  const fs::path dir = fresh_dir("pcnoc_pipe");
  nlohmann::json config = tiny_config();
  config["policy"] = "adele";
  const ExperimentConfig cfg = materialize_config(config);

  std::ostringstream log;
  const PipelineResult first = run_pipeline(cfg, dir, log);
  CHECK(fs::exists(dir / "archive.json"));
  CHECK(fs::exists(dir / "assignment.json"));
  CHECK(fs::exists(dir / "metrics.json"));
  REQUIRE(!first.archive.empty());

  const std::string archive_a = slurp(dir / "archive.json");
  const std::string metrics_a = slurp(dir / "metrics.json");
  run_pipeline(cfg, dir, log);
  CHECK(slurp(dir / "archive.json") == archive_a);   // byte-identical rerun
  CHECK(slurp(dir / "metrics.json") == metrics_a);

  // strategy ordering on the same archive
  const auto& by_var = pick_solution(first.archive, PickStrategy::min_variance);
  const auto& by_ad = pick_solution(first.archive, PickStrategy::min_distance);
  CHECK(by_var.objectives.variance <= by_ad.objectives.variance);
  CHECK(by_ad.objectives.avg_distance <= by_var.objectives.avg_distance);
}

TEST_CASE("pipeline with a single elevator forces the singleton assignment") {
  const fs::path dir = fresh_dir("pcnoc_pipe1");
  nlohmann::json config = tiny_config();
  config["topology"] = {{"dims", {2, 2, 2}}, {"elevators", {{1, 0}}}};
  config["policy"] = "adele";
  std::ostringstream log;
  const PipelineResult result = run_pipeline(materialize_config(config), dir, log);
  CHECK(result.archive.size() == 1);
  for (const auto& subset : result.chosen.assignment.subsets)
    CHECK(subset == std::vector<ElevatorId>{0});
  CHECK(result.metrics.delivered > 0);
}

TEST_CASE("pipeline failures name the failing stage") {
  const fs::path dir = fresh_dir("pcnoc_pipe_fail");
  nlohmann::json config = tiny_config();
  config["traffic"]["kind"] = "trace";
  config["traffic"]["trace_path"] = "/nonexistent/trace.csv";
  std::ostringstream log;
  try {
    run_pipeline(materialize_config(config), dir, log);
    FAIL("expected the optimize stage to fail");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("optimize") != std::string::npos);
  }
}

TEST_CASE("self-comparison produces all-zero deltas") {
  const fs::path dir = fresh_dir("pcnoc_cmp");
  nlohmann::json config = tiny_config();
  config["policies"] = {"nearest", "nearest"};
  config["rates"] = {0.005, 0.01};
  const ExperimentConfig cfg = materialize_config(config);

  std::ostringstream log;
  const CompareResult result = run_compare(cfg, dir, log);
  CHECK(result.rows.size() == 4);  // |policies| x |rates|
  for (const auto& row : result.rows) {
    CHECK(row.latency_delta_pct == 0.0);
    CHECK(row.energy_delta_pct == 0.0);
  }
  CHECK(fs::exists(dir / "compare.csv"));
  const std::string csv = slurp(dir / "compare.csv");
  CHECK(csv.find("policy,rate,avg_latency") == 0);
}

TEST_CASE("sweep writes tidy csv rows") {
  const fs::path dir = fresh_dir("pcnoc_sweep");
  nlohmann::json config = tiny_config();
  config["rates"] = {0.002, 0.02};
  const ExperimentConfig cfg = materialize_config(config);
  std::ostringstream log;
  const SweepResult result = run_sweep(cfg, dir, log);
  CHECK(result.points.size() == 2);
  const std::string csv = slurp(dir / "sweep.csv");
  CHECK(csv.rfind("rate,policy,metric,value\n", 0) == 0);
  // 2 rates x 5 metrics + header
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 11);
}

TEST_CASE("cli round trip") {
  const fs::path dir = fresh_dir("pcnoc_cli");
  const std::string bin = PCNOC_CLI_PATH;
  auto run = [&](const std::string& args) {
    return std::system((bin + " " + args + " > " + (dir / "stdout.txt").string() +
                        " 2>" + (dir / "stderr.txt").string())
                           .c_str());
  };

  const std::string metrics = (dir / "m1.json").string();
  const std::string base_args =
      "simulate --topology p_s1 --pir 0.002 --warmup 200 --cycles 3000 --seed 7 --out ";
  CHECK(run(base_args + metrics) == 0);
  CHECK(fs::exists(metrics));

  // identical invocation, identical bytes
  const std::string metrics2 = (dir / "m2.json").string();
  CHECK(run(base_args + metrics2) == 0);
  CHECK(slurp(metrics) == slurp(metrics2));

  // the report embeds the resolved config and seed
  const auto report = nlohmann::json::parse(slurp(metrics));
  CHECK(report["config"]["seed"] == 7);
  CHECK(report["results"]["delivered"].get<uint64_t>() > 0);

  // misconfiguration surfaces as a nonzero exit code
  CHECK(run("simulate --topology p_s1 --policy adele --cycles 100") != 0);

  // placement emits a loadable topology
  const std::string topo_file = (dir / "topo.json").string();
  CHECK(run("placement --dims 3x3x2 --elevators 2 --out " + topo_file) == 0);
  CHECK(run("simulate --topology " + topo_file + " --pir 0.002 --warmup 100 --cycles 500 --out " +
            (dir / "m3.json").string()) == 0);
}
