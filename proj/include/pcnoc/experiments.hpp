#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "pcnoc/engine.hpp"
#include "pcnoc/optimizer.hpp"

namespace pcnoc {

// One JSON document configures everything; the CLI and tests share this
// layer. Every emitted report embeds the fully resolved configuration (and
// thus the seed), so results are self-describing.

nlohmann::json default_config_json();

// Parses a config file and merges it over the defaults (shallow per section).
nlohmann::json load_config_json(const std::string& path);

// Applies "dotted.path=value" style overrides; the value is parsed as JSON
// when possible, else taken as a string.
void apply_override(nlohmann::json& config, const std::string& key,
                    const std::string& value);
void apply_override_kv(nlohmann::json& config, const std::string& key_equals_value);

struct ExperimentConfig {
  nlohmann::json resolved;  // the config as embedded in outputs
  SimConfig sim;            // topology/traffic/policy materialized (assignment too, if given)
  AmosaConfig amosa;
  PickStrategy pick = PickStrategy::min_variance;
  std::vector<double> rates;
  std::vector<Policy> policies;
};

ExperimentConfig materialize_config(const nlohmann::json& config);

nlohmann::json metrics_to_json(const SimMetrics& m);

// {"config": ..., "results": ...}, 2-space indent. Stable bytes for a fixed
// (config, seed).
std::string metrics_report_text(const nlohmann::json& resolved_config,
                                const SimMetrics& m);

// simulate with the configured policy; writes metrics JSON to out_file when
// non-empty and a short summary to `log`.
SimMetrics run_simulate(const ExperimentConfig& cfg, const std::string& out_file,
                        std::ostream& log);

// Sweep over cfg.rates; writes tidy CSV (rate,policy,metric,value) and a JSON
// report next to it.
SweepResult run_sweep(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                      std::ostream& log);

struct CompareRow {
  Policy policy;
  double rate = 0.0;
  double avg_latency = 0.0;
  double latency_delta_pct = 0.0;  // vs the first-listed policy, same rate
  double energy_per_flit = 0.0;
  double energy_delta_pct = 0.0;
  double max_elevator_load = 0.0;
  double saturation_rate = 0.0;  // 0 when the sweep did not reach saturation
  uint64_t delivered = 0;
  uint64_t injected = 0;
};

struct CompareResult {
  std::vector<CompareRow> rows;  // |policies| x |rates|
};

// Matched-seed comparison of >= 2 policies over the configured rates. An
// assignment is taken from the config when present; otherwise one is produced
// by the offline optimizer (uniform traffic) and shared by the policies that
// need it.
CompareResult run_compare(const ExperimentConfig& cfg,
                          const std::filesystem::path& out_dir, std::ostream& log);

struct PipelineResult {
  std::vector<ArchiveSolution> archive;
  ArchiveSolution chosen;
  SimMetrics metrics;
};

// optimize -> pick_solution -> simulate, persisting archive.json,
// assignment.json, and metrics.json under out_dir. Re-running with identical
// inputs reproduces identical bytes.
PipelineResult run_pipeline(const ExperimentConfig& cfg,
                            const std::filesystem::path& out_dir, std::ostream& log);

}  // namespace pcnoc
