#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "xlra/engine.hpp"
#include "xlra/scenario.hpp"

namespace xlra {

// One point of a sweep: a fully resolved config plus the swept key/value the
// point came from (for CSV labeling).
struct SweepPoint {
  ScenarioConfig cfg;
  std::string param;
  double value = 0.0;
};

struct ExperimentPreset {
  std::string name;
  std::vector<SweepPoint> points;
  std::vector<ProtocolMode> modes;
  std::vector<CorrelationMode> channels;
  int n_seeds = 10;
  bool convergence_only = false;  // appendix preset runs no campaigns
};

std::vector<std::string> preset_names();

// Builds a named preset on top of `base`. Desk scale by default; paper_scale
// restores M = 500 and 10^4 blocks.
ExperimentPreset make_preset(const std::string& name,
                             const ScenarioConfig& base, bool paper_scale);

// Strict flat key-value parse: unknown keys and type mismatches are rejected
// with messages naming the key; omitted keys keep their defaults.
ScenarioConfig parse_config(const nlohmann::json& doc);
ScenarioConfig parse_config_file(const std::filesystem::path& path);
nlohmann::json config_to_json(const ScenarioConfig& cfg);

struct RunOptions {
  std::filesystem::path out_dir = "out";
  std::uint64_t seed_base = 1;
  std::optional<int> n_seeds;
  std::optional<int> n_blocks;
  bool paper_scale = false;
  bool trace = false;
  int threads = 0;  // 0 = hardware concurrency
  std::vector<ProtocolMode> mode_filter;        // empty = preset list
  std::vector<CorrelationMode> channel_filter;  // empty = preset list
};

// Per-campaign metric row of the detail CSV.
struct MetricRow {
  std::string preset;
  std::string param;
  double value = 0.0;
  ProtocolMode mode = ProtocolMode::sucre_xl;
  CorrelationMode channel = CorrelationMode::iid;
  std::uint64_t seed = 0;
  CampaignResult result;
  int K = 0;
  double P_a = 0.0;
  int B = 0;
  double P_b = 0.0;
};

// Runs every (point, mode, channel, seed) campaign of the preset on a worker
// pool, merges rows in deterministic sweep order, writes
// <preset>_metrics.csv, <preset>_summary.csv and <preset>_manifest.json
// (plus <preset>_convergence.csv for the convergence preset).
// Returns a process exit status.
int run_experiment(const ExperimentPreset& preset, const ScenarioConfig& base,
                   const RunOptions& opts);

nlohmann::json campaign_result_to_json(const CampaignResult& res,
                                       const ScenarioConfig& cfg);
nlohmann::json block_trace_to_json(const BlockTrace& trace);

}  // namespace xlra
