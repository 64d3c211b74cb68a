#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "senscore/fitters.hpp"

namespace senscore {

/// Batch-run description. Round-trips through canonical JSON byte-identically.
struct ExperimentConfig {
  std::string mode = "sens_vs_uniform";  // sens_vs_uniform | dim_sweep | ts_growth
  Family family = Family::KCenters;
  int k = 5;
  int j = 0;
  double z = 2.0;
  double epsilon = 0.1;
  std::int64_t n = 2000;
  std::int64_t d = 10;

  struct Generator {
    std::string kind = "mixture";  // mixture | lines | flat_noise | integer_grid | lowerbound
    int components = 5;
    double separation = 10.0;
    double spread = 1.0;
    double imbalance = 0.5;
    double noise = 0.5;
    double int_exponent = 1.0;
  } generator;

  std::vector<std::uint64_t> seeds = {1};
  std::vector<std::int64_t> sizes = {250, 500, 1000};     // sens_vs_uniform
  std::vector<std::int64_t> dims = {5, 50, 500};          // dim_sweep
  std::vector<std::int64_t> ns = {64, 128, 256, 512};     // ts_growth

  struct Budgets {
    int fit_restarts = 5;
    int empirical = 160;
    int eval_random = 48;
    int eval_subset = 12;
    int eval_adversarial = 6;
    int ascent_steps = 40;
  } budgets;

  int threads = 1;
  std::string output_table = "experiment.csv";
};

nlohmann::json experiment_config_to_json(const ExperimentConfig& cfg);
ExperimentConfig experiment_config_from_json(const nlohmann::json& j);

struct ExperimentResult {
  std::filesystem::path table_path;
  std::filesystem::path manifest_path;
};

// Runs the configured batch and writes its CSV table plus a manifest carrying
// the config hash and seeds. Deterministic for a fixed config.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

// Instance construction shared with the CLI generators.
PointSet generate_instance(const ExperimentConfig& cfg, std::uint64_t seed);

}  // namespace senscore
