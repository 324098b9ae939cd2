#pragma once

#include "mcps/conditions.hpp"
#include "mcps/hyperparams.hpp"
#include "mcps/problem.hpp"
#include "mcps/serialize.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace mcps {

inline constexpr const char* kArtifactVersion = "1.0.0";

/// Serial execution is the reference; parallel execution distributes (m, trial)
/// items over OpenMP threads and must produce identical rows.
enum class Execution { serial, parallel };

struct ExperimentConfig {
  /// n, k, d and magnitude range; m and the seed are set per trial. The
  /// noise bound is taken from noise_levels.
  GeneratorConfig base;
  std::vector<Index> m_grid;
  int trials_per_m = 200;
  /// Condition rates: "lasso", "mcps2". Recovery: "lasso_admm", "mcps2_admm", "oracle".
  std::vector<std::string> methods;
  /// Condition rates: the certificate sweep. Recovery: pilot candidates.
  std::vector<double> lambda_grid;
  std::vector<double> noise_levels = {0.0};
  std::uint64_t master_seed = 1;
  std::filesystem::path output_dir;
  bool emit_charts = false;

  // Recovery only.
  int pilot_trials = 50;
  /// Per-method lambda that bypasses the pilot sweep.
  std::map<std::string, double> lambda_override;
  /// Support threshold relative to d.
  double tau_rel = 1e-3;
  Hyperparams solver;
  double oracle_grid_step = 1e-3;
  /// ADMM initialization: "zero" or "candidate" (stationary warm start at x*).
  std::string init = "zero";
};

/// One (method, noise, m, trial) outcome. For condition-rate runs `vsc` is the
/// certificate verdict and `lambda` the smallest passing grid value.
struct TrialRow {
  std::string method;
  double noise = 0.0;
  Index m = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  bool vsc = false;
  double fp = 0.0;
  double fn = 0.0;
  double l2 = 0.0;
  double lambda = 0.0;
  std::string status = "ok";
  double runtime_seconds = 0.0;
};

struct SummaryRow {
  std::string method;
  double noise = 0.0;
  Index m = 0;
  int trials = 0;
  double rate = 0.0;
  double fp_rate = 0.0;
  double fn_rate = 0.0;
  double mean_l2 = 0.0;
  double mean_runtime_seconds = 0.0;
  double median_runtime_seconds = 0.0;
};

struct ExperimentReport {
  std::string kind;  ///< "cond-rate" or "recovery"
  std::vector<TrialRow> rows;
  std::vector<SummaryRow> summary;
  std::map<std::string, double> chosen_lambda;
  Json config_echo;
};

/// n=100, k=5, d=1, magnitudes in [0.5, 1], m in {10, 20, ..., 100}, 200
/// trials, both certificates, lambda on 41 log-spaced points in [1e-4, 1].
ExperimentConfig default_condition_rate_config();
/// Same instance family with the ADMM solvers, 200 trials, and a pilot grid
/// of 13 log-spaced points in [1e-4, 1e-1].
ExperimentConfig default_recovery_config();

std::uint64_t trial_seed(std::uint64_t master_seed, Index m, int trial);

ExperimentReport run_condition_rate_experiment(const ExperimentConfig& cfg,
                                               Execution exec = Execution::parallel);
ExperimentReport run_recovery_experiment(const ExperimentConfig& cfg,
                                         Execution exec = Execution::parallel);

/// Per (method, noise, m) means in first-appearance order; runtimes included
/// when present on the rows.
std::vector<SummaryRow> aggregate(const std::vector<TrialRow>& rows);

/// Writes rows.csv, summary.csv, timings.csv, config.echo and, when
/// emit_charts is set, one SVG per figure family.
void emit_report(const ExperimentReport& report, const std::filesystem::path& dir,
                 bool emit_charts = false);

std::vector<TrialRow> read_rows_csv(const std::filesystem::path& path);
std::vector<SummaryRow> read_summary_csv(const std::filesystem::path& path);

Json config_to_json(const ExperimentConfig& cfg);

}  // namespace mcps
