#include "mcps/harness.hpp"

#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

using namespace mcps;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "mcps_test_harness" / name;
  std::filesystem::remove_all(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool same_real(double a, double b, double tol) {
  if (std::isnan(a) || std::isnan(b)) return std::isnan(a) && std::isnan(b);
  return std::abs(a - b) <= tol;
}

ExperimentConfig small_cond_rate() {
  auto cfg = default_condition_rate_config();
  cfg.base.n = 40;
  cfg.base.k = 3;
  cfg.m_grid = {10, 20, 30};
  cfg.trials_per_m = 20;
  cfg.lambda_grid = log_spaced(1e-4, 1.0, 9);
  return cfg;
}

ExperimentConfig small_recovery() {
  auto cfg = default_recovery_config();
  cfg.base.n = 30;
  cfg.base.k = 3;
  cfg.m_grid = {12, 20};
  cfg.trials_per_m = 10;
  cfg.pilot_trials = 5;
  cfg.lambda_grid = log_spaced(1e-3, 1e-1, 3);
  return cfg;
}

}  // namespace

TEST_CASE("trial seeds are deterministic and distinct") {
  std::set<std::uint64_t> seen;
  for (Index m : {10, 20, 30})
    for (int t = 0; t < 100; ++t) {
      CHECK(trial_seed(1, m, t) == trial_seed(1, m, t));
      seen.insert(trial_seed(1, m, t));
    }
  CHECK(seen.size() == 300);
  CHECK(trial_seed(1, 10, 0) != trial_seed(2, 10, 0));
}

TEST_CASE("empty report gives header-only CSVs") {
  ExperimentReport report;
  report.kind = "recovery";
  const auto dir = scratch("empty");
  emit_report(report, dir);
  CHECK(slurp(dir / "rows.csv") == "method,noise,m,trial,seed,vsc,fp,fn,l2,lambda,status\n");
  CHECK(read_rows_csv(dir / "rows.csv").empty());
  CHECK(read_summary_csv(dir / "summary.csv").empty());
  CHECK(std::filesystem::exists(dir / "config.echo"));
}

TEST_CASE("condition-rate experiment: shape, determinism and round trip") {
  const auto cfg = small_cond_rate();
  const auto report = run_condition_rate_experiment(cfg, Execution::parallel);
  REQUIRE(report.summary.size() == 6);
  CHECK(report.rows.size() == 2 * 3 * 20);
  for (const auto& s : report.summary) {
    CHECK(s.trials == 20);
    CHECK(s.rate >= 0.0);
    CHECK(s.rate <= 1.0);
  }
  // Method fairness: both methods see the same instance in each trial.
  for (std::size_t i = 0; i + 1 < report.rows.size(); i += 2) {
    CHECK(report.rows[i].seed == report.rows[i + 1].seed);
    CHECK(report.rows[i].method == "lasso");
    CHECK(report.rows[i + 1].method == "mcps2");
    CHECK(report.rows[i].seed == trial_seed(cfg.master_seed, report.rows[i].m, report.rows[i].trial));
  }

  const auto dir = scratch("cond");
  emit_report(report, dir, true);
  CHECK(std::filesystem::exists(dir / "condition_rate.svg"));
  const auto rows = read_rows_csv(dir / "rows.csv");
  const auto summary = read_summary_csv(dir / "summary.csv");
  const auto again = aggregate(rows);
  REQUIRE(again.size() == summary.size());
  for (std::size_t i = 0; i < again.size(); ++i) {
    CHECK(again[i].method == summary[i].method);
    CHECK(again[i].m == summary[i].m);
    CHECK(again[i].trials == summary[i].trials);
    CHECK(same_real(again[i].rate, summary[i].rate, 1e-12));
    CHECK(same_real(again[i].mean_runtime_seconds, summary[i].mean_runtime_seconds, 1e-12));
  }

  const auto serial = run_condition_rate_experiment(cfg, Execution::serial);
  const auto dir2 = scratch("cond_serial");
  emit_report(serial, dir2);
  CHECK(slurp(dir / "rows.csv") == slurp(dir2 / "rows.csv"));
}

TEST_CASE("condition rates at m = n") {
  auto cfg = default_condition_rate_config();
  cfg.m_grid = {100};
  cfg.trials_per_m = 50;
  const auto report = run_condition_rate_experiment(cfg);
  for (const auto& s : report.summary) CHECK(s.rate >= 0.9);
}

TEST_CASE("condition rates are stable across trial counts") {
  auto cfg = default_condition_rate_config();
  cfg.trials_per_m = 1000;
  const auto full = run_condition_rate_experiment(cfg);
  cfg.trials_per_m = 200;
  cfg.master_seed = 1234;
  const auto reduced = run_condition_rate_experiment(cfg);
  REQUIRE(full.summary.size() == reduced.summary.size());
  for (std::size_t i = 0; i < full.summary.size(); ++i)
    CHECK(std::abs(full.summary[i].rate - reduced.summary[i].rate) <= 0.07);
}

TEST_CASE("recovery experiment: rows, round trip and determinism") {
  auto cfg = small_recovery();
  cfg.methods = {"lasso_admm", "mcps2_admm"};
  const auto report = run_recovery_experiment(cfg);
  CHECK(report.rows.size() == 2 * 2 * 10);
  CHECK(report.summary.size() == 4);
  CHECK(report.chosen_lambda.count("lasso_admm@0") == 1);
  CHECK(report.chosen_lambda.count("mcps2_admm@0") == 1);
  for (const auto& r : report.rows) {
    CHECK(r.status == "ok");
    CHECK(r.lambda == report.chosen_lambda.at(r.method + "@0"));
    if (r.vsc) {
      CHECK(r.fp == 0.0);
      CHECK(r.fn == 0.0);
    }
  }
  const auto dir = scratch("rec");
  emit_report(report, dir, true);
  for (const char* f : {"vsc.svg", "fp.svg", "fn.svg", "runtime.svg"})
    CHECK(std::filesystem::exists(dir / f));
  const auto again = aggregate(read_rows_csv(dir / "rows.csv"));
  const auto summary = read_summary_csv(dir / "summary.csv");
  REQUIRE(again.size() == summary.size());
  for (std::size_t i = 0; i < again.size(); ++i) {
    CHECK(same_real(again[i].rate, summary[i].rate, 1e-12));
    CHECK(same_real(again[i].fp_rate, summary[i].fp_rate, 1e-12));
    CHECK(same_real(again[i].fn_rate, summary[i].fn_rate, 1e-12));
    CHECK(same_real(again[i].mean_l2, summary[i].mean_l2, 1e-12));
    CHECK(same_real(again[i].mean_runtime_seconds, summary[i].mean_runtime_seconds, 1e-12));
    CHECK(same_real(again[i].median_runtime_seconds, summary[i].median_runtime_seconds, 1e-12));
  }
  const auto echo = read_json(dir / "config.echo");
  CHECK(echo["artifact_version"] == kArtifactVersion);
  CHECK(echo["config"]["master_seed"] == cfg.master_seed);
  CHECK(echo["config"]["tau"] == doctest::Approx(1e-3));
  CHECK(echo["config"]["chosen_lambda"].size() == 2);

  const auto serial = run_recovery_experiment(cfg, Execution::serial);
  const auto dir2 = scratch("rec_serial");
  emit_report(serial, dir2);
  CHECK(slurp(dir / "rows.csv") == slurp(dir2 / "rows.csv"));
}

TEST_CASE("recovery lambda overrides bypass the pilot") {
  auto cfg = small_recovery();
  cfg.lambda_grid.clear();
  cfg.lambda_override = {{"lasso_admm", 0.01}, {"mcps2_admm", 0.02}};
  const auto report = run_recovery_experiment(cfg);
  CHECK(report.chosen_lambda.at("lasso_admm@0") == 0.01);
  CHECK(report.chosen_lambda.at("mcps2_admm@0") == 0.02);
  cfg.lambda_override.erase("lasso_admm");
  CHECK_THROWS_AS(run_recovery_experiment(cfg), Error);
}

TEST_CASE("solver errors are recorded per row") {
  auto cfg = small_recovery();
  cfg.methods = {"mcps2_admm", "oracle"};
  cfg.lambda_override = {{"mcps2_admm", 0.01}};
  const auto report = run_recovery_experiment(cfg);
  for (const auto& r : report.rows) {
    if (r.method == "oracle") {
      CHECK(r.status.rfind("error:", 0) == 0);
      CHECK_FALSE(r.vsc);
      CHECK(r.lambda == 0.01);
    } else {
      CHECK(r.status == "ok");
    }
  }
  for (const auto& s : report.summary)
    if (s.method == "oracle") CHECK(s.rate == 0.0);
}

TEST_CASE("local solver does not beat the oracle on small instances") {
  auto cfg = default_recovery_config();
  cfg.base.n = 10;
  cfg.base.k = 2;
  cfg.m_grid = {6};
  cfg.trials_per_m = 100;
  cfg.pilot_trials = 30;
  cfg.methods = {"mcps2_admm", "oracle"};
  const auto report = run_recovery_experiment(cfg);
  REQUIRE(report.summary.size() == 2);
  CHECK(report.summary[0].rate <= report.summary[1].rate + 0.02);
}

TEST_CASE("overdetermined regime recovers the support") {
  auto cfg = default_recovery_config();
  cfg.m_grid = {80};
  cfg.trials_per_m = 30;
  cfg.pilot_trials = 10;
  const auto report = run_recovery_experiment(cfg);
  for (const auto& s : report.summary) CHECK(s.rate >= 0.9);
}

TEST_CASE("experiment configuration errors") {
  auto cfg = small_cond_rate();
  cfg.m_grid.clear();
  CHECK_THROWS_AS(run_condition_rate_experiment(cfg), Error);
  cfg = small_cond_rate();
  cfg.lambda_grid.clear();
  CHECK_THROWS_AS(run_condition_rate_experiment(cfg), Error);
  cfg = small_cond_rate();
  cfg.methods = {"sdr"};
  CHECK_THROWS_AS(run_condition_rate_experiment(cfg), Error);
  cfg = small_cond_rate();
  cfg.m_grid = {2};
  CHECK_THROWS_AS(run_condition_rate_experiment(cfg), Error);
  auto rec = small_recovery();
  rec.methods = {"lasso"};
  CHECK_THROWS_AS(run_recovery_experiment(rec), Error);
  rec = small_recovery();
  rec.init = "random";
  CHECK_THROWS_AS(run_recovery_experiment(rec), Error);

  const auto dir = scratch("bad_csv");
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "rows.csv") << "wrong,header\n";
  CHECK_THROWS_AS(read_rows_csv(dir / "rows.csv"), Error);
}
