#include "mcps/harness.hpp"

#include "mcps/metrics.hpp"
#include "mcps/rng.hpp"
#include "mcps/solvers.hpp"
#include "mcps/svg_chart.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mcps {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::uint64_t kPilotSalt = 0x70696c6f74ULL;

const char* const kRowsHeader = "method,noise,m,trial,seed,vsc,fp,fn,l2,lambda,status";
const char* const kTimingsHeader = "method,noise,m,trial,runtime_seconds";
const char* const kSummaryHeader =
    "method,noise,m,trials,rate,fp_rate,fn_rate,mean_l2,mean_runtime_seconds,"
    "median_runtime_seconds";

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string lambda_key(const std::string& method, double noise) {
  return method + "@" + fmt(noise);
}

struct WorkItem {
  double noise;
  Index m;
  int trial;
};

std::vector<WorkItem> work_items(const ExperimentConfig& cfg) {
  std::vector<WorkItem> items;
  for (double noise : cfg.noise_levels)
    for (Index m : cfg.m_grid)
      for (int t = 0; t < cfg.trials_per_m; ++t) items.push_back({noise, m, t});
  return items;
}

GeneratorConfig instance_config(const ExperimentConfig& cfg, double noise, Index m,
                                std::uint64_t seed) {
  GeneratorConfig g = cfg.base;
  g.m = m;
  g.noise_inf_bound = noise;
  g.rng_seed = seed;
  return g;
}

void check_common(const ExperimentConfig& cfg) {
  if (cfg.m_grid.empty()) throw Error("m grid is empty");
  if (cfg.methods.empty()) throw Error("method list is empty");
  if (cfg.noise_levels.empty()) throw Error("noise level list is empty");
  if (cfg.trials_per_m < 1) throw Error("trials_per_m must be positive");
  for (double noise : cfg.noise_levels)
    if (!(noise >= 0.0)) throw Error("noise levels must be nonnegative");
  for (Index m : cfg.m_grid) generate_instance(instance_config(cfg, 0.0, m, 0)).n();
}

/// Runs body(i) for i in [0, count). Exceptions escaping body abort the run
/// and are rethrown on the calling thread.
template <class Body>
void for_each_item(std::size_t count, Execution exec, Body&& body) {
  std::exception_ptr failure;
  std::mutex guard;
  auto run = [&](std::size_t i) {
    try {
      body(i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(guard);
      if (!failure) failure = std::current_exception();
    }
  };
  const auto n = static_cast<std::int64_t>(count);
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < n; ++i) run(static_cast<std::size_t>(i));
  } else {
    for (std::int64_t i = 0; i < n; ++i) run(static_cast<std::size_t>(i));
  }
  if (failure) std::rethrow_exception(failure);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// ---- recovery -------------------------------------------------------------------

struct SolveOutcome {
  Vector x_hat;
  double runtime = 0.0;
};

SolveOutcome solve_with(const std::string& method, const ProblemInstance& inst, double lambda,
                        const ExperimentConfig& cfg) {
  Hyperparams hp = cfg.solver;
  hp.lambda = lambda;
  SolverResult r;
  if (method == "mcps2_admm") {
    std::optional<WarmStart> init;
    if (cfg.init == "candidate") {
      try {
        const auto cand = candidate_minimizer(inst, lambda);
        init = stationary_warm_start(inst, project_box(cand.x_star, inst.d()), lambda, true);
      } catch (const Error&) {
        // No candidate at this lambda: start from zero.
      }
    }
    r = admm_mcps2(inst, hp, init);
  } else if (method == "lasso_admm") {
    r = admm_lasso(inst, hp);
  } else if (method == "oracle") {
    r = global_minimize_bruteforce(inst, lambda, cfg.oracle_grid_step);
  } else {
    throw Error("unknown recovery method: " + method);
  }
  return {std::move(r.x_hat), r.runtime_seconds};
}

std::uint64_t pilot_seed(std::uint64_t master, Index m, int trial) {
  return derive_seed(mix64(master ^ kPilotSalt), static_cast<std::uint64_t>(m),
                     static_cast<std::uint64_t>(trial));
}

/// Grid value with the most exact recoveries on held-out seeds; ties go to the
/// smaller lambda.
double pilot_lambda(const ExperimentConfig& cfg, const std::string& method, double noise,
                    Execution exec) {
  if (cfg.lambda_grid.empty()) throw Error("lambda grid is empty for the pilot sweep of " + method);
  if (cfg.pilot_trials < 1) throw Error("pilot_trials must be positive");
  const double tau = cfg.tau_rel * cfg.base.d;
  const std::size_t per_lambda = cfg.m_grid.size() * static_cast<std::size_t>(cfg.pilot_trials);
  std::vector<char> hit(cfg.lambda_grid.size() * per_lambda, 0);
  for_each_item(hit.size(), exec, [&](std::size_t i) {
    const double lambda = cfg.lambda_grid[i / per_lambda];
    const std::size_t rest = i % per_lambda;
    const Index m = cfg.m_grid[rest / static_cast<std::size_t>(cfg.pilot_trials)];
    const int trial = static_cast<int>(rest % static_cast<std::size_t>(cfg.pilot_trials));
    const auto inst = generate_instance(instance_config(cfg, noise, m, pilot_seed(cfg.master_seed, m, trial)));
    try {
      hit[i] = score(solve_with(method, inst, lambda, cfg).x_hat, inst, tau).vsc ? 1 : 0;
    } catch (const Error&) {
      hit[i] = 0;
    }
  });
  std::size_t best = 0;
  long best_count = -1;
  for (std::size_t g = 0; g < cfg.lambda_grid.size(); ++g) {
    long count = 0;
    for (std::size_t j = 0; j < per_lambda; ++j) count += hit[g * per_lambda + j];
    if (count > best_count) {
      best_count = count;
      best = g;
    }
  }
  return cfg.lambda_grid[best];
}

double median(std::vector<double> v) {
  if (v.empty()) return kNaN;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

double finite_mean(const std::vector<double>& v) {
  double sum = 0.0;
  std::size_t count = 0;
  for (double x : v)
    if (std::isfinite(x)) {
      sum += x;
      ++count;
    }
  return count ? sum / static_cast<double>(count) : kNaN;
}

// ---- CSV ----------------------------------------------------------------------

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_real(const std::string& s) {
  if (s == "nan") return kNaN;
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw Error("malformed number in CSV: " + s);
  return v;
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path,
                                               const std::string& header) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != header) throw Error("unexpected header in " + path.string());
  const std::size_t width = split_csv_line(header).size();
  std::vector<std::vector<std::string>> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != width) throw Error("wrong column count in " + path.string());
    out.push_back(std::move(cells));
  }
  return out;
}

std::ofstream open_for_writing(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  return out;
}

void write_charts(const ExperimentReport& report, const std::filesystem::path& dir) {
  auto series_of = [&](auto field) {
    std::vector<ChartSeries> series;
    for (const auto& s : report.summary) {
      const std::string name = s.method + " (noise " + fmt(s.noise) + ")";
      auto it = std::find_if(series.begin(), series.end(),
                             [&](const ChartSeries& c) { return c.name == name; });
      if (it == series.end()) {
        series.push_back({name, {}, {}});
        it = series.end() - 1;
      }
      it->x.push_back(static_cast<double>(s.m));
      it->y.push_back(field(s));
    }
    return series;
  };
  if (report.kind == "cond-rate") {
    write_line_chart(dir / "condition_rate.svg", "Certificate rate", "m", "rate",
                     series_of([](const SummaryRow& s) { return s.rate; }));
    return;
  }
  write_line_chart(dir / "vsc.svg", "Exact support recovery", "m", "VSC rate",
                   series_of([](const SummaryRow& s) { return s.rate; }));
  write_line_chart(dir / "fp.svg", "False positive rate", "m", "FP rate",
                   series_of([](const SummaryRow& s) { return s.fp_rate; }));
  write_line_chart(dir / "fn.svg", "False negative rate", "m", "FN rate",
                   series_of([](const SummaryRow& s) { return s.fn_rate; }));
  write_line_chart(dir / "runtime.svg", "Mean solve time", "m", "seconds",
                   series_of([](const SummaryRow& s) { return s.mean_runtime_seconds; }));
}

}  // namespace

ExperimentConfig default_condition_rate_config() {
  ExperimentConfig cfg;
  for (Index m = 10; m <= 100; m += 10) cfg.m_grid.push_back(m);
  cfg.methods = {"lasso", "mcps2"};
  cfg.lambda_grid = log_spaced(1e-4, 1.0, 41);
  return cfg;
}

ExperimentConfig default_recovery_config() {
  ExperimentConfig cfg;
  for (Index m = 10; m <= 100; m += 10) cfg.m_grid.push_back(m);
  cfg.methods = {"lasso_admm", "mcps2_admm"};
  cfg.lambda_grid = log_spaced(1e-4, 1e-1, 13);
  return cfg;
}

std::uint64_t trial_seed(std::uint64_t master_seed, Index m, int trial) {
  return derive_seed(master_seed, static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(trial));
}

Json config_to_json(const ExperimentConfig& cfg) {
  Json j;
  j["n"] = cfg.base.n;
  j["k"] = cfg.base.k;
  j["d"] = cfg.base.d;
  j["magnitude_range"] = {cfg.base.magnitude_lo, cfg.base.magnitude_hi};
  j["ensemble"] = "gaussian N(0, 1/m)";
  j["m_grid"] = cfg.m_grid;
  j["trials_per_m"] = cfg.trials_per_m;
  j["methods"] = cfg.methods;
  j["lambda_grid"] = cfg.lambda_grid;
  j["noise_levels"] = cfg.noise_levels;
  j["master_seed"] = cfg.master_seed;
  j["trial_seed"] = "derive_seed(master_seed, m, trial)";
  j["pilot_seed"] = "derive_seed(mix64(master_seed ^ 0x70696c6f74), m, trial)";
  j["pilot_trials"] = cfg.pilot_trials;
  Json overrides = Json::object();
  for (const auto& [k, v] : cfg.lambda_override) overrides[k] = v;
  j["lambda_override"] = std::move(overrides);
  j["tau"] = cfg.tau_rel * cfg.base.d;
  j["solver"] = {{"rho", cfg.solver.rho ? Json(*cfg.solver.rho) : Json("max(1, 10 lambda)")},
                 {"max_iters", cfg.solver.max_iters},
                 {"tol_primal", cfg.solver.tol_primal ? Json(*cfg.solver.tol_primal)
                                                      : Json("1e-8 sqrt(n)")},
                 {"tol_dual", cfg.solver.tol_dual ? Json(*cfg.solver.tol_dual)
                                                  : Json("1e-8 sqrt(n)")}};
  j["oracle_grid_step"] = cfg.oracle_grid_step;
  j["init"] = cfg.init;
  return j;
}

ExperimentReport run_condition_rate_experiment(const ExperimentConfig& cfg, Execution exec) {
  check_common(cfg);
  if (cfg.lambda_grid.empty()) throw Error("lambda grid is empty");
  std::vector<CertificateMethod> methods;
  for (const auto& name : cfg.methods) {
    if (name == "lasso") methods.push_back(CertificateMethod::lasso);
    else if (name == "mcps2") methods.push_back(CertificateMethod::mcps2);
    else throw Error("unknown certificate method: " + name);
  }
  if (!(cfg.lambda_grid.front() > 0.0) ||
      !std::is_sorted(cfg.lambda_grid.begin(), cfg.lambda_grid.end()))
    throw Error("lambda grid must be positive and ascending");

  const auto items = work_items(cfg);
  const std::size_t nm = methods.size();
  std::vector<TrialRow> rows(items.size() * nm);
  for_each_item(items.size(), exec, [&](std::size_t i) {
    const auto& it = items[i];
    const std::uint64_t seed = trial_seed(cfg.master_seed, it.m, it.trial);
    const auto inst = generate_instance(instance_config(cfg, it.noise, it.m, seed));
    std::optional<SupportAnalysis> sa;
    std::string status = "ok";
    try {
      sa.emplace(inst);
    } catch (const RankDeficientError&) {
      status = "rank_deficient";
    }
    for (std::size_t j = 0; j < nm; ++j) {
      TrialRow& row = rows[i * nm + j];
      row.method = cfg.methods[j];
      row.noise = it.noise;
      row.m = it.m;
      row.trial = it.trial;
      row.seed = seed;
      row.fp = row.fn = row.l2 = kNaN;
      row.lambda = kNaN;
      row.status = status;
      if (!sa) continue;
      const auto start = std::chrono::steady_clock::now();
      for (const auto& v : lambda_feasible_range(*sa, inst, methods[j], cfg.lambda_grid))
        if (v.pass) {
          row.vsc = true;
          row.lambda = v.lambda;
          break;
        }
      row.runtime_seconds = seconds_since(start);
    }
  });

  ExperimentReport report;
  report.kind = "cond-rate";
  report.rows = std::move(rows);
  report.summary = aggregate(report.rows);
  report.config_echo = config_to_json(cfg);
  report.config_echo["success_rule"] = "any grid lambda passes the full certificate";
  return report;
}

ExperimentReport run_recovery_experiment(const ExperimentConfig& cfg, Execution exec) {
  check_common(cfg);
  for (const auto& name : cfg.methods)
    if (name != "lasso_admm" && name != "mcps2_admm" && name != "oracle")
      throw Error("unknown recovery method: " + name);
  if (!(cfg.tau_rel >= 0.0)) throw Error("tau must be nonnegative");
  if (cfg.init != "zero" && cfg.init != "candidate") throw Error("init must be zero or candidate");

  ExperimentReport report;
  report.kind = "recovery";
  for (double noise : cfg.noise_levels) {
    auto resolve = [&](const std::string& method) {
      const std::string key = lambda_key(method, noise);
      if (report.chosen_lambda.count(key)) return;
      double lambda;
      if (auto o = cfg.lambda_override.find(method); o != cfg.lambda_override.end()) {
        lambda = o->second;
      } else if (method == "oracle") {
        const std::string own = lambda_key("mcps2_admm", noise);
        if (!report.chosen_lambda.count(own)) {
          report.chosen_lambda[own] = cfg.lambda_override.count("mcps2_admm")
                                          ? cfg.lambda_override.at("mcps2_admm")
                                          : pilot_lambda(cfg, "mcps2_admm", noise, exec);
        }
        lambda = report.chosen_lambda.at(own);
      } else {
        lambda = pilot_lambda(cfg, method, noise, exec);
      }
      if (!(lambda > 0.0)) throw Error("lambda for " + method + " must be positive");
      report.chosen_lambda[key] = lambda;
    };
    for (const auto& method : cfg.methods)
      if (method != "oracle") resolve(method);
    for (const auto& method : cfg.methods)
      if (method == "oracle") resolve(method);
  }

  const auto items = work_items(cfg);
  const std::size_t nm = cfg.methods.size();
  const double tau = cfg.tau_rel * cfg.base.d;
  std::vector<TrialRow> rows(items.size() * nm);
  for_each_item(items.size(), exec, [&](std::size_t i) {
    const auto& it = items[i];
    const std::uint64_t seed = trial_seed(cfg.master_seed, it.m, it.trial);
    const auto inst = generate_instance(instance_config(cfg, it.noise, it.m, seed));
    for (std::size_t j = 0; j < nm; ++j) {
      TrialRow& row = rows[i * nm + j];
      row.method = cfg.methods[j];
      row.noise = it.noise;
      row.m = it.m;
      row.trial = it.trial;
      row.seed = seed;
      row.lambda = report.chosen_lambda.at(lambda_key(row.method, it.noise));
      try {
        const auto out = solve_with(row.method, inst, row.lambda, cfg);
        const auto s = score(out.x_hat, inst, tau);
        row.vsc = s.vsc;
        row.fp = s.false_positive_rate;
        row.fn = s.false_negative_rate;
        row.l2 = s.l2_error;
        row.runtime_seconds = out.runtime;
      } catch (const std::exception& e) {
        row.vsc = false;
        row.fp = row.fn = row.l2 = kNaN;
        row.status = std::string("error: ") + e.what();
        std::replace(row.status.begin(), row.status.end(), ',', ';');
      }
    }
  });

  report.rows = std::move(rows);
  report.summary = aggregate(report.rows);
  report.config_echo = config_to_json(cfg);
  Json chosen = Json::object();
  for (const auto& [k, v] : report.chosen_lambda) chosen[k] = v;
  report.config_echo["chosen_lambda"] = std::move(chosen);
  report.config_echo["lambda_selection"] =
      "pilot sweep over lambda_grid on held-out seeds, best exact-recovery count, ties to the "
      "smaller lambda; oracle reuses the mcps2_admm lambda";
  return report;
}

std::vector<SummaryRow> aggregate(const std::vector<TrialRow>& rows) {
  struct Acc {
    SummaryRow row;
    long hits = 0;
    std::vector<double> fp, fn, l2, runtime;
  };
  std::vector<Acc> groups;
  for (const auto& r : rows) {
    auto it = std::find_if(groups.begin(), groups.end(), [&](const Acc& a) {
      return a.row.method == r.method && a.row.noise == r.noise && a.row.m == r.m;
    });
    if (it == groups.end()) {
      Acc a;
      a.row.method = r.method;
      a.row.noise = r.noise;
      a.row.m = r.m;
      groups.push_back(std::move(a));
      it = groups.end() - 1;
    }
    ++it->row.trials;
    it->hits += r.vsc ? 1 : 0;
    it->fp.push_back(r.fp);
    it->fn.push_back(r.fn);
    it->l2.push_back(r.l2);
    if (r.status == "ok") it->runtime.push_back(r.runtime_seconds);
  }
  std::vector<SummaryRow> out;
  for (auto& a : groups) {
    a.row.rate = static_cast<double>(a.hits) / static_cast<double>(a.row.trials);
    a.row.fp_rate = finite_mean(a.fp);
    a.row.fn_rate = finite_mean(a.fn);
    a.row.mean_l2 = finite_mean(a.l2);
    a.row.mean_runtime_seconds = finite_mean(a.runtime);
    a.row.median_runtime_seconds = median(a.runtime);
    out.push_back(a.row);
  }
  return out;
}

void emit_report(const ExperimentReport& report, const std::filesystem::path& dir, bool emit_charts) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create " + dir.string() + ": " + ec.message());

  {
    auto out = open_for_writing(dir / "rows.csv");
    out << kRowsHeader << '\n';
    for (const auto& r : report.rows)
      out << r.method << ',' << fmt(r.noise) << ',' << r.m << ',' << r.trial << ',' << r.seed << ','
          << (r.vsc ? 1 : 0) << ',' << fmt(r.fp) << ',' << fmt(r.fn) << ',' << fmt(r.l2) << ','
          << fmt(r.lambda) << ',' << r.status << '\n';
    if (!out) throw Error("failed writing rows.csv");
  }
  {
    auto out = open_for_writing(dir / "timings.csv");
    out << kTimingsHeader << '\n';
    for (const auto& r : report.rows)
      out << r.method << ',' << fmt(r.noise) << ',' << r.m << ',' << r.trial << ','
          << fmt(r.runtime_seconds) << '\n';
    if (!out) throw Error("failed writing timings.csv");
  }
  {
    auto out = open_for_writing(dir / "summary.csv");
    out << kSummaryHeader << '\n';
    for (const auto& s : report.summary)
      out << s.method << ',' << fmt(s.noise) << ',' << s.m << ',' << s.trials << ',' << fmt(s.rate)
          << ',' << fmt(s.fp_rate) << ',' << fmt(s.fn_rate) << ',' << fmt(s.mean_l2) << ','
          << fmt(s.mean_runtime_seconds) << ',' << fmt(s.median_runtime_seconds) << '\n';
    if (!out) throw Error("failed writing summary.csv");
  }

  Json echo;
  echo["artifact_version"] = kArtifactVersion;
  echo["kind"] = report.kind;
  echo["config"] = report.config_echo;
  echo["assumptions"] = {
      "recovery setup defaults to n=100, k=5, d=1, magnitudes uniform in [0.5, 1]",
      "signs of the nonzeros are fair coin flips",
      "support threshold tau = tau_rel * d",
      "runtimes are wall-clock seconds per solve, excluding generation and I/O; kept in timings.csv "
      "so that rows.csv is reproducible byte for byte"};
  write_json(echo, dir / "config.echo");

  if (emit_charts) write_charts(report, dir);
}

std::vector<TrialRow> read_rows_csv(const std::filesystem::path& path) {
  std::vector<TrialRow> rows;
  for (const auto& c : read_csv(path, kRowsHeader)) {
    TrialRow r;
    r.method = c[0];
    r.noise = parse_real(c[1]);
    r.m = std::stol(c[2]);
    r.trial = std::stoi(c[3]);
    r.seed = std::stoull(c[4]);
    r.vsc = c[5] == "1";
    r.fp = parse_real(c[6]);
    r.fn = parse_real(c[7]);
    r.l2 = parse_real(c[8]);
    r.lambda = parse_real(c[9]);
    r.status = c[10];
    rows.push_back(std::move(r));
  }
  const auto timings = path.parent_path() / "timings.csv";
  if (std::filesystem::exists(timings)) {
    const auto t = read_csv(timings, kTimingsHeader);
    if (t.size() != rows.size()) throw Error("timings.csv does not match rows.csv");
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (t[i][0] != rows[i].method || std::stol(t[i][2]) != rows[i].m ||
          std::stoi(t[i][3]) != rows[i].trial)
        throw Error("timings.csv does not match rows.csv");
      rows[i].runtime_seconds = parse_real(t[i][4]);
    }
  }
  return rows;
}

std::vector<SummaryRow> read_summary_csv(const std::filesystem::path& path) {
  std::vector<SummaryRow> out;
  for (const auto& c : read_csv(path, kSummaryHeader)) {
    SummaryRow s;
    s.method = c[0];
    s.noise = parse_real(c[1]);
    s.m = std::stol(c[2]);
    s.trials = std::stoi(c[3]);
    s.rate = parse_real(c[4]);
    s.fp_rate = parse_real(c[5]);
    s.fn_rate = parse_real(c[6]);
    s.mean_l2 = parse_real(c[7]);
    s.mean_runtime_seconds = parse_real(c[8]);
    s.median_runtime_seconds = parse_real(c[9]);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace mcps
