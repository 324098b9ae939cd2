// mcps: instance generation, certificates, solvers and experiments.

#include "mcps/conditions.hpp"
#include "mcps/harness.hpp"
#include "mcps/metrics.hpp"
#include "mcps/problem.hpp"
#include "mcps/serialize.hpp"
#include "mcps/solvers.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <iostream>
#include <string>

namespace {

using namespace mcps;

void add_instance_family(CLI::App* app, GeneratorConfig& g) {
  app->add_option("--n", g.n, "signal dimension")->capture_default_str();
  app->add_option("--k", g.k, "support size")->capture_default_str();
  app->add_option("--d", g.d, "magnitude bound")->capture_default_str();
  app->add_option("--mag-lo", g.magnitude_lo, "smallest nonzero magnitude")->capture_default_str();
  app->add_option("--mag-hi", g.magnitude_hi, "largest nonzero magnitude")->capture_default_str();
}

struct LambdaGridFlags {
  std::vector<double> values;
  double lo = 0.0;
  double hi = 0.0;
  int count = 0;

  void add(CLI::App* app) {
    app->add_option("--lambda-grid", values, "explicit ascending lambda values");
    app->add_option("--lambda-lo", lo, "log grid lower end");
    app->add_option("--lambda-hi", hi, "log grid upper end");
    app->add_option("--lambda-count", count, "log grid size");
  }

  void apply(std::vector<double>& grid) const {
    if (!values.empty()) grid = values;
    else if (count > 0) grid = log_spaced(lo, hi, count);
  }
};

void print_row(const char* name, double value) { std::printf("  %-26s %.6g\n", name, value); }

void print_report(const CertificateReport& r) {
  std::printf("certificate at lambda = %.6g\n", r.lambda_used);
  print_row("mu", r.mu);
  print_row("irr constant", r.irr_constant);
  print_row("omega max", r.omega_max);
  print_row("lasso sign lhs", r.lasso_sign_lhs);
  print_row("lasso sign rhs", r.lasso_sign_rhs);
  print_row("lasso vsc lhs (< 1)", r.lasso_vsc_lhs);
  print_row("zeta inf", r.zeta_inf);
  print_row("lemma 1 lhs", r.lemma1_lhs);
  print_row("lemma 1 rhs", r.lemma1_rhs);
  print_row("q", r.q);
  print_row("c3 margin", r.c3_margin);
  print_row("theta", r.theta);
  print_row("alpha required", r.alpha_required);
  print_row("phi estimate", r.phi_estimate);
  print_row("global radius", r.global_radius);
  std::printf("  %-26s %s\n", "phi provenance", r.phi_provenance.c_str());
  auto verdict = [](const char* name, bool v) { std::printf("  %-26s %s\n", name, v ? "PASS" : "fail"); };
  verdict("lasso vsc", r.verdicts.lasso_vsc);
  verdict("lemma 1", r.verdicts.lemma1);
  verdict("c3 (epsilon -> 0)", r.verdicts.c3);
  verdict("c3 strict", r.verdicts.c3_strict);
  verdict("proposition 1 global", r.verdicts.prop1_global);
  verdict("corollary 1", r.verdicts.corollary1);
  for (const auto& note : r.notes) std::printf("  note: %s\n", note.c_str());
}

void print_summary(const ExperimentReport& report) {
  std::printf("%-12s %-8s %5s %7s %8s %8s %8s\n", "method", "noise", "m", "trials", "rate", "fp",
              "fn");
  for (const auto& s : report.summary)
    std::printf("%-12s %-8.3g %5ld %7d %8.3f %8.4f %8.4f\n", s.method.c_str(), s.noise,
                static_cast<long>(s.m), s.trials, s.rate, s.fp_rate, s.fn_rate);
  for (const auto& [key, lambda] : report.chosen_lambda)
    std::printf("lambda[%s] = %.6g\n", key.c_str(), lambda);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MCPS^2 and Lasso sparse recovery: certificates, solvers and experiments"};
  app.require_subcommand(1);

  // gen
  GeneratorConfig gen_cfg;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen", "generate a random instance");
  add_instance_family(gen, gen_cfg);
  gen->add_option("--m", gen_cfg.m, "number of measurements")->capture_default_str();
  gen->add_option("--noise", gen_cfg.noise_inf_bound, "noise infinity-norm")->capture_default_str();
  gen->add_option("--seed", gen_cfg.rng_seed, "generator seed")->capture_default_str();
  gen->add_option("-o,--output", gen_out, "instance JSON path")->required();

  // certify
  std::string cert_in;
  std::string cert_json;
  CertifyOptions cert_opts;
  double cert_phi = 0.0;
  auto* cert = app.add_subcommand("certify", "evaluate every certificate at one lambda");
  cert->add_option("-i,--instance", cert_in, "instance JSON path")->required();
  cert->add_option("--lambda", cert_opts.lambda)->capture_default_str();
  cert->add_option("--epsilon", cert_opts.epsilon)->capture_default_str();
  cert->add_option("--alpha", cert_opts.alpha)->capture_default_str();
  auto* phi_opt = cert->add_option("--phi", cert_phi, "RE constant; sampled when omitted");
  cert->add_option("--re-samples", cert_opts.re_samples)->capture_default_str();
  cert->add_option("--re-seed", cert_opts.re_seed)->capture_default_str();
  cert->add_option("--json", cert_json, "also write the report as JSON");

  // solve
  std::string solve_in;
  std::string solve_out;
  std::string solve_method = "mcps2";
  std::string solve_init = "zero";
  Hyperparams hp;
  double rho = 0.0;
  double tol_p = 0.0;
  double tol_d = 0.0;
  double grid_step = 1e-3;
  double tau_rel = 1e-3;
  auto* solve = app.add_subcommand("solve", "run one solver on an instance");
  solve->add_option("-i,--instance", solve_in, "instance JSON path")->required();
  solve->add_option("--method", solve_method)
      ->check(CLI::IsMember({"mcps2", "lasso", "oracle"}))
      ->capture_default_str();
  solve->add_option("--lambda", hp.lambda)->capture_default_str();
  auto* rho_opt = solve->add_option("--rho", rho, "ADMM penalty, default max(1, 10 lambda)");
  auto* tolp_opt = solve->add_option("--tol-primal", tol_p, "default 1e-8 sqrt(n)");
  auto* told_opt = solve->add_option("--tol-dual", tol_d, "default 1e-8 sqrt(n)");
  solve->add_option("--max-iters", hp.max_iters)->capture_default_str();
  solve->add_option("--grid-step", grid_step, "oracle tolerance step")->capture_default_str();
  solve->add_option("--init", solve_init, "ADMM start: zero or candidate")
      ->check(CLI::IsMember({"zero", "candidate"}))
      ->capture_default_str();
  solve->add_option("--tau-rel", tau_rel, "support threshold relative to d")->capture_default_str();
  solve->add_option("-o,--output", solve_out, "result JSON path");

  // experiment
  auto* exp = app.add_subcommand("experiment", "Monte Carlo experiments");
  exp->require_subcommand(1);

  ExperimentConfig cr_cfg = default_condition_rate_config();
  LambdaGridFlags cr_grid;
  bool cr_serial = false;
  auto* cr = exp->add_subcommand("cond-rate", "certificate rates versus m");
  add_instance_family(cr, cr_cfg.base);
  cr->add_option("--m-grid", cr_cfg.m_grid)->capture_default_str();
  cr->add_option("--trials", cr_cfg.trials_per_m)->capture_default_str();
  cr->add_option("--methods", cr_cfg.methods, "lasso, mcps2")->capture_default_str();
  cr->add_option("--noise", cr_cfg.noise_levels, "noise infinity-norms")->capture_default_str();
  cr->add_option("--seed", cr_cfg.master_seed)->capture_default_str();
  cr->add_option("-o,--output-dir", cr_cfg.output_dir)->required();
  cr->add_flag("--charts", cr_cfg.emit_charts, "write SVG charts");
  cr->add_flag("--serial", cr_serial, "single-threaded reference execution");
  cr_grid.add(cr);

  ExperimentConfig rec_cfg = default_recovery_config();
  LambdaGridFlags rec_grid;
  bool rec_serial = false;
  std::vector<std::string> overrides;
  double rec_rho = 0.0;
  auto* rec = exp->add_subcommand("recovery", "support recovery of the solvers versus m");
  add_instance_family(rec, rec_cfg.base);
  rec->add_option("--m-grid", rec_cfg.m_grid)->capture_default_str();
  rec->add_option("--trials", rec_cfg.trials_per_m)->capture_default_str();
  rec->add_option("--methods", rec_cfg.methods, "lasso_admm, mcps2_admm, oracle")
      ->capture_default_str();
  rec->add_option("--noise", rec_cfg.noise_levels, "noise infinity-norms")->capture_default_str();
  rec->add_option("--seed", rec_cfg.master_seed)->capture_default_str();
  rec->add_option("--pilot-trials", rec_cfg.pilot_trials)->capture_default_str();
  rec->add_option("--lambda", overrides, "fixed lambda per method, as method=value");
  rec->add_option("--tau-rel", rec_cfg.tau_rel)->capture_default_str();
  auto* rec_rho_opt = rec->add_option("--rho", rec_rho, "ADMM penalty");
  rec->add_option("--max-iters", rec_cfg.solver.max_iters)->capture_default_str();
  rec->add_option("--grid-step", rec_cfg.oracle_grid_step)->capture_default_str();
  rec->add_option("--init", rec_cfg.init)
      ->check(CLI::IsMember({"zero", "candidate"}))
      ->capture_default_str();
  rec->add_option("-o,--output-dir", rec_cfg.output_dir)->required();
  rec->add_flag("--charts", rec_cfg.emit_charts, "write SVG charts");
  rec->add_flag("--serial", rec_serial, "single-threaded reference execution");
  rec_grid.add(rec);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*gen) {
      const auto inst = generate_instance(gen_cfg);
      save_instance(inst, gen_out);
      std::printf("wrote %s (n=%ld, m=%ld, k=%ld, mu=%.4g)\n", gen_out.c_str(),
                  static_cast<long>(inst.n()), static_cast<long>(inst.m()),
                  static_cast<long>(inst.k()), inst.mu());
    } else if (*cert) {
      if (*phi_opt) cert_opts.phi = cert_phi;
      const auto report = certify(load_instance(cert_in), cert_opts);
      print_report(report);
      if (!cert_json.empty()) write_json(report_to_json(report), cert_json);
    } else if (*solve) {
      const auto inst = load_instance(solve_in);
      if (*rho_opt) hp.rho = rho;
      if (*tolp_opt) hp.tol_primal = tol_p;
      if (*told_opt) hp.tol_dual = tol_d;
      SolverResult r;
      if (solve_method == "oracle") {
        r = global_minimize_bruteforce(inst, hp.lambda, grid_step);
      } else {
        const bool concave = solve_method == "mcps2";
        std::optional<WarmStart> init;
        if (solve_init == "candidate") {
          const auto cand = candidate_minimizer(inst, hp.lambda);
          init = stationary_warm_start(inst, project_box(cand.x_star, inst.d()), hp.lambda, concave);
        }
        r = concave ? admm_mcps2(inst, hp, init) : admm_lasso(inst, hp, init);
      }
      const auto s = score(r.x_hat, inst, tau_rel * inst.d());
      std::printf("%s: objective %.12g, iterations %d, converged %s, %.4fs\n",
                  to_string(r.solver_id).c_str(), r.objective, r.iterations,
                  r.converged ? "yes" : "no", r.runtime_seconds);
      std::printf("support exact %s, fp %.4f, fn %.4f, l2 error %.4g\n", s.vsc ? "yes" : "no",
                  s.false_positive_rate, s.false_negative_rate, s.l2_error);
      if (!solve_out.empty()) write_json(result_to_json(r), solve_out);
    } else if (*cr) {
      cr_grid.apply(cr_cfg.lambda_grid);
      const auto report =
          run_condition_rate_experiment(cr_cfg, cr_serial ? Execution::serial : Execution::parallel);
      emit_report(report, cr_cfg.output_dir, cr_cfg.emit_charts);
      print_summary(report);
    } else if (*rec) {
      rec_grid.apply(rec_cfg.lambda_grid);
      if (*rec_rho_opt) rec_cfg.solver.rho = rec_rho;
      for (const auto& o : overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos) throw Error("--lambda expects method=value, got " + o);
        rec_cfg.lambda_override[o.substr(0, eq)] = std::stod(o.substr(eq + 1));
      }
      const auto report =
          run_recovery_experiment(rec_cfg, rec_serial ? Execution::serial : Execution::parallel);
      emit_report(report, rec_cfg.output_dir, rec_cfg.emit_charts);
      print_summary(report);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
