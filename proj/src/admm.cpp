#include "mcps/solvers.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace mcps {

double Hyperparams::resolved_rho() const { return rho.value_or(std::max(1.0, 10.0 * lambda)); }

double Hyperparams::resolved_tol_primal(Index n) const {
  return tol_primal.value_or(1e-8 * std::sqrt(static_cast<double>(n)));
}

double Hyperparams::resolved_tol_dual(Index n) const {
  return tol_dual.value_or(1e-8 * std::sqrt(static_cast<double>(n)));
}

std::string to_string(SolverId id) {
  switch (id) {
    case SolverId::admm_mcps2: return "admm_mcps2";
    case SolverId::admm_lasso: return "admm_lasso";
    case SolverId::oracle: return "oracle";
  }
  return "unknown";
}

SolverId solver_id_from_string(const std::string& s) {
  if (s == "admm_mcps2") return SolverId::admm_mcps2;
  if (s == "admm_lasso") return SolverId::admm_lasso;
  if (s == "oracle") return SolverId::oracle;
  throw Error("unknown solver id: " + s);
}

AdmmIteration::AdmmIteration(const ProblemInstance& inst, double concave_weight, double l1_weight,
                             double rho, const std::optional<WarmStart>& init)
    : threshold_(l1_weight / rho), rho_(rho), d_(inst.d()) {
  const Index n = inst.n();
  system_ = inst.A().transpose() * inst.A();
  system_.diagonal().array() += rho - concave_weight;
  factor_.compute(system_);
  if (factor_.info() != Eigen::Success) throw Error("ADMM x-update matrix is not positive definite");
  Aty_ = inst.A().transpose() * inst.y();
  if (init) {
    if (init->z0.size() != n || init->u0.size() != n) throw Error("warm start dimension mismatch");
    z_ = init->z0;
    u_ = init->u0;
  } else {
    z_ = Vector::Zero(n);
    u_ = Vector::Zero(n);
  }
  x_ = z_;
}

AdmmIteration::Residuals AdmmIteration::step() {
  x_ = factor_.solve(x_update_rhs());
  Vector z_next = (x_ + u_ / rho_).unaryExpr(
      [this](double v) { return project_box(soft_threshold(v, threshold_), d_); });
  u_ += rho_ * (x_ - z_next);
  const Residuals r{(x_ - z_next).norm(), rho_ * (z_next - z_).norm()};
  z_ = std::move(z_next);
  return r;
}

namespace {

SolverResult run_admm(const ProblemInstance& inst, const Hyperparams& settings,
                      const std::optional<WarmStart>& init, bool concave) {
  const auto start = std::chrono::steady_clock::now();
  const double lambda = settings.lambda;
  const double rho = settings.resolved_rho();
  if (!(lambda > 0.0)) throw Error("lambda must be positive");
  if (concave && !(rho > lambda)) throw Error("ADMM for MCPS^2 requires rho > lambda");
  if (!concave && !(rho > 0.0)) throw Error("rho must be positive");
  if (settings.max_iters < 1) throw Error("max_iters must be positive");

  const Index n = inst.n();
  const double tol_p = settings.resolved_tol_primal(n);
  const double tol_d = settings.resolved_tol_dual(n);
  AdmmIteration it(inst, concave ? lambda : 0.0, concave ? lambda * inst.d() : lambda, rho, init);

  SolverResult out;
  out.solver_id = concave ? SolverId::admm_mcps2 : SolverId::admm_lasso;
  out.lambda = lambda;
  out.rho = rho;
  for (int t = 1; t <= settings.max_iters; ++t) {
    const auto r = it.step();
    out.iterations = t;
    out.primal_residual = r.primal;
    out.dual_residual = r.dual;
    if (r.primal <= tol_p && r.dual <= tol_d) {
      out.converged = true;
      break;
    }
  }
  out.x_hat = it.z();
  out.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.objective = concave ? objective_mcps2(out.x_hat, inst, lambda)
                          : objective_lasso(out.x_hat, inst, lambda);
  return out;
}

}  // namespace

SolverResult admm_mcps2(const ProblemInstance& inst, const Hyperparams& settings,
                        const std::optional<WarmStart>& init) {
  return run_admm(inst, settings, init, true);
}

SolverResult admm_lasso(const ProblemInstance& inst, const Hyperparams& settings,
                        const std::optional<WarmStart>& init) {
  return run_admm(inst, settings, init, false);
}

WarmStart stationary_warm_start(const ProblemInstance& inst, const Vector& x, double lambda,
                                bool concave) {
  if (x.size() != inst.n()) throw Error("warm start dimension mismatch");
  Vector grad = inst.A().transpose() * (inst.A() * x - inst.y());
  if (concave) grad -= lambda * x;
  return {x, -grad};
}

}  // namespace mcps
