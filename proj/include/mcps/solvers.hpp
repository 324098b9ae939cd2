#pragma once

#include "mcps/hyperparams.hpp"
#include "mcps/problem.hpp"

#include <optional>
#include <string>

namespace mcps {

// ---- proximal primitives ---------------------------------------------------

/// sign(v) max(|v| - a, 0): the proximal map of a |.|.
double soft_threshold(double v, double a);
Vector soft_threshold(const Vector& v, double a);

/// Clamp onto [-d, d].
double project_box(double v, double d);
Vector project_box(const Vector& v, double d);

// ---- solver results ------------------------------------------------------------

struct WarmStart {
  Vector z0;
  Vector u0;
};

enum class SolverId { admm_mcps2, admm_lasso, oracle };

std::string to_string(SolverId id);
SolverId solver_id_from_string(const std::string& s);

struct SolverResult {
  Vector x_hat;
  int iterations = 0;
  double primal_residual = 0.0;  ///< ||x_t - z_t||_2
  double dual_residual = 0.0;    ///< rho ||z_t - z_{t-1}||_2
  double objective = 0.0;
  double runtime_seconds = 0.0;
  bool converged = false;
  SolverId solver_id = SolverId::admm_mcps2;
  double lambda = 0.0;
  double rho = 0.0;
  /// Oracle only: Lipschitz bound L of F on the box and the grid tolerance L * grid_step.
  double lipschitz_bound = 0.0;
  double objective_tolerance = 0.0;
};

// ---- ADMM ----------------------------------------------------------------------

/// One ADMM splitting of
///   1/2 ||y - A x||^2 - (c/2) ||x||^2 + w ||z||_1 + I_box(z),  x = z,
/// with c = lambda, w = lambda d for MCPS^2 and c = 0, w = lambda for Lasso.
/// The x-update matrix A^T A + (rho - c) I is factored once.
class AdmmIteration {
public:
  AdmmIteration(const ProblemInstance& inst, double concave_weight, double l1_weight, double rho,
                const std::optional<WarmStart>& init);

  struct Residuals {
    double primal;
    double dual;
  };

  /// x_t = M^{-1}(A^T y + rho z_{t-1} - u_{t-1}); z_t = P(S_{w/rho}(x_t + u_{t-1}/rho));
  /// u_t = u_{t-1} + rho (x_t - z_t).
  Residuals step();

  const Vector& x() const { return x_; }
  const Vector& z() const { return z_; }
  const Vector& u() const { return u_; }
  /// Right-hand side of the next x-update.
  Vector x_update_rhs() const { return Aty_ + rho_ * z_ - u_; }
  /// The x-update system matrix.
  const Matrix& system_matrix() const { return system_; }

private:
  Matrix system_;
  Eigen::LLT<Matrix> factor_;
  Vector Aty_;
  Vector x_;
  Vector z_;
  Vector u_;
  double threshold_;
  double rho_;
  double d_;
};

/// ADMM for MCPS^2. Returns the box-projected z-iterate. Requires rho > lambda.
SolverResult admm_mcps2(const ProblemInstance& inst, const Hyperparams& hp,
                        const std::optional<WarmStart>& init = std::nullopt);

/// ADMM for the box-constrained Lasso.
SolverResult admm_lasso(const ProblemInstance& inst, const Hyperparams& hp,
                        const std::optional<WarmStart>& init = std::nullopt);

/// (z0, u0) = (x, -grad) where grad is the gradient of the smooth part at x,
/// which makes (x, x, u0) an ADMM fixed point whenever x is first-order stationary.
WarmStart stationary_warm_start(const ProblemInstance& inst, const Vector& x, double lambda,
                                bool concave);

// ---- small-instance global oracle ------------------------------------------------

inline constexpr Index kOracleMaxDimension = 12;

/// Global minimum of the MCPS^2 objective over [-d, d]^n for n <= 12.
///
/// On every sign cell the objective is a quadratic, so a global minimizer is a
/// stationary point of that quadratic on some face of the cell: each coordinate
/// is either 0, +-d, or free with the reduced Hessian positive definite. All such
/// faces are enumerated (5^n in the worst case, pruned by Hessian definiteness).
/// grid_step sets the reported tolerance L * grid_step.
SolverResult global_minimize_bruteforce(const ProblemInstance& inst, double lambda,
                                        double grid_step);

/// Minimizer of the MCPS^2 objective restricted to the true support (a k-vector),
/// by proximal gradient over [-d, d]^k. Requires lambda < lambda_min(A_S^T A_S).
Vector solve_restricted_convex(const ProblemInstance& inst, double lambda);

}  // namespace mcps
