#pragma once

#include "mcps/linalg.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace mcps {

/// Regularization, certificate, and ADMM settings.
struct Hyperparams {
  double lambda = 1e-2;
  /// ADMM penalty; max(1, 10 lambda) when unset. Must exceed lambda for MCPS^2.
  std::optional<double> rho;
  /// Perturbation radius for the strict C3 test and the global test.
  double epsilon = 1e-3;
  /// RE cone opening.
  double alpha = 3.0;
  std::int64_t re_samples = 10000;
  std::vector<double> lambda_grid;
  int max_iters = 10000;
  /// ADMM residual tolerances; 1e-8 sqrt(n) when unset.
  std::optional<double> tol_primal;
  std::optional<double> tol_dual;

  double resolved_rho() const;
  double resolved_tol_primal(Index n) const;
  double resolved_tol_dual(Index n) const;
};

}  // namespace mcps
