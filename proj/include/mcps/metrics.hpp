#pragma once

#include "mcps/problem.hpp"

namespace mcps {

struct RecoveryScore {
  bool vsc = false;                ///< estimated support equals the true support
  double false_positive_rate = 0;  ///< true zeros estimated nonzero, over n - k
  double false_negative_rate = 0;  ///< true nonzeros estimated zero, over k
  double l2_error = 0;
};

/// Support of x_hat is {i : |x_hat_i| > tau}.
RecoveryScore score(const Vector& x_hat, const ProblemInstance& inst, double tau);

IndexSet estimated_support(const Vector& x_hat, double tau);

}  // namespace mcps
