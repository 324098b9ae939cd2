#pragma once

#include "mcps/linalg.hpp"

#include <cstdint>

namespace mcps {

/// Noisy linear measurement model y = A x_true + eta with a k-sparse,
/// magnitude-bounded signal. Immutable after construction.
class ProblemInstance {
public:
  /// Validates the sparsity and magnitude invariants and assembles y.
  /// The support is read off the nonzeros of x_true.
  ProblemInstance(Matrix A, Vector x_true, Vector eta, double d, std::uint64_t seed = 0);

  /// Loading path: y is taken as given and checked against A x_true + eta.
  ProblemInstance(Matrix A, Vector x_true, Vector eta, Vector y, double d, std::uint64_t seed);

  const Matrix& A() const { return A_; }
  const Vector& x_true() const { return x_true_; }
  const Vector& eta() const { return eta_; }
  const Vector& y() const { return y_; }
  const IndexSet& support() const { return support_; }
  const IndexSet& off_support() const { return off_support_; }
  double d() const { return d_; }
  std::uint64_t seed() const { return seed_; }

  Index n() const { return A_.cols(); }
  Index m() const { return A_.rows(); }
  Index k() const { return static_cast<Index>(support_.size()); }
  /// min_{i in S} |x_true_i|.
  double min_magnitude() const { return min_magnitude_; }
  /// min_{i in S} |x_true_i| / d, in (0, 1].
  double mu() const { return min_magnitude_ / d_; }
  bool noise_free() const { return eta_.lpNorm<Eigen::Infinity>() == 0.0; }

  /// A_S and A_Sbar.
  Matrix A_support() const;
  Matrix A_off_support() const;

private:
  void validate();

  Matrix A_;
  Vector x_true_;
  Vector eta_;
  Vector y_;
  IndexSet support_;
  IndexSet off_support_;
  double d_;
  double min_magnitude_ = 0.0;
  std::uint64_t seed_;
};

enum class Ensemble { gaussian_inv_m };

struct GeneratorConfig {
  Index n = 100;
  Index m = 40;
  Index k = 5;
  double d = 1.0;
  double magnitude_lo = 0.5;
  double magnitude_hi = 1.0;
  double noise_inf_bound = 0.0;
  std::uint64_t rng_seed = 0;
  Ensemble ensemble = Ensemble::gaussian_inv_m;
};

/// Draws A with i.i.d. N(0, 1/m) entries, a uniform random k-subset support,
/// magnitudes uniform in [lo, hi] with fair-coin signs, and noise made of
/// uniform[-1, 1] entries rescaled to the exact infinity-norm bound.
ProblemInstance generate_instance(const GeneratorConfig& cfg);

/// m x |idx| submatrix of the columns in idx, in idx order.
Matrix restrict_columns(const Matrix& A, const IndexSet& idx);

/// 1/2 ||y - A x||^2 + lambda (d ||x||_1 - 1/2 ||x||^2).
double objective_mcps2(const Vector& x, const ProblemInstance& inst, double lambda);
/// 1/2 ||y - A x||^2 + lambda ||x||_1.
double objective_lasso(const Vector& x, const ProblemInstance& inst, double lambda);

/// Both objectives are defined on [-d, d]^n; evaluation outside is allowed and
/// flagged by this predicate.
bool in_box(const Vector& x, double d);

}  // namespace mcps
