#include "mcps/problem.hpp"

#include "mcps/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mcps {

ProblemInstance::ProblemInstance(Matrix A, Vector x_true, Vector eta, double d, std::uint64_t seed)
    : A_(std::move(A)), x_true_(std::move(x_true)), eta_(std::move(eta)), d_(d), seed_(seed) {
  if (A_.cols() != x_true_.size() || A_.rows() != eta_.size())
    throw Error("instance dimension mismatch");
  y_ = A_ * x_true_ + eta_;
  validate();
}

ProblemInstance::ProblemInstance(Matrix A, Vector x_true, Vector eta, Vector y, double d,
                                 std::uint64_t seed)
    : A_(std::move(A)),
      x_true_(std::move(x_true)),
      eta_(std::move(eta)),
      y_(std::move(y)),
      d_(d),
      seed_(seed) {
  if (A_.cols() != x_true_.size() || A_.rows() != eta_.size() || A_.rows() != y_.size())
    throw Error("instance dimension mismatch");
  const Vector rebuilt = A_ * x_true_ + eta_;
  const double scale = 1.0 + rebuilt.lpNorm<Eigen::Infinity>();
  if ((rebuilt - y_).lpNorm<Eigen::Infinity>() > 1e-12 * scale)
    throw Error("y does not match A x_true + eta");
  validate();
}

void ProblemInstance::validate() {
  if (!(d_ > 0.0)) throw Error("magnitude bound d must be positive");
  support_.clear();
  for (Index i = 0; i < x_true_.size(); ++i) {
    if (x_true_(i) != 0.0) support_.push_back(i);
  }
  if (support_.empty()) throw Error("true signal has empty support");
  if (k() > m()) throw Error("support size exceeds the number of measurements");
  min_magnitude_ = std::abs(x_true_(support_.front()));
  for (Index i : support_) {
    const double a = std::abs(x_true_(i));
    if (a > d_) throw Error("nonzero entry exceeds the magnitude bound d");
    min_magnitude_ = std::min(min_magnitude_, a);
  }
  off_support_ = complement(support_, n());
}

Matrix ProblemInstance::A_support() const { return restrict_columns(A_, support_); }
Matrix ProblemInstance::A_off_support() const { return restrict_columns(A_, off_support_); }

ProblemInstance generate_instance(const GeneratorConfig& cfg) {
  if (cfg.n <= 0 || cfg.m <= 0 || cfg.k <= 0) throw Error("dimensions must be positive");
  if (cfg.k > cfg.m || cfg.k > cfg.n) throw Error("k must not exceed m or n");
  if (!(cfg.d > 0.0)) throw Error("magnitude bound d must be positive");
  if (!(cfg.magnitude_lo > 0.0) || cfg.magnitude_lo > cfg.magnitude_hi || cfg.magnitude_hi > cfg.d)
    throw Error("magnitude range must satisfy 0 < lo <= hi <= d");
  if (!(cfg.noise_inf_bound >= 0.0)) throw Error("noise bound must be nonnegative");

  Rng rng(cfg.rng_seed);
  const double sd = 1.0 / std::sqrt(static_cast<double>(cfg.m));
  Matrix A(cfg.m, cfg.n);
  for (Index j = 0; j < cfg.n; ++j)
    for (Index i = 0; i < cfg.m; ++i) A(i, j) = sd * rng.normal();

  // Partial Fisher-Yates: the first k slots form a uniform k-subset.
  std::vector<Index> perm(static_cast<std::size_t>(cfg.n));
  std::iota(perm.begin(), perm.end(), Index{0});
  for (Index i = 0; i < cfg.k; ++i) {
    const auto j = i + static_cast<Index>(rng.below(static_cast<std::uint64_t>(cfg.n - i)));
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }
  IndexSet support(perm.begin(), perm.begin() + cfg.k);
  std::sort(support.begin(), support.end());

  Vector x = Vector::Zero(cfg.n);
  for (Index i : support) {
    const double magnitude = rng.uniform(cfg.magnitude_lo, cfg.magnitude_hi);
    x(i) = rng.sign() * magnitude;
  }

  Vector eta = Vector::Zero(cfg.m);
  if (cfg.noise_inf_bound > 0.0) {
    for (Index i = 0; i < cfg.m; ++i) eta(i) = rng.uniform(-1.0, 1.0);
    const double peak = eta.lpNorm<Eigen::Infinity>();
    if (peak > 0.0) {
      eta *= cfg.noise_inf_bound / peak;
      // Pin the extreme entry so the bound holds exactly after rounding.
      Index arg = 0;
      eta.cwiseAbs().maxCoeff(&arg);
      eta(arg) = std::copysign(cfg.noise_inf_bound, eta(arg));
    }
  }
  return ProblemInstance(std::move(A), std::move(x), std::move(eta), cfg.d, cfg.rng_seed);
}

Matrix restrict_columns(const Matrix& A, const IndexSet& idx) {
  if (idx.empty()) throw Error("column index set is empty");
  Matrix out(A.rows(), static_cast<Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) {
    if (idx[j] < 0 || idx[j] >= A.cols()) throw Error("column index out of range");
    out.col(static_cast<Index>(j)) = A.col(idx[j]);
  }
  return out;
}

namespace {

void check_dims(const Vector& x, const ProblemInstance& inst) {
  if (x.size() != inst.n()) throw Error("objective: dimension mismatch");
}

}  // namespace

double objective_mcps2(const Vector& x, const ProblemInstance& inst, double lambda) {
  check_dims(x, inst);
  const double fit = 0.5 * (inst.y() - inst.A() * x).squaredNorm();
  return fit + lambda * (inst.d() * x.lpNorm<1>() - 0.5 * x.squaredNorm());
}

double objective_lasso(const Vector& x, const ProblemInstance& inst, double lambda) {
  check_dims(x, inst);
  return 0.5 * (inst.y() - inst.A() * x).squaredNorm() + lambda * x.lpNorm<1>();
}

bool in_box(const Vector& x, double d) { return x.size() == 0 || x.lpNorm<Eigen::Infinity>() <= d; }

}  // namespace mcps
