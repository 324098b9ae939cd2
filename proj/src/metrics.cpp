#include "mcps/metrics.hpp"

#include <cmath>

namespace mcps {

IndexSet estimated_support(const Vector& x_hat, double tau) {
  IndexSet out;
  for (Index i = 0; i < x_hat.size(); ++i)
    if (std::abs(x_hat(i)) > tau) out.push_back(i);
  return out;
}

RecoveryScore score(const Vector& x_hat, const ProblemInstance& inst, double tau) {
  if (x_hat.size() != inst.n()) throw Error("score: dimension mismatch");
  if (!(tau >= 0.0)) throw Error("score: threshold must be nonnegative");
  const Index n = inst.n();
  const Index k = inst.k();
  if (k == 0) throw Error("score: true support is empty");

  Index false_pos = 0;
  Index false_neg = 0;
  for (Index i = 0; i < n; ++i) {
    const bool truth = inst.x_true()(i) != 0.0;
    const bool est = std::abs(x_hat(i)) > tau;
    if (est && !truth) ++false_pos;
    if (!est && truth) ++false_neg;
  }
  RecoveryScore s;
  s.vsc = false_pos == 0 && false_neg == 0;
  s.false_positive_rate = n > k ? static_cast<double>(false_pos) / static_cast<double>(n - k) : 0.0;
  s.false_negative_rate = static_cast<double>(false_neg) / static_cast<double>(k);
  s.l2_error = (x_hat - inst.x_true()).norm();
  return s;
}

}  // namespace mcps
