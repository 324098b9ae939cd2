#include "mcps/conditions.hpp"

#include "mcps/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mcps {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Matrix off_support_columns(const ProblemInstance& inst) {
  if (inst.off_support().empty()) return Matrix(inst.m(), 0);
  return inst.A_off_support();
}

// Everything the MCPS^2 certificates need at one lambda.
struct LocalQuantities {
  Vector x_S;
  bool sign_consistent = false;
  bool in_box = false;
  double lemma1_lhs = 0.0;
  double lemma1_rhs = 0.0;
  double q = 0.0;
};

LocalQuantities local_quantities(const SupportAnalysis& sa, double lambda) {
  if (!(lambda > 0.0)) throw Error("lambda must be positive");
  if (lambda >= sa.gram_min_eig)
    throw ConvexityError("lambda must be below the smallest eigenvalue of A_S^T A_S");
  const Matrix shifted = sa.gram - lambda * Matrix::Identity(sa.k, sa.k);
  const Matrix shifted_inv = spd_inverse(shifted);

  LocalQuantities out;
  const Vector bracket = lambda * sa.x_S - lambda * sa.d * sa.sign_S + sa.AtS_eta;
  out.x_S = sa.x_S + shifted_inv * bracket;
  out.sign_consistent = (sign(out.x_S).array() == sa.sign_S.array()).all();
  out.in_box = out.x_S.lpNorm<Eigen::Infinity>() <= sa.d;

  const double perturbation = lambda * sa.d * (1.0 - sa.mu) + sa.AtS_eta_inf;
  out.lemma1_lhs = norm_inf(shifted_inv) * perturbation;
  out.lemma1_rhs = sa.mu * sa.d;
  out.q = lambda * sa.d - sa.irr * norm_inf(sa.gram * shifted_inv) * perturbation -
          sa.AtSbar_eta_inf;
  return out;
}

bool mcps2_limit_pass(const LocalQuantities& lq) {
  return lq.lemma1_lhs <= lq.lemma1_rhs && lq.in_box && lq.sign_consistent && lq.q > 0.0;
}

Vector scatter(const Vector& values, const IndexSet& idx, Index n) {
  Vector out = Vector::Zero(n);
  for (std::size_t j = 0; j < idx.size(); ++j) out(idx[j]) = values(static_cast<Index>(j));
  return out;
}

}  // namespace

SupportAnalysis::SupportAnalysis(const ProblemInstance& inst)
    : A_S(inst.A_support()),
      A_Sbar(off_support_columns(inst)),
      d(inst.d()),
      mu(inst.mu()),
      min_magnitude(inst.min_magnitude()),
      k(inst.k()),
      noise_free(inst.noise_free()) {
  if (!full_column_rank(A_S)) throw RankDeficientError("A_S does not have full column rank");
  gram = A_S.transpose() * A_S;
  gram_min_eig = min_eigenvalue(gram);

  const Eigen::HouseholderQR<Matrix> qr(A_S);
  pinv_times_off = qr.solve(A_Sbar);
  irr = norm_1(pinv_times_off);
  gram_inv_norm_inf = norm_inf(spd_inverse(gram));

  AtS_eta = A_S.transpose() * inst.eta();
  AtS_eta_inf = AtS_eta.lpNorm<Eigen::Infinity>();
  const Vector projected = A_S * qr.solve(inst.eta());
  zeta = A_Sbar.transpose() * (projected - inst.eta());
  zeta_inf = zeta.size() == 0 ? 0.0 : zeta.lpNorm<Eigen::Infinity>();
  const Vector AtSbar_eta = A_Sbar.transpose() * inst.eta();
  AtSbar_eta_inf = AtSbar_eta.size() == 0 ? 0.0 : AtSbar_eta.lpNorm<Eigen::Infinity>();

  x_S = restrict_vector(inst.x_true(), inst.support());
  sign_S = sign(x_S);
}

double irr_constant(const Matrix& A, const IndexSet& S) {
  const Matrix A_S = restrict_columns(A, S);
  if (!full_column_rank(A_S)) throw RankDeficientError("A_S does not have full column rank");
  const IndexSet Sbar = complement(S, A.cols());
  if (Sbar.empty()) return 0.0;
  const Eigen::HouseholderQR<Matrix> qr(A_S);
  return norm_1(qr.solve(restrict_columns(A, Sbar)));
}

LassoVsc lasso_vsc_certificate(const SupportAnalysis& sa, double lambda) {
  if (!(lambda > 0.0)) throw Error("lambda must be positive");
  LassoVsc out;
  out.sign_lhs = sa.gram_inv_norm_inf * (sa.AtS_eta_inf + lambda);
  out.sign_bound = out.sign_lhs <= sa.min_magnitude;
  out.zeta_inf = sa.zeta_inf;
  out.vsc_lhs = sa.irr + sa.zeta_inf / lambda;
  out.irr_bound = out.vsc_lhs < 1.0;
  out.pass = out.sign_bound && out.irr_bound;
  return out;
}

LassoVsc lasso_vsc_certificate(const ProblemInstance& inst, double lambda) {
  return lasso_vsc_certificate(SupportAnalysis(inst), lambda);
}

bool kkt_check_lasso(const Vector& x, const ProblemInstance& inst, double lambda, double tol) {
  if (x.size() != inst.n()) throw Error("kkt_check_lasso: dimension mismatch");
  const Vector g = inst.A().transpose() * (inst.A() * x - inst.y());
  const double d = inst.d();
  for (Index i = 0; i < x.size(); ++i) {
    const double xi = x(i);
    if (xi >= d) {
      if (g(i) + lambda > tol) return false;
    } else if (xi <= -d) {
      if (g(i) - lambda < -tol) return false;
    } else if (xi != 0.0) {
      if (std::abs(g(i) + lambda * (xi > 0.0 ? 1.0 : -1.0)) > tol) return false;
    } else if (std::abs(g(i)) > lambda + tol) {
      return false;
    }
  }
  return true;
}

CandidateMinimizer candidate_minimizer(const SupportAnalysis& sa, const IndexSet& support, Index n,
                                       double lambda) {
  const LocalQuantities lq = local_quantities(sa, lambda);
  return {scatter(lq.x_S, support, n), lq.sign_consistent, lq.in_box};
}

CandidateMinimizer candidate_minimizer(const ProblemInstance& inst, double lambda) {
  return candidate_minimizer(SupportAnalysis(inst), inst.support(), inst.n(), lambda);
}

Lemma1 lemma1(const SupportAnalysis& sa, double lambda) {
  const LocalQuantities lq = local_quantities(sa, lambda);
  return {lq.lemma1_lhs <= lq.lemma1_rhs, lq.lemma1_lhs, lq.lemma1_rhs};
}

bool lemma1_check(const ProblemInstance& inst, double lambda) {
  return lemma1(SupportAnalysis(inst), lambda).pass;
}

double corollary1_lambda_bound(double irr, double phi, Index k) {
  if (irr == 0.0) return phi;
  const double omega = 1.0 / irr;
  return omega * phi / (6.0 * std::sqrt(static_cast<double>(k)) + omega);
}

Verdicts recompute_verdicts(const CertificateReport& r) {
  Verdicts v;
  v.lasso_vsc = r.lasso_sign_lhs <= r.lasso_sign_rhs && r.lasso_vsc_lhs < 1.0;
  v.lemma1 = r.lemma1_lhs <= r.lemma1_rhs;
  v.c3 = v.lemma1 && r.candidate_in_box && r.candidate_sign_consistent && r.q > 0.0;
  v.c3_strict = v.c3 && r.q > r.c3_margin;
  v.prop1_global = r.theta < r.lambda_used * r.d && r.phi_estimate > r.lambda_used &&
                   r.global_radius <= r.epsilon;
  v.corollary1 = r.noise_free && r.mu == 1.0 && r.phi_estimate > r.lambda_used &&
                 r.lambda_used < corollary1_lambda_bound(r.irr_constant, r.phi_estimate, r.k);
  return v;
}

namespace {

void fill_local(CertificateReport& r, const SupportAnalysis& sa, const ProblemInstance& inst,
                double lambda, double epsilon, double alpha) {
  r.lambda_used = lambda;
  r.epsilon = epsilon;
  r.alpha = alpha;
  r.d = sa.d;
  r.mu = sa.mu;
  r.k = sa.k;
  r.noise_free = sa.noise_free;
  r.irr_constant = sa.irr;
  r.omega_max = sa.irr > 0.0 ? 1.0 / sa.irr : kInf;
  r.zeta_inf = sa.zeta_inf;
  r.c3_margin = lambda * epsilon * (1.0 + alpha) / alpha;
  try {
    const LocalQuantities lq = local_quantities(sa, lambda);
    r.lemma1_lhs = lq.lemma1_lhs;
    r.lemma1_rhs = lq.lemma1_rhs;
    r.q = lq.q;
    r.candidate_in_box = lq.in_box;
    r.candidate_sign_consistent = lq.sign_consistent;
    r.x_star = scatter(lq.x_S, inst.support(), inst.n());
    if (!lq.in_box) r.notes.emplace_back("candidate minimizer leaves the box; C3 fails closed");
    if (lq.lemma1_lhs > lq.lemma1_rhs) r.notes.emplace_back("Lemma 1 bound fails; C3 fails closed");
  } catch (const ConvexityError&) {
    r.lemma1_lhs = kNaN;
    r.lemma1_rhs = sa.mu * sa.d;
    r.q = kNaN;
    r.candidate_in_box = false;
    r.candidate_sign_consistent = false;
    r.notes.emplace_back("lambda >= lambda_min(A_S^T A_S): restricted problem is not convex");
  }
}

}  // namespace

CertificateReport mcps2_local_certificate(const ProblemInstance& inst, double lambda,
                                          double epsilon, double alpha) {
  if (!(epsilon > 0.0) || !(alpha > 0.0)) throw Error("epsilon and alpha must be positive");
  const SupportAnalysis sa(inst);
  CertificateReport r;
  fill_local(r, sa, inst, lambda, epsilon, alpha);
  r.lasso_sign_rhs = sa.min_magnitude;
  r.theta = kNaN;
  r.alpha_required = kNaN;
  r.global_radius = kNaN;
  r.verdicts = recompute_verdicts(r);
  return r;
}

GlobalCertificate mcps2_global_certificate(const ProblemInstance& inst, double lambda,
                                           const Vector& x_star, double phi, double epsilon) {
  if (x_star.size() != inst.n()) throw Error("x_star has the wrong dimension");
  GlobalCertificate out;
  const double lambda_d = lambda * inst.d();
  out.theta = (inst.A().transpose() * (inst.y() - inst.A() * x_star)).lpNorm<Eigen::Infinity>();
  out.alpha_required =
      out.theta < lambda_d ? (2.0 * lambda_d + out.theta) / (lambda_d - out.theta) : kInf;
  out.global_radius = phi > lambda ? 2.0 * (out.theta + 2.0 * lambda_d) *
                                         std::sqrt(static_cast<double>(inst.k())) / (phi - lambda)
                                   : kInf;
  if (!(out.theta < lambda_d)) {
    out.reason = "theta >= lambda d";
  } else if (!(phi > lambda)) {
    out.reason = "phi <= lambda";
  } else if (!(out.global_radius <= epsilon)) {
    out.reason = "global radius exceeds epsilon";
  } else {
    out.pass = true;
  }
  return out;
}

Verdict corollary1(const ProblemInstance& inst, double lambda, double phi) {
  if (!inst.noise_free()) return {false, "requires eta = 0"};
  if (inst.mu() != 1.0) return {false, "requires mu = 1"};
  if (!(phi > lambda)) return {false, "phi <= lambda"};
  const double irr = irr_constant(inst.A(), inst.support());
  if (!(lambda < corollary1_lambda_bound(irr, phi, inst.k())))
    return {false, "lambda >= omega phi / (6 sqrt(k) + omega)"};
  return {true, {}};
}

bool corollary1_certificate(const ProblemInstance& inst, double lambda, double phi) {
  return corollary1(inst, lambda, phi).pass;
}

double re_estimate(const Matrix& A, const IndexSet& S, double alpha, std::int64_t samples,
                   std::uint64_t rng_seed) {
  if (samples < 1) throw Error("re_estimate needs at least one sample");
  if (!(alpha >= 0.0)) throw Error("alpha must be nonnegative");
  const Matrix A_S = restrict_columns(A, S);
  const IndexSet Sbar = complement(S, A.cols());
  const Matrix A_Sbar = Sbar.empty() ? Matrix(A.rows(), 0) : restrict_columns(A, Sbar);
  const auto k = static_cast<Index>(S.size());
  const auto rest = static_cast<Index>(Sbar.size());

  Rng rng(rng_seed);
  Vector vS(k);
  Vector vSbar(rest);
  double best = kInf;
  for (std::int64_t s = 0; s < samples; ++s) {
    for (Index i = 0; i < k; ++i) vS(i) = rng.normal();
    for (Index i = 0; i < rest; ++i) vSbar(i) = rng.normal();
    const double target = rng.uniform01() * alpha * vS.lpNorm<1>();
    const double l1 = vSbar.lpNorm<1>();
    if (rest > 0) vSbar *= l1 > 0.0 ? target / l1 : 0.0;
    const double denom = vS.squaredNorm() + vSbar.squaredNorm();
    if (denom == 0.0) continue;
    const double num = (A_S * vS + A_Sbar * vSbar).squaredNorm();
    best = std::min(best, num / denom);
  }
  return best;
}

bool cone_membership(const Vector& v, const IndexSet& S, double alpha) {
  const IndexSet Sbar = complement(S, v.size());
  const double on = restrict_vector(v, S).lpNorm<1>();
  const double off = Sbar.empty() ? 0.0 : restrict_vector(v, Sbar).lpNorm<1>();
  return off <= alpha * on;
}

std::vector<LambdaVerdict> lambda_feasible_range(const SupportAnalysis& sa,
                                                 const ProblemInstance& inst,
                                                 CertificateMethod method,
                                                 const std::vector<double>& grid) {
  (void)inst;
  if (grid.empty()) throw Error("lambda grid is empty");
  if (!std::is_sorted(grid.begin(), grid.end()) || !(grid.front() > 0.0))
    throw Error("lambda grid must be positive and ascending");
  std::vector<LambdaVerdict> out;
  out.reserve(grid.size());
  for (double lambda : grid) {
    bool pass = false;
    if (method == CertificateMethod::lasso) {
      pass = lasso_vsc_certificate(sa, lambda).pass;
    } else if (lambda < sa.gram_min_eig) {
      pass = mcps2_limit_pass(local_quantities(sa, lambda));
    }
    out.push_back({lambda, pass});
  }
  return out;
}

std::vector<LambdaVerdict> lambda_feasible_range(const ProblemInstance& inst,
                                                 CertificateMethod method,
                                                 const std::vector<double>& grid) {
  return lambda_feasible_range(SupportAnalysis(inst), inst, method, grid);
}

std::vector<double> log_spaced(double lo, double hi, int count) {
  if (count < 1 || !(lo > 0.0) || hi < lo) throw Error("invalid log-spaced grid");
  std::vector<double> out(static_cast<std::size_t>(count));
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  const double step = std::log(hi / lo) / (count - 1);
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = lo * std::exp(step * i);
  out.back() = hi;
  return out;
}

CertificateReport certify(const ProblemInstance& inst, const CertifyOptions& opts) {
  if (!(opts.epsilon > 0.0) || !(opts.alpha > 0.0)) throw Error("epsilon and alpha must be positive");
  const SupportAnalysis sa(inst);
  CertificateReport r;
  fill_local(r, sa, inst, opts.lambda, opts.epsilon, opts.alpha);

  const LassoVsc lasso = lasso_vsc_certificate(sa, opts.lambda);
  r.lasso_sign_lhs = lasso.sign_lhs;
  r.lasso_sign_rhs = sa.min_magnitude;
  r.lasso_vsc_lhs = lasso.vsc_lhs;

  double alpha_re = opts.alpha;
  if (r.x_star.size() == inst.n()) {
    const double lambda_d = opts.lambda * inst.d();
    r.theta = (inst.A().transpose() * (inst.y() - inst.A() * r.x_star)).lpNorm<Eigen::Infinity>();
    r.alpha_required =
        r.theta < lambda_d ? (2.0 * lambda_d + r.theta) / (lambda_d - r.theta) : kInf;
    if (std::isfinite(r.alpha_required) && r.alpha_required > alpha_re) {
      alpha_re = r.alpha_required;
      r.notes.emplace_back("RE estimated at the cone opening required by the global test");
    }
  } else {
    r.theta = kNaN;
    r.alpha_required = kNaN;
  }

  if (opts.phi) {
    r.phi_estimate = *opts.phi;
    r.phi_provenance = "user";
  } else {
    r.phi_estimate = re_estimate(inst.A(), inst.support(), alpha_re, opts.re_samples, opts.re_seed);
    r.phi_provenance = "re_estimate (heuristic upper bound)";
  }

  if (r.x_star.size() == inst.n()) {
    r.global_radius = mcps2_global_certificate(inst, opts.lambda, r.x_star, r.phi_estimate,
                                               opts.epsilon)
                          .global_radius;
  } else {
    r.global_radius = kNaN;
  }
  r.verdicts = recompute_verdicts(r);
  return r;
}

}  // namespace mcps
