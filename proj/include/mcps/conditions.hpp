#pragma once

#include "mcps/problem.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mcps {

/// Quantities that depend only on the instance and its true support, shared
/// by every lambda-dependent certificate. Throws RankDeficientError when A_S
/// is not full column rank.
struct SupportAnalysis {
  explicit SupportAnalysis(const ProblemInstance& inst);

  Matrix A_S;
  Matrix A_Sbar;
  Matrix gram;               ///< A_S^T A_S
  double gram_min_eig;       ///< lambda must stay strictly below this
  Matrix pinv_times_off;     ///< A_S^+ A_Sbar, computed from a QR of A_S
  double irr;                ///< ||A_S^+ A_Sbar||_1
  double gram_inv_norm_inf;  ///< ||(A_S^T A_S)^{-1}||_inf
  Vector zeta;               ///< A_Sbar^T (A_S A_S^+ - I) eta
  double zeta_inf;
  double AtS_eta_inf;        ///< ||A_S^T eta||_inf
  double AtSbar_eta_inf;     ///< ||A_Sbar^T eta||_inf
  Vector AtS_eta;
  Vector x_S;                ///< true nonzeros
  Vector sign_S;
  double d;
  double mu;
  double min_magnitude;
  Index k;
  bool noise_free;
};

/// ||A_S^+ A_Sbar||_1 (max absolute column sum).
double irr_constant(const Matrix& A, const IndexSet& S);

struct LassoVsc {
  bool pass = false;
  bool sign_bound = false;  ///< ||(A_S^T A_S)^{-1}||_inf (||A_S^T eta||_inf + lambda) <= min |x_S|
  bool irr_bound = false;   ///< ||A_S^+ A_Sbar||_1 + ||zeta||_inf / lambda < 1
  double sign_lhs = 0.0;
  double vsc_lhs = 0.0;
  double zeta_inf = 0.0;
};

LassoVsc lasso_vsc_certificate(const SupportAnalysis& sa, double lambda);
LassoVsc lasso_vsc_certificate(const ProblemInstance& inst, double lambda);

/// First-order optimality of the box-constrained Lasso. Interior nonzeros must
/// satisfy the S-condition, zeros the Sbar-condition; components pinned at +-d
/// are checked against the sign of the box normal cone instead.
bool kkt_check_lasso(const Vector& x, const ProblemInstance& inst, double lambda, double tol);

struct CandidateMinimizer {
  Vector x_star;
  bool sign_consistent = false;
  bool in_box = false;
};

/// Closed-form solution of the support-restricted subgradient equation,
/// using sign(x_true_S) in place of sign(x*_S). Throws ConvexityError when
/// lambda >= lambda_min(A_S^T A_S).
CandidateMinimizer candidate_minimizer(const SupportAnalysis& sa, const IndexSet& support, Index n,
                                       double lambda);
CandidateMinimizer candidate_minimizer(const ProblemInstance& inst, double lambda);

struct Lemma1 {
  bool pass = false;
  double lhs = 0.0;  ///< ||(A_S^T A_S - lambda I)^{-1}||_inf [lambda d (1 - mu) + ||A_S^T eta||_inf]
  double rhs = 0.0;  ///< mu d
};

Lemma1 lemma1(const SupportAnalysis& sa, double lambda);
bool lemma1_check(const ProblemInstance& inst, double lambda);

struct Verdicts {
  bool lasso_vsc = false;
  bool lemma1 = false;
  bool c3 = false;         ///< epsilon -> 0 limit: q > 0
  bool c3_strict = false;  ///< q > lambda epsilon (1 + alpha) / alpha
  bool prop1_global = false;
  bool corollary1 = false;
};

/// Every computed condition quantity. Verdicts are recomputable from the
/// numeric fields through recompute_verdicts().
struct CertificateReport {
  double lambda_used = 0.0;
  double epsilon = 0.0;
  double alpha = 0.0;
  double phi_estimate = 0.0;
  std::string phi_provenance;  ///< "re_estimate (heuristic upper bound)" or "user"

  double d = 0.0;
  double mu = 0.0;
  Index k = 0;
  bool noise_free = false;

  double irr_constant = 0.0;
  double omega_max = 0.0;  ///< 1 / irr_constant, +inf when irr_constant = 0
  double lasso_sign_lhs = 0.0;
  double lasso_sign_rhs = 0.0;
  double lasso_vsc_lhs = 0.0;
  double zeta_inf = 0.0;
  double lemma1_lhs = 0.0;
  double lemma1_rhs = 0.0;
  double q = 0.0;
  double c3_margin = 0.0;  ///< lambda epsilon (1 + alpha) / alpha
  double theta = 0.0;
  double alpha_required = 0.0;
  double global_radius = 0.0;
  bool candidate_sign_consistent = false;
  bool candidate_in_box = false;
  Vector x_star;

  Verdicts verdicts;
  std::vector<std::string> notes;
};

Verdicts recompute_verdicts(const CertificateReport& r);

/// Theorem-1 margin q and the C3 verdicts, evaluated at omega = 1/irr.
/// Verdicts fail closed (with a note) when Lemma 1 fails or x* leaves the box.
CertificateReport mcps2_local_certificate(const ProblemInstance& inst, double lambda,
                                          double epsilon, double alpha);

struct GlobalCertificate {
  bool pass = false;
  double theta = 0.0;
  double alpha_required = 0.0;
  double global_radius = 0.0;
  std::string reason;
};

GlobalCertificate mcps2_global_certificate(const ProblemInstance& inst, double lambda,
                                           const Vector& x_star, double phi, double epsilon);

struct Verdict {
  bool pass = false;
  std::string reason;
};

Verdict corollary1(const ProblemInstance& inst, double lambda, double phi);
bool corollary1_certificate(const ProblemInstance& inst, double lambda, double phi);

/// lambda threshold omega phi / (6 sqrt(k) + omega) with omega = 1/irr; phi when irr = 0.
double corollary1_lambda_bound(double irr, double phi, Index k);

/// Sampled restricted-eigenvalue estimate: the minimum Rayleigh quotient
/// ||Av||^2/||v||^2 over random members of the cone C(alpha, S). This is a
/// heuristic upper bound on the true RE constant.
double re_estimate(const Matrix& A, const IndexSet& S, double alpha, std::int64_t samples,
                   std::uint64_t rng_seed);

/// ||v_Sbar||_1 <= alpha ||v_S||_1.
bool cone_membership(const Vector& v, const IndexSet& S, double alpha);

enum class CertificateMethod { lasso, mcps2 };

struct LambdaVerdict {
  double lambda = 0.0;
  bool pass = false;
};

/// Full certificate of the method at every grid point (lasso: sign bound and
/// strict IRR bound; mcps2: Lemma 1, box, and C3 in the epsilon -> 0 limit).
std::vector<LambdaVerdict> lambda_feasible_range(const ProblemInstance& inst,
                                                 CertificateMethod method,
                                                 const std::vector<double>& grid);
std::vector<LambdaVerdict> lambda_feasible_range(const SupportAnalysis& sa,
                                                 const ProblemInstance& inst,
                                                 CertificateMethod method,
                                                 const std::vector<double>& grid);

std::vector<double> log_spaced(double lo, double hi, int count);

struct CertifyOptions {
  double lambda = 1e-3;
  double epsilon = 1e-3;
  double alpha = 3.0;
  std::optional<double> phi;  ///< user override; otherwise re_estimate
  std::int64_t re_samples = 10000;
  std::uint64_t re_seed = 0;
};

/// All certificates at one lambda.
CertificateReport certify(const ProblemInstance& inst, const CertifyOptions& opts);

}  // namespace mcps
