#include "mcps/solvers.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <vector>

namespace mcps {

namespace {

// F(x) = c0 - b^T x + 1/2 x^T G x + lambda d ||x||_1 - lambda/2 ||x||^2, with G = A^T A, b = A^T y.
struct QuadraticForm {
  Matrix G;
  Vector b;
  double c0;
  double lambda;
  double d;

  double operator()(const Vector& x) const {
    return c0 - b.dot(x) + 0.5 * x.dot(G * x) + lambda * (d * x.lpNorm<1>() - 0.5 * x.squaredNorm());
  }
};

}  // namespace

SolverResult global_minimize_bruteforce(const ProblemInstance& inst, double lambda,
                                        double grid_step) {
  const auto start = std::chrono::steady_clock::now();
  const Index n = inst.n();
  const double d = inst.d();
  if (n > kOracleMaxDimension) throw Error("oracle is limited to n <= 12");
  if (!(grid_step > 0.0)) throw Error("grid_step must be positive");
  if (grid_step > d / 10.0) throw Error("grid_step must not exceed d / 10");
  if (!(lambda > 0.0)) throw Error("lambda must be positive");

  const QuadraticForm F{inst.A().transpose() * inst.A(), inst.A().transpose() * inst.y(),
                        0.5 * inst.y().squaredNorm(), lambda, d};
  const double ld = lambda * d;

  Vector best_x = Vector::Zero(n);
  double best = F(best_x);
  long faces = 0;

  Vector x(n);
  const std::uint32_t full = (1u << n) - 1u;
  for (std::uint32_t free_mask = 0; free_mask <= full; ++free_mask) {
    IndexSet free_idx;
    IndexSet fixed_idx;
    for (Index i = 0; i < n; ++i) ((free_mask >> i) & 1u ? free_idx : fixed_idx).push_back(i);
    const auto nf = static_cast<Index>(free_idx.size());
    const auto nb = static_cast<Index>(fixed_idx.size());

    // Reduced Hessian on the free coordinates must be positive definite for an
    // interior stationary point to be a minimizer of that face.
    Matrix Hinv;
    if (nf > 0) {
      Matrix H(nf, nf);
      for (Index a = 0; a < nf; ++a)
        for (Index c = 0; c < nf; ++c) H(a, c) = F.G(free_idx[a], free_idx[c]);
      H.diagonal().array() -= lambda;
      Eigen::LLT<Matrix> llt(H);
      if (llt.info() != Eigen::Success) continue;
      Hinv = llt.solve(Matrix::Identity(nf, nf));
    }

    // Fixed coordinates take values in {0, +d, -d}; odometer over 3^nb states.
    std::vector<int> state(static_cast<std::size_t>(nb), 0);
    Vector rhs(nf);
    Vector base(nf);
    Vector xf(nf);
    while (true) {
      x.setZero();
      for (Index j = 0; j < nb; ++j) {
        const int s = state[static_cast<std::size_t>(j)];
        x(fixed_idx[j]) = s == 0 ? 0.0 : (s == 1 ? d : -d);
      }
      if (nf == 0) {
        ++faces;
        const double value = F(x);
        if (value < best) {
          best = value;
          best_x = x;
        }
      } else {
        // Stationarity on the free block: (G_FF - lambda I) x_F = b_F - G_FB x_B - lambda d s_F.
        for (Index a = 0; a < nf; ++a) {
          double acc = F.b(free_idx[a]);
          for (Index j = 0; j < nb; ++j) acc -= F.G(free_idx[a], fixed_idx[j]) * x(fixed_idx[j]);
          rhs(a) = acc;
        }
        base = Hinv * rhs;
        const std::uint32_t patterns = 1u << nf;
        for (std::uint32_t sp = 0; sp < patterns; ++sp) {
          ++faces;
          bool feasible = true;
          for (Index a = 0; a < nf && feasible; ++a) {
            double v = base(a);
            for (Index c = 0; c < nf; ++c) v -= ld * Hinv(a, c) * ((sp >> c) & 1u ? -1.0 : 1.0);
            const double s = (sp >> a) & 1u ? -1.0 : 1.0;
            feasible = v * s > 0.0 && std::abs(v) <= d;
            xf(a) = v;
          }
          if (!feasible) continue;
          for (Index a = 0; a < nf; ++a) x(free_idx[a]) = xf(a);
          const double value = F(x);
          if (value < best) {
            best = value;
            best_x = x;
          }
        }
      }
      Index j = 0;
      while (j < nb && state[static_cast<std::size_t>(j)] == 2) state[static_cast<std::size_t>(j++)] = 0;
      if (j == nb) break;
      ++state[static_cast<std::size_t>(j)];
    }
  }

  SolverResult out;
  out.solver_id = SolverId::oracle;
  out.lambda = lambda;
  out.x_hat = best_x;
  out.objective = objective_mcps2(best_x, inst, lambda);
  out.iterations = static_cast<int>(std::min<long>(faces, std::numeric_limits<int>::max()));
  out.converged = true;
  out.lipschitz_bound =
      F.b.lpNorm<1>() + d * F.G.cwiseAbs().sum() + 2.0 * lambda * d * static_cast<double>(n);
  out.objective_tolerance = out.lipschitz_bound * grid_step;
  out.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

Vector solve_restricted_convex(const ProblemInstance& inst, double lambda) {
  if (!(lambda > 0.0)) throw Error("lambda must be positive");
  const Matrix A_S = inst.A_support();
  const Matrix G = A_S.transpose() * A_S;
  Eigen::SelfAdjointEigenSolver<Matrix> es(G, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues()(0) - lambda;
  const double hi = es.eigenvalues()(G.rows() - 1) - lambda;
  if (!(lo > 0.0)) throw ConvexityError("lambda must be below the smallest eigenvalue of A_S^T A_S");

  const double d = inst.d();
  const double step = 1.0 / hi;
  const Vector b = A_S.transpose() * inst.y();
  Vector x = Vector::Zero(G.rows());
  for (int it = 0; it < 1000000; ++it) {
    const Vector grad = G * x - b - lambda * x;
    Vector next = (x - step * grad).unaryExpr(
        [&](double v) { return project_box(soft_threshold(v, step * lambda * d), d); });
    const double change = (next - x).lpNorm<Eigen::Infinity>();
    x = std::move(next);
    if (change <= 1e-15 * (1.0 + x.lpNorm<Eigen::Infinity>())) break;
  }
  return x;
}

}  // namespace mcps
