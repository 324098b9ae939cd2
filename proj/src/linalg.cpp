#include "mcps/linalg.hpp"

#include <algorithm>

namespace mcps {

double norm_inf(const Matrix& M) {
  if (M.size() == 0) return 0.0;
  return M.cwiseAbs().rowwise().sum().maxCoeff();
}

double norm_1(const Matrix& M) {
  if (M.size() == 0) return 0.0;
  return M.cwiseAbs().colwise().sum().maxCoeff();
}

IndexSet complement(const IndexSet& idx, Index n) {
  IndexSet out;
  out.reserve(static_cast<std::size_t>(n));
  std::size_t p = 0;
  for (Index i = 0; i < n; ++i) {
    if (p < idx.size() && idx[p] == i) {
      ++p;
      continue;
    }
    out.push_back(i);
  }
  return out;
}

Vector restrict_vector(const Vector& v, const IndexSet& idx) {
  Vector out(static_cast<Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) out(static_cast<Index>(j)) = v(idx[j]);
  return out;
}

Vector sign(const Vector& v) {
  return v.unaryExpr([](double a) { return a > 0.0 ? 1.0 : (a < 0.0 ? -1.0 : 0.0); });
}

bool full_column_rank(const Matrix& M) {
  if (M.cols() == 0 || M.cols() > M.rows()) return false;
  Eigen::JacobiSVD<Matrix> svd(M);
  const auto& s = svd.singularValues();
  return s(s.size() - 1) > kRankTolerance * s(0);
}

double min_eigenvalue(const Matrix& symmetric) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetric, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

Matrix spd_inverse(const Matrix& spd) {
  Eigen::LLT<Matrix> llt(spd);
  if (llt.info() != Eigen::Success) throw ConvexityError("matrix is not positive definite");
  return llt.solve(Matrix::Identity(spd.rows(), spd.cols()));
}

}  // namespace mcps
