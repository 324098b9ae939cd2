#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace mcps {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;
/// Sorted, duplicate-free, zero-based column indices.
using IndexSet = std::vector<Index>;

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A_S lacks full column rank.
class RankDeficientError : public Error {
public:
  using Error::Error;
};

/// lambda is too large for A_S^T A_S - lambda I to stay positive definite.
class ConvexityError : public Error {
public:
  using Error::Error;
};

// Induced matrix norms: infinity = max absolute row sum, 1 = max absolute column sum.
double norm_inf(const Matrix& M);
double norm_1(const Matrix& M);

/// {0..n-1} minus idx, in increasing order.
IndexSet complement(const IndexSet& idx, Index n);

Vector restrict_vector(const Vector& v, const IndexSet& idx);

/// Componentwise sign with sign(0) = 0.
Vector sign(const Vector& v);

/// Relative rank tolerance for A_S: sigma_min > kRankTolerance * sigma_max.
inline constexpr double kRankTolerance = 1e-10;

bool full_column_rank(const Matrix& M);

/// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const Matrix& symmetric);

/// Explicit inverse of a symmetric positive definite matrix via Cholesky solves.
/// Throws ConvexityError when the factorization fails.
Matrix spd_inverse(const Matrix& spd);

}  // namespace mcps
