#include "mcps/metrics.hpp"
#include "mcps/solvers.hpp"
#include "oracles.hpp"

#include "doctest.h"

#include <algorithm>
#include <numeric>

using namespace mcps;

TEST_CASE("score at the truth and at zero") {
  const auto inst = oracle::make_instance(12, 6, {2, 5, 9}, {1.0, -0.5, 0.75}, 0.0, 1);
  const auto exact = score(inst.x_true(), inst, 1e-3);
  CHECK(exact.vsc);
  CHECK(exact.false_positive_rate == 0.0);
  CHECK(exact.false_negative_rate == 0.0);
  CHECK(exact.l2_error == 0.0);

  const auto none = score(Vector::Zero(12), inst, 1e-3);
  CHECK_FALSE(none.vsc);
  CHECK(none.false_negative_rate == 1.0);
  CHECK(none.false_positive_rate == 0.0);
  CHECK(none.l2_error == doctest::Approx(inst.x_true().norm()));
}

TEST_CASE("score matches a hand enumeration on a solver output") {
  const auto inst = oracle::make_instance(10, 5, {1, 4, 8}, {0.9, -0.6, 0.7}, 1e-2, 4);
  Hyperparams hp;
  hp.lambda = 0.05;
  const auto out = admm_mcps2(inst, hp);
  const double tau = 1e-3;
  int fp = 0;
  int fn = 0;
  for (Index i = 0; i < 10; ++i) {
    const bool truth = i == 1 || i == 4 || i == 8;
    const bool est = std::abs(out.x_hat(i)) > tau;
    fp += est && !truth;
    fn += !est && truth;
  }
  const auto s = score(out.x_hat, inst, tau);
  CHECK(s.false_positive_rate == doctest::Approx(fp / 7.0));
  CHECK(s.false_negative_rate == doctest::Approx(fn / 3.0));
  CHECK(s.vsc == (fp == 0 && fn == 0));
  double l2 = 0.0;
  for (Index i = 0; i < 10; ++i) l2 += std::pow(out.x_hat(i) - inst.x_true()(i), 2);
  CHECK(s.l2_error == doctest::Approx(std::sqrt(l2)));
}

TEST_CASE("hand-built estimate") {
  Matrix A = Matrix::Identity(4, 4);
  Vector x(4);
  x << 1.0, 0.0, -1.0, 0.0;
  const ProblemInstance inst(A, x, Vector::Zero(4), 1.0);
  Vector est(4);
  est << 0.5, 0.2, 0.0005, 0.0;
  const auto s = score(est, inst, 1e-3);
  CHECK_FALSE(s.vsc);
  CHECK(s.false_positive_rate == 0.5);
  CHECK(s.false_negative_rate == 0.5);
  CHECK(estimated_support(est, 1e-3) == IndexSet{0, 1});
}

TEST_CASE("vsc implies zero rates") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto inst = oracle::make_instance(15, 8, {0, 7}, {0.8, -0.6}, 0.01, seed);
    Hyperparams hp;
    hp.lambda = 0.02;
    const auto s = score(admm_mcps2(inst, hp).x_hat, inst, 1e-3);
    if (s.vsc) {
      CHECK(s.false_positive_rate == 0.0);
      CHECK(s.false_negative_rate == 0.0);
    }
    CHECK(s.false_positive_rate >= 0.0);
    CHECK(s.false_positive_rate <= 1.0);
    CHECK(s.false_negative_rate >= 0.0);
    CHECK(s.false_negative_rate <= 1.0);
  }
}

TEST_CASE("score is invariant to consistent permutations") {
  std::mt19937_64 gen(11);
  for (int r = 0; r < 20; ++r) {
    const auto inst = oracle::make_instance(9, 6, {1, 3, 6}, {0.5, -0.9, 0.6}, 0.0, 100 + r);
    Vector est = inst.x_true() + 0.01 * Vector::Random(9);
    est(0) = 0.0;
    std::vector<Index> perm(9);
    std::iota(perm.begin(), perm.end(), Index{0});
    std::shuffle(perm.begin(), perm.end(), gen);
    Matrix Ap(inst.m(), 9);
    Vector xp(9);
    Vector ep(9);
    for (Index j = 0; j < 9; ++j) {
      Ap.col(j) = inst.A().col(perm[static_cast<std::size_t>(j)]);
      xp(j) = inst.x_true()(perm[static_cast<std::size_t>(j)]);
      ep(j) = est(perm[static_cast<std::size_t>(j)]);
    }
    const ProblemInstance permuted(Ap, xp, inst.eta(), inst.d());
    const auto a = score(est, inst, 1e-3);
    const auto b = score(ep, permuted, 1e-3);
    CHECK(a.vsc == b.vsc);
    CHECK(a.false_positive_rate == b.false_positive_rate);
    CHECK(a.false_negative_rate == b.false_negative_rate);
    CHECK(a.l2_error == doctest::Approx(b.l2_error).epsilon(1e-14));
  }
}

TEST_CASE("rates are monotone in the threshold") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto inst = oracle::make_instance(20, 10, {2, 11, 17}, {0.5, -0.8, 1.0}, 0.0, seed);
    const Vector est = inst.x_true() + 0.3 * Vector::Random(20);
    double prev_fp = 2.0;
    double prev_fn = -1.0;
    for (double tau = 0.0; tau <= 1.2; tau += 0.01) {
      const auto s = score(est, inst, tau);
      CHECK(s.false_positive_rate <= prev_fp);
      CHECK(s.false_negative_rate >= prev_fn);
      prev_fp = s.false_positive_rate;
      prev_fn = s.false_negative_rate;
    }
  }
}

TEST_CASE("score rejects bad input") {
  const auto inst = oracle::make_instance(5, 3, {0}, {1.0}, 0.0, 2);
  CHECK_THROWS_AS(score(Vector::Zero(5), inst, -1e-3), Error);
  CHECK_THROWS_AS(score(Vector::Zero(4), inst, 1e-3), Error);
}
