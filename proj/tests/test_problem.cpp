#include "mcps/problem.hpp"
#include "oracles.hpp"

#include "doctest.h"

#include <cmath>
#include <map>

using namespace mcps;

TEST_CASE("generator matches the default ensemble") {
  GeneratorConfig cfg;
  cfg.n = 100;
  cfg.m = 40;
  cfg.k = 5;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    cfg.rng_seed = seed;
    const auto inst = generate_instance(cfg);
    CHECK(inst.n() == 100);
    CHECK(inst.m() == 40);
    CHECK(inst.k() == 5);
    CHECK(inst.mu() >= 0.5);
    CHECK(inst.mu() <= 1.0);
    CHECK(inst.noise_free());
    CHECK((inst.y() - inst.A() * inst.x_true()).lpNorm<Eigen::Infinity>() == 0.0);
    for (Index i : inst.off_support()) CHECK(inst.x_true()(i) == 0.0);
    for (Index i : inst.support()) {
      CHECK(inst.x_true()(i) != 0.0);
      CHECK(std::abs(inst.x_true()(i)) <= inst.d());
    }
    double lo = 1e300;
    for (Index i : inst.support()) lo = std::min(lo, std::abs(inst.x_true()(i)));
    CHECK(inst.mu() * inst.d() == lo);
  }
}

TEST_CASE("entries have variance 1/m") {
  GeneratorConfig cfg;
  cfg.n = 200;
  cfg.m = 50;
  cfg.rng_seed = 3;
  const auto inst = generate_instance(cfg);
  const double mean = inst.A().mean();
  const double var = (inst.A().array() - mean).square().mean();
  CHECK(std::abs(mean) < 0.01);
  CHECK(var == doctest::Approx(1.0 / 50).epsilon(0.05));
}

TEST_CASE("support is a uniform subset and signs are balanced") {
  GeneratorConfig cfg;
  cfg.n = 10;
  cfg.m = 5;
  cfg.k = 3;
  std::vector<int> hits(10, 0);
  int positive = 0;
  const int draws = 4000;
  for (int s = 0; s < draws; ++s) {
    cfg.rng_seed = static_cast<std::uint64_t>(s);
    const auto inst = generate_instance(cfg);
    for (Index i : inst.support()) {
      ++hits[static_cast<std::size_t>(i)];
      positive += inst.x_true()(i) > 0;
    }
  }
  const double expected = draws * 3.0 / 10.0;
  for (int h : hits) CHECK(std::abs(h - expected) < 5.0 * std::sqrt(expected));
  CHECK(std::abs(positive - draws * 1.5) < 5.0 * std::sqrt(draws * 3 * 0.25));
}

TEST_CASE("generator rejects invalid configurations") {
  GeneratorConfig cfg;
  cfg.k = 0;
  CHECK_THROWS_AS(generate_instance(cfg), Error);
  cfg = {};
  cfg.m = 4;
  cfg.k = 5;
  CHECK_THROWS_AS(generate_instance(cfg), Error);
  cfg = {};
  cfg.n = 4;
  cfg.m = 6;
  cfg.k = 5;
  CHECK_THROWS_AS(generate_instance(cfg), Error);
  cfg = {};
  cfg.magnitude_lo = 0.8;
  cfg.magnitude_hi = 0.6;
  CHECK_THROWS_AS(generate_instance(cfg), Error);
  cfg = {};
  cfg.magnitude_lo = 0.0;
  CHECK_THROWS_AS(generate_instance(cfg), Error);
  cfg = {};
  cfg.magnitude_hi = 1.5;
  CHECK_THROWS_AS(generate_instance(cfg), Error);
  cfg = {};
  cfg.noise_inf_bound = -1e-3;
  CHECK_THROWS_AS(generate_instance(cfg), Error);
  cfg = {};
  cfg.d = 0.0;
  CHECK_THROWS_AS(generate_instance(cfg), Error);
}

TEST_CASE("single extreme entry gives mu = 1") {
  GeneratorConfig cfg;
  cfg.k = 1;
  cfg.d = 2.5;
  cfg.magnitude_lo = 2.5;
  cfg.magnitude_hi = 2.5;
  const auto inst = generate_instance(cfg);
  CHECK(inst.mu() == 1.0);
  CHECK(std::abs(inst.x_true()(inst.support()[0])) == 2.5);
}

TEST_CASE("identical seeds give identical instances") {
  GeneratorConfig cfg;
  cfg.noise_inf_bound = 1e-3;
  cfg.rng_seed = 77;
  const auto a = generate_instance(cfg);
  const auto b = generate_instance(cfg);
  CHECK(a.A() == b.A());
  CHECK(a.x_true() == b.x_true());
  CHECK(a.eta() == b.eta());
  CHECK(a.support() == b.support());
  cfg.rng_seed = 78;
  CHECK(generate_instance(cfg).A() != a.A());
}

TEST_CASE("noise hits the infinity-norm bound exactly") {
  GeneratorConfig cfg;
  for (double bound : {1e-3, 0.25, 7.0}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      cfg.noise_inf_bound = bound;
      cfg.rng_seed = seed;
      const auto inst = generate_instance(cfg);
      CHECK(std::abs(inst.eta().lpNorm<Eigen::Infinity>() - bound) <= 1e-12);
      CHECK((inst.y() - inst.A() * inst.x_true() - inst.eta()).lpNorm<Eigen::Infinity>() <= 1e-15);
    }
  }
  cfg.noise_inf_bound = 0.0;
  CHECK(generate_instance(cfg).eta().isZero(0.0));
}

TEST_CASE("instance constructor validates its invariants") {
  Matrix A = Matrix::Identity(3, 3);
  CHECK_THROWS_AS(ProblemInstance(A, Vector::Zero(3), Vector::Zero(3), 1.0), Error);
  CHECK_THROWS_AS(ProblemInstance(A, Vector::Constant(3, 2.0), Vector::Zero(3), 1.0), Error);
  CHECK_THROWS_AS(ProblemInstance(A, Vector::Constant(3, 0.5), Vector::Zero(3), 0.0), Error);
  CHECK_THROWS_AS(ProblemInstance(A, Vector::Constant(4, 0.5), Vector::Zero(3), 1.0), Error);
  // k > m
  CHECK_THROWS_AS(ProblemInstance(Matrix::Ones(1, 3), Vector::Constant(3, 0.5), Vector::Zero(1), 1.0),
                  Error);
  Vector x(3);
  x << 0.5, 0.0, -1.0;
  const ProblemInstance inst(A, x, Vector::Zero(3), 1.0);
  CHECK(inst.support() == IndexSet{0, 2});
  CHECK(inst.off_support() == IndexSet{1});
  CHECK(inst.mu() == 0.5);
  Vector y = inst.y();
  CHECK_NOTHROW(ProblemInstance(A, x, Vector::Zero(3), y, 1.0, 0));
  y(1) += 1e-6;
  CHECK_THROWS_AS(ProblemInstance(A, x, Vector::Zero(3), y, 1.0, 0), Error);
}

TEST_CASE("restrict_columns") {
  const Matrix I = Matrix::Identity(3, 3);
  CHECK(restrict_columns(I, {1}) == Vector::Unit(3, 1));
  Matrix A = Matrix::Random(5, 8);
  CHECK(restrict_columns(A, {0, 1, 2, 3, 4, 5, 6, 7}) == A);
  const Matrix B = restrict_columns(A, {2, 6});
  REQUIRE(B.rows() == 5);
  REQUIRE(B.cols() == 2);
  for (Index i = 0; i < 5; ++i) {
    CHECK(B(i, 0) == A(i, 2));
    CHECK(B(i, 1) == A(i, 6));
  }
  CHECK(restrict_columns(A, {6, 2}).col(0) == A.col(6));
  CHECK_THROWS_AS(restrict_columns(A, {8}), Error);
  CHECK_THROWS_AS(restrict_columns(A, {-1}), Error);
  CHECK_THROWS_AS(restrict_columns(A, {}), Error);
}

TEST_CASE("objectives at zero and at the truth") {
  GeneratorConfig cfg;
  cfg.m = 30;
  cfg.noise_inf_bound = 1e-2;
  const auto inst = generate_instance(cfg);
  const Vector zero = Vector::Zero(inst.n());
  CHECK(objective_mcps2(zero, inst, 0.3) == doctest::Approx(0.5 * inst.y().squaredNorm()));
  CHECK(objective_lasso(zero, inst, 0.3) == doctest::Approx(0.5 * inst.y().squaredNorm()));

  cfg.noise_inf_bound = 0.0;
  cfg.magnitude_lo = cfg.magnitude_hi = 1.0;
  const auto binary = generate_instance(cfg);
  REQUIRE(binary.mu() == 1.0);
  const double lambda = 0.07;
  CHECK(objective_mcps2(binary.x_true(), binary, lambda) ==
        doctest::Approx(lambda * binary.k() * 0.5).epsilon(1e-12));
  // lambda = 0 leaves the residual term only.
  const Vector x = Vector::Random(inst.n());
  CHECK(objective_lasso(x, inst, 0.0) == doctest::Approx(0.5 * (inst.y() - inst.A() * x).squaredNorm()));
  CHECK_THROWS_AS(objective_mcps2(Vector::Zero(3), inst, 0.1), Error);
  CHECK_THROWS_AS(objective_lasso(Vector::Zero(3), inst, 0.1), Error);
}

TEST_CASE("objectives agree with a scalar-loop oracle") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto inst = oracle::make_instance(6, 4, {1, 4}, {0.7, -0.3}, 0.05, seed, 1.3);
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(-1.3, 1.3);
    Vector x(6);
    for (Index i = 0; i < 6; ++i) x(i) = u(gen);
    const double lambda = 0.2 + 0.01 * static_cast<double>(seed);
    const double m_ref = oracle::objective_scalar(inst.A(), inst.y(), x, lambda, 1.3, true);
    const double l_ref = oracle::objective_scalar(inst.A(), inst.y(), x, lambda, 1.3, false);
    CHECK(std::abs(objective_mcps2(x, inst, lambda) - m_ref) <= 1e-12 * std::abs(m_ref));
    CHECK(std::abs(objective_lasso(x, inst, lambda) - l_ref) <= 1e-12 * std::abs(l_ref));
  }
}

TEST_CASE("objective difference identity") {
  for (double d : {1.0, 2.0, 0.5}) {
    const auto inst = oracle::make_instance(7, 5, {0, 3}, {0.4 * d, -d}, 0.0, 9, d);
    for (int r = 0; r < 20; ++r) {
      const Vector x = d * Vector::Random(7);
      const double lambda = 0.3;
      const double diff = objective_mcps2(x, inst, lambda) - objective_lasso(x, inst, lambda);
      const double expected = lambda * (d - 1.0) * x.lpNorm<1>() - 0.5 * lambda * x.squaredNorm();
      CHECK(diff == doctest::Approx(expected).epsilon(1e-10));
    }
  }
}

TEST_CASE("in_box") {
  CHECK(in_box(Vector::Constant(3, 1.0), 1.0));
  CHECK_FALSE(in_box(Vector::Constant(3, 1.0 + 1e-12), 1.0));
  CHECK(in_box(Vector(), 1.0));
}
