#include <doctest.h>

#include <Eigen/LU>

#include <cmath>

#include "airycov/fredholm.hpp"

using namespace airycov;

namespace {

KernelBlockFn separable() {
  return [](double, const Eigen::VectorXd& x, double, const Eigen::VectorXd& y) {
    return Eigen::MatrixXd((-x.array()).exp().matrix() * (-y.array()).exp().matrix().transpose());
  };
}

JointProblem one_time(std::variant<Process, KernelBlockFn> k, double s, int n) {
  JointProblem p;
  p.kernel = std::move(k);
  p.times = {0.0};
  p.thresholds = {s};
  p.n = n;
  return p;
}

}  // namespace

TEST_CASE("zero kernel gives exactly one") {
  KernelBlockFn zero = [](double, const Eigen::VectorXd& x, double, const Eigen::VectorXd& y) {
    return Eigen::MatrixXd::Zero(x.size(), y.size()).eval();
  };
  JointProblem p;
  p.kernel = zero;
  p.times = {0.0, 1.0};
  p.thresholds = {-1.0, 2.0};
  p.n = 30;
  const auto b = assemble(p);
  CHECK(b.assembled.isZero(0.0));
  CHECK(det_i_minus(b) == 1.0);
}

TEST_CASE("rank-one separable kernel") {
  // det(I - e^{-(x+y)}) on (0, inf) = 1 - 1/2
  for (int n : {40, 80}) CHECK(std::abs(det_i_minus(assemble(one_time(separable(), 0.0, n))) - 0.5) <= 1e-12);
  const auto c = evaluate_with_error_control(one_time(separable(), 0.0, 0), 1e-14);
  CHECK(std::abs(c.value - 0.5) <= 1e-12);
}

TEST_CASE("block layout") {
  KernelBlockFn tag = [](double u, const Eigen::VectorXd& x, double up, const Eigen::VectorXd& y) {
    Eigen::MatrixXd k(x.size(), y.size());
    for (int i = 0; i < x.size(); ++i)
      for (int j = 0; j < y.size(); ++j) k(i, j) = 10 * u + up + 1e-3 * (x[i] - y[j]);
    return k;
  };
  JointProblem p;
  p.kernel = tag;
  p.times = {0.0, 1.0};
  p.thresholds = {-1.0, 2.0};
  p.n = 6;
  const auto b = assemble(p);
  REQUIRE(b.assembled.rows() == 12);
  const NodeSet a0 = threshold_nodes(-1.0, 6), a1 = threshold_nodes(2.0, 6);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) {
      CHECK(b.block(0, 1)(i, j) == doctest::Approx(a0.sqrt_w[i] * (1 + 1e-3 * (a0.x[i] - a1.x[j])) * a1.sqrt_w[j]));
      CHECK(b.block(1, 0)(i, j) == doctest::Approx(a1.sqrt_w[i] * (10 + 1e-3 * (a1.x[i] - a0.x[j])) * a0.sqrt_w[j]));
      CHECK(b.block(1, 1)(i, j) == doctest::Approx(a1.sqrt_w[i] * (11 + 1e-3 * (a1.x[i] - a1.x[j])) * a1.sqrt_w[j]));
    }
}

TEST_CASE("one-time Airy2 matrix is symmetric") {
  const auto b = assemble(one_time(Process::Airy2, 0.0, 40));
  CHECK((b.assembled - b.assembled.transpose()).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("determinant is one far to the right") {
  for (Process p : {Process::Airy1, Process::Airy2})
    CHECK(std::abs(det_i_minus(assemble(one_time(p, 40.0, 40))) - 1.0) <= 1e-12);
}

TEST_CASE("one-point values are probabilities, monotone in s") {
  for (Process p : {Process::Airy1, Process::Airy2}) {
    double prev = 0;
    for (double s = -6; s <= 4; s += 0.5) {
      const double v = det_i_minus(assemble(one_time(p, s, 80)));
      CHECK(v >= -1e-14);
      CHECK(v <= 1 + 1e-14);
      CHECK(v >= prev - 1e-14);
      prev = v;
    }
  }
}

TEST_CASE("two-time Airy1 value is a probability") {
  JointProblem p;
  p.kernel = Process::Airy1;
  p.times = {0.0, 1.0};
  p.thresholds = {0.0, 0.0};
  const auto c = evaluate_with_error_control(p, 1e-12);
  CHECK(c.value > 0);
  CHECK(c.value < 1);
}

TEST_CASE("Airy2 one-point determinant converges exponentially in n") {
  const auto value = [](int n) { return det_i_minus(assemble(one_time(Process::Airy2, 0.0, n))); };
  const double ref = value(640);
  const auto err = [&](int n) { return std::abs(value(n) - ref); };
  // The error reaches rounding level by n = 20, so the rate is measured on
  // n in [4, 20] and the plateau beyond is checked separately.
  const double e4 = err(4), e8 = err(8), e10 = err(10), e16 = err(16), e20 = err(20);
  MESSAGE("errors at n = 4, 8, 10, 16, 20: " << e4 << " " << e8 << " " << e10 << " " << e16 << " " << e20);
  CHECK((std::log(e20) - std::log(e4)) / 16 <= -0.15);
  CHECK(e16 <= 10 * std::pow(e8, 1.5));
  CHECK(e20 <= 10 * std::pow(e10, 1.5));
  for (int n : {20, 40, 80}) CHECK(err(n) <= 1e-13);
  CHECK(std::abs(value(60) - value(120)) <= 1e-14);
}

TEST_CASE("error control") {
  const auto loose = evaluate_with_error_control(one_time(Process::Airy2, 0.0, 0), 1e-6);
  const auto tight = evaluate_with_error_control(one_time(Process::Airy2, 0.0, 0), 1e-14);
  CHECK(loose.n_used <= tight.n_used);
  CHECK(tight.n_used >= 20);
  CHECK(tight.n_used <= 120);
  CHECK(std::abs(tight.value - tight.previous) <= 1e-14);
  CHECK(std::abs(loose.value - tight.value) <= 1e-6);
  CHECK_THROWS_AS(evaluate_with_error_control(one_time(Process::Airy2, 0.0, 0), 1e-15), ArgumentError);

  // A kernel that changes with n never settles.
  KernelBlockFn drifting = [](double, const Eigen::VectorXd& x, double, const Eigen::VectorXd& y) {
    return Eigen::MatrixXd::Identity(x.size(), y.size()) * (0.5 / std::sqrt(double(x.size())));
  };
  try {
    evaluate_with_error_control(one_time(drifting, 0.0, 0), 1e-12);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.previous() != e.last());
  }
}

TEST_CASE("equilibrated factorization agrees") {
  const auto b = assemble(one_time(Process::Airy2, -2.0, 60));
  const Eigen::MatrixXd m = Eigen::MatrixXd::Identity(60, 60) - b.assembled;
  Eigen::VectorXd r(60), c(60);
  for (int i = 0; i < 60; ++i) {
    r[i] = 1.0 / m.row(i).cwiseAbs().maxCoeff();
    c[i] = std::pow(2.0, (i % 7) - 3);
  }
  const Eigen::MatrixXd scaled = r.asDiagonal() * m * c.asDiagonal();
  const double det_scaled = Eigen::PartialPivLU<Eigen::MatrixXd>(scaled).determinant() / r.prod() / c.prod();
  CHECK(std::abs(det_scaled - det_i_minus(b)) <= 1e-13);
}

TEST_CASE("argument and numerical errors") {
  JointProblem p = one_time(Process::Airy2, 0.0, 10);
  p.times = {1.0, 0.5};
  p.thresholds = {0.0, 0.0};
  CHECK_THROWS_AS(assemble(p), ArgumentError);
  p.times = {0.0, 1.0, 2.0};
  p.thresholds = {0.0, 0.0, 0.0};
  CHECK_THROWS_AS(assemble(p), ArgumentError);
  p.times = {0.0, 1.0};
  p.thresholds = {0.0, 0.0};
  p.n = 2049;
  CHECK_THROWS_AS(assemble(p), ArgumentError);
  p.n = 10;
  p.thresholds = {0.0, std::nan("")};
  CHECK_THROWS_AS(assemble(p), ArgumentError);

  Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(3, 3);
  bad(1, 2) = std::nan("");
  CHECK_THROWS_AS(det_i_minus(bad), NumericalError);
  Eigen::MatrixXd huge(2, 2);
  huge << -1e308, 1e308, 1e308, 1e308;
  CHECK_THROWS_AS(det_i_minus(huge), NumericalError);
  CHECK_THROWS_AS(det_i_minus(Eigen::MatrixXd::Zero(2, 3)), ArgumentError);
}
