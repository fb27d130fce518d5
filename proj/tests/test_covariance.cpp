#include <doctest.h>

#include <cmath>

#include "airycov/covariance.hpp"

using namespace airycov;

TEST_CASE("variances at u = 0") {
  const auto a2 = covariance_point(Process::Airy2, 0.0);
  CHECK(std::abs(a2.value - 0.81320) <= 1e-4);
  CHECK_FALSE(a2.truncation_warning);
  const auto a1 = covariance_point(Process::Airy1, 0.0);
  CHECK(std::abs(a1.value - 0.402) <= 1e-3);
  CHECK(a1.truncation == 14.0);
  CHECK(a1.cc_points == 160);
}

TEST_CASE("moments agree with the Hoeffding variance") {
  for (Process p : {Process::Airy1, Process::Airy2}) {
    const auto m = one_point_moments(p);
    const double v = covariance_point(p, 0.0).value;
    CHECK(std::abs(m.variance - v) <= 1e-6);
  }
  const auto m2 = one_point_moments(Process::Airy2);
  CHECK(std::abs(m2.mean + 1.7711) <= 1e-3);
  CHECK(std::abs(m2.variance - 0.81320) <= 1e-4);
  const auto m1 = one_point_moments(Process::Airy1);
  CHECK(std::abs(m1.variance - 0.402) <= 1e-3);
}

TEST_CASE("derivative at zero on known functions") {
  CHECK(derivative_at_zero([](double u) { return -u; }) == -1.0);
  CHECK(std::abs(derivative_at_zero([](double u) { return 0.7 - u; }) + 1.0) <= 1e-12);
  // cubic: the extrapolation removes O(h) and O(h^2)
  CHECK(std::abs(derivative_at_zero([](double u) { return 1 - u + 3 * u * u - 5 * u * u * u; }) + 1.0) <= 1e-12);
  CHECK_THROWS_AS(derivative_at_zero(std::function<double(double)>{}), ArgumentError);
}

TEST_CASE("curve values equal the pointwise values") {
  const auto curve = covariance_curve(Process::Airy1, 0.2, 0.1);
  REQUIRE(curve.grid.size() == 3);
  CHECK(curve.grid[1] == 0.1);
  CHECK(curve.tag == "airy1");
  CHECK(curve.values[1] == covariance_point(Process::Airy1, 0.1).value);
  CHECK(curve.values[2] < curve.values[1]);
  CHECK(curve.values[1] < curve.values[0]);
  for (bool f : curve.failed) CHECK_FALSE(f);
  CHECK_FALSE(curve.stderrs.has_value());

  CHECK(covariance_curve(Process::Airy1, 0.0, 1.0).grid.size() == 1);
  CHECK_THROWS_AS(covariance_curve(Process::Airy2, 11.0, 1.0), ArgumentError);
  CHECK_THROWS_AS(covariance_curve(Process::Airy2, 1.0, 0.0), ArgumentError);
  CHECK_THROWS_AS(covariance_point(Process::Airy2, -0.5), ArgumentError);
}

TEST_CASE("Airy2 covariance decreases on [0, 2]") {
  const auto curve = covariance_curve(Process::Airy2, 2.0, 0.25);
  REQUIRE(curve.values.size() == 9);
  for (std::size_t k = 1; k < curve.values.size(); ++k) CHECK(curve.values[k] < curve.values[k - 1]);
  CHECK(curve.values.back() > 0);
}

TEST_CASE("Airy1 covariance decays superexponentially") {
  const double g15 = covariance_point(Process::Airy1, 1.5).value;
  const auto p25 = covariance_point(Process::Airy1, 2.5);
  MESSAGE("g1(1.5) = " << g15 << ", g1(2.5) = " << p25.value);
  CHECK(std::abs(p25.value) < 1e-3);
  CHECK(1.5 * 1.5 * g15 >= 5 * 2.5 * 2.5 * std::abs(p25.value));
  CHECK(p25.skipped > 0);
}

TEST_CASE("robust to the truncation T = 10 -> 12") {
  CovarianceOptions wide;
  wide.truncation = 12;
  for (auto [p, u] : {std::pair{Process::Airy2, 0.5}, {Process::Airy2, 8.0}, {Process::Airy1, 0.5}}) {
    const double a = covariance_point(p, u).value, b = covariance_point(p, u, wide).value;
    MESSAGE(to_string(p) << " u = " << u << ": " << a << " vs " << b);
    CHECK(std::abs(a - b) <= 1e-8);
  }
}

TEST_CASE("absolute accuracy gate 1e-8 under grid refinement") {
  CovarianceOptions fine;
  fine.cc_points = 130;
  for (Process p : {Process::Airy1, Process::Airy2}) {
    const auto a = covariance_point(p, 1.0), b = covariance_point(p, 1.0, fine);
    MESSAGE(to_string(p) << " g(1): " << a.value << " (n = " << a.nystrom_n << ") vs " << b.value);
    CHECK(std::abs(a.value - b.value) <= 1e-8);
    CHECK_FALSE(a.truncation_warning);
  }
}

TEST_CASE("Airy2 covariance tends to u^-2") {
  const double g = covariance_point(Process::Airy2, 8.0).value;
  CHECK(std::abs(g - 0.0147604) <= 2e-4);
}

TEST_CASE("Nystrom size selection") {
  const int n = select_nystrom_n(Process::Airy2, 1.0, -10.0, 1e-12);
  CHECK(n >= 24);
  CHECK(n <= 320);
  CHECK(select_nystrom_n(Process::Airy2, 1.0, -10.0, 1e-6) <= n);
  CovarianceOptions bad;
  bad.cc_points = 2;
  CHECK_THROWS_AS(covariance_point(Process::Airy2, 1.0, bad), ArgumentError);
}
