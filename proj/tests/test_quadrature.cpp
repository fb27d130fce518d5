#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "airycov/quadrature.hpp"

using namespace airycov;

TEST_CASE("gauss_legendre small rules") {
  const auto r1 = gauss_legendre(1, -1.0, 1.0);
  CHECK(r1.nodes[0] == 0.0);
  CHECK(r1.weights[0] == doctest::Approx(2.0).epsilon(1e-15));

  const auto r2 = gauss_legendre(2, -1.0, 1.0);
  CHECK(r2.nodes[0] == doctest::Approx(-1 / std::sqrt(3.0)).epsilon(1e-15));
  CHECK(r2.nodes[1] == doctest::Approx(1 / std::sqrt(3.0)).epsilon(1e-15));
  CHECK(r2.weights.sum() == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(r2.integrate([](double x) { return x * x * x; }) == doctest::Approx(0.0));
  CHECK(std::abs(r2.integrate([](double x) { return x * x * x; })) < 1e-15);
}

TEST_CASE("gauss_legendre is exact up to degree 2n-1") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coef(-1, 1);
  for (int n : {3, 8, 20, 64}) {
    const double a = -0.7, b = 1.9;
    const auto rule = gauss_legendre(n, a, b);
    std::vector<double> c(2 * n);
    for (auto& v : c) v = coef(rng);
    auto p = [&](double x) {
      double acc = 0;
      for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
      return acc;
    };
    double exact = 0;
    for (std::size_t k = 0; k < c.size(); ++k)
      exact += c[k] * (std::pow(b, k + 1.0) - std::pow(a, k + 1.0)) / (k + 1.0);
    double scale = 0;
    for (std::size_t k = 0; k < c.size(); ++k)
      scale += std::abs(c[k]) * std::pow(std::max(std::abs(a), std::abs(b)), k + 1.0) / (k + 1.0);
    CHECK(std::abs(rule.integrate(p) - exact) <= 1e-13 * scale);
  }
}

TEST_CASE("gauss_legendre nodes and weights are well formed") {
  for (int n : {1, 2, 5, 40, 320}) {
    const auto rule = gauss_legendre(n, 2.0, 5.0);
    REQUIRE(rule.size() == n);
    for (int j = 0; j < n; ++j) {
      CHECK(rule.nodes[j] > 2.0);
      CHECK(rule.nodes[j] < 5.0);
      CHECK(rule.weights[j] > 0.0);
      if (j > 0) CHECK(rule.nodes[j] > rule.nodes[j - 1]);
    }
    CHECK(rule.weights.sum() == doctest::Approx(3.0).epsilon(1e-14));
  }
}

TEST_CASE("gauss_legendre converges geometrically on analytic integrands") {
  // integral over [0,1] of e^x cos(3x)
  const double exact = (std::exp(1.0) * (std::cos(3.0) + 3 * std::sin(3.0)) - 1) / 10;
  auto err = [&](int n) {
    return std::abs(gauss_legendre(n, 0.0, 1.0).integrate([](double x) {
      return std::exp(x) * std::cos(3 * x);
    }) - exact);
  };
  const double e3 = err(3), e6 = err(6);
  CHECK(e3 > 1e-8);
  CHECK(-std::log10(e6) >= 2 * -std::log10(e3) - 0.5);
  CHECK(err(12) < 1e-15);
}

TEST_CASE("gauss_legendre argument errors") {
  CHECK_THROWS_AS(gauss_legendre(0, 0.0, 1.0), ArgumentError);
  CHECK_THROWS_AS(gauss_legendre(4, 1.0, 1.0), ArgumentError);
  CHECK_THROWS_AS(gauss_legendre(4, 1.0, 0.0), ArgumentError);
  CHECK_THROWS_AS(gauss_legendre(4, 0.0, std::numeric_limits<double>::infinity()), ArgumentError);
  CHECK_THROWS_AS(gauss_legendre(4, std::nan(""), 1.0), ArgumentError);
}

TEST_CASE("clenshaw_curtis basics") {
  const auto r = clenshaw_curtis(2, -1.0, 1.0);
  REQUIRE(r.size() == 3);
  CHECK(r.nodes[0] == -1.0);
  CHECK(r.nodes[1] == 0.0);
  CHECK(r.nodes[2] == 1.0);
  CHECK(r.weights[0] == doctest::Approx(1.0 / 3).epsilon(1e-15));
  CHECK(r.weights[1] == doctest::Approx(4.0 / 3).epsilon(1e-15));
  CHECK(r.weights[2] == doctest::Approx(1.0 / 3).epsilon(1e-15));

  for (int n : {2, 7, 64, 159}) {
    const auto rule = clenshaw_curtis(n, -3.0, 4.0);
    CHECK(rule.size() == n + 1);
    CHECK(rule.integrate([](double) { return 1.0; }) == doctest::Approx(7.0).epsilon(1e-14));
    for (int j = 0; j <= n; ++j) CHECK(rule.weights[j] > 0.0);
  }

  const double e = clenshaw_curtis(100, 0.0, 1.0).integrate([](double x) { return std::exp(x); });
  CHECK(std::abs(e - (std::numbers::e - 1)) / (std::numbers::e - 1) < 1e-12);

  // exact for degree <= n
  const auto r8 = clenshaw_curtis(8, 0.0, 2.0);
  CHECK(r8.integrate([](double x) { return std::pow(x, 8); }) ==
        doctest::Approx(512.0 / 9).epsilon(1e-14));

  CHECK_THROWS_AS(clenshaw_curtis(1, 0.0, 1.0), ArgumentError);
  CHECK_THROWS_AS(clenshaw_curtis(4, 0.0, 0.0), ArgumentError);
}

TEST_CASE("semi-infinite tangent rule") {
  const SemiInfiniteTransform<double> phi{2.0, 10.0};
  CHECK(phi(0.5) == doctest::Approx(12.0).epsilon(1e-15));
  CHECK(phi(0.0) == 2.0);

  const auto mid = semi_infinite_rule(-1.5, 3);
  CHECK(mid.nodes[1] == doctest::Approx(8.5).epsilon(1e-14));

  const auto r = semi_infinite_rule(0.0, 40);
  CHECK(std::abs(r.integrate([](double x) { return std::exp(-x); }) - 1.0) < 1e-10);

  const auto g = semi_infinite_rule(2.0, 60);
  const double exact = std::sqrt(std::numbers::pi) / 2 * std::erfc(2.0);
  CHECK(std::abs(g.integrate([](double x) { return std::exp(-x * x); }) - exact) < 1e-10 * exact);

  for (int j = 0; j < r.size(); ++j) {
    CHECK(r.nodes[j] > 0.0);
    CHECK(r.weights[j] > 0.0);
    if (j > 0) CHECK(r.nodes[j] > r.nodes[j - 1]);
  }
  CHECK(r.domain.semi_infinite);

  CHECK_THROWS_AS(semi_infinite_rule(0.0, 0), ArgumentError);
  CHECK_THROWS_AS(semi_infinite_rule(std::nan(""), 10), ArgumentError);
  CHECK_THROWS_AS(semi_infinite_rule(0.0, 10, -1.0), ArgumentError);
}

TEST_CASE("rules in long double") {
  const auto r = gauss_legendre<long double>(10, 0.0L, 1.0L);
  const long double v = r.integrate([](long double x) { return x * x * x * x * x * x * x; });
  CHECK(std::abs(static_cast<double>(v - 0.125L)) < 1e-17);
}
