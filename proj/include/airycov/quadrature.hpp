#pragma once

// Gauss-Legendre and Clenshaw-Curtis rules, and the tangent map that turns
// a rule on (0,1) into one on (s, infinity).

#include <Eigen/Core>

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "airycov/errors.hpp"

namespace airycov {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
struct Interval {
  Scalar lower{0};
  Scalar upper{1};
  bool semi_infinite = false;  // upper is +infinity when set

  Scalar length() const {
    return semi_infinite ? std::numeric_limits<Scalar>::infinity() : upper - lower;
  }
};

template <typename Scalar = double>
struct QuadratureRule {
  Vector<Scalar> nodes;
  Vector<Scalar> weights;
  Interval<Scalar> domain;

  Eigen::Index size() const { return nodes.size(); }

  template <typename F>
  Scalar integrate(F&& f) const {
    Scalar sum{0};
    for (Eigen::Index j = 0; j < nodes.size(); ++j) sum += weights[j] * f(nodes[j]);
    return sum;
  }
};

namespace detail {

template <typename Scalar>
void check_interval(int n, int min_n, Scalar a, Scalar b, const char* who) {
  using std::isfinite;
  if (n < min_n)
    throw ArgumentError(std::string(who) + ": need n >= " + std::to_string(min_n));
  if (!isfinite(a) || !isfinite(b) || !(a < b))
    throw ArgumentError(std::string(who) + ": need finite a < b");
}

}  // namespace detail

/// n-point Gauss-Legendre rule on [a,b]. Nodes are the roots of P_n found by
/// Newton's method from cosine initial guesses; exact for degree <= 2n-1.
template <typename Scalar = double>
QuadratureRule<Scalar> gauss_legendre(int n, Scalar a, Scalar b) {
  using std::abs;
  using std::cos;
  detail::check_interval(n, 1, a, b, "gauss_legendre");

  const Scalar pi = std::numbers::pi_v<Scalar>;
  const Scalar tol = std::max(Scalar(1e-15), 4 * std::numeric_limits<Scalar>::epsilon());
  const Scalar half_len = (b - a) / 2;
  const Scalar mid = (a + b) / 2;

  QuadratureRule<Scalar> rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  rule.domain = {a, b, false};

  // Legendre recurrence; returns P_n(z) and P_n'(z).
  auto legendre = [n](Scalar z, Scalar& dp) {
    Scalar p0{1}, p1 = z;
    if (n == 1) {
      dp = Scalar(1);
      return z;
    }
    for (int k = 2; k <= n; ++k) {
      const Scalar p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (z * p1 - p0) / (z * z - 1);
    return p1;
  };

  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    Scalar z = cos(pi * (i + Scalar(0.75)) / (n + Scalar(0.5)));
    Scalar dp{0};
    for (int iter = 0; iter < 100; ++iter) {
      const Scalar p = legendre(z, dp);
      const Scalar step = p / dp;
      z -= step;
      if (abs(step) <= tol * abs(z) || abs(p) <= tol) break;
    }
    legendre(z, dp);
    const Scalar w = 2 / ((1 - z * z) * dp * dp);
    // z > 0 here; fill symmetric pairs in increasing order.
    rule.nodes[i] = mid - half_len * z;
    rule.nodes[n - 1 - i] = mid + half_len * z;
    rule.weights[i] = half_len * w;
    rule.weights[n - 1 - i] = half_len * w;
  }
  if (n % 2 == 1) rule.nodes[m - 1] = mid;
  return rule;
}

/// Clenshaw-Curtis rule with n+1 cosine-spaced nodes on [a,b], endpoints
/// included; exact for degree <= n. Weights from the explicit cosine sum.
template <typename Scalar = double>
QuadratureRule<Scalar> clenshaw_curtis(int n, Scalar a, Scalar b) {
  using std::cos;
  detail::check_interval(n, 2, a, b, "clenshaw_curtis");

  const Scalar pi = std::numbers::pi_v<Scalar>;
  const Scalar half_len = (b - a) / 2;
  const Scalar mid = (a + b) / 2;

  QuadratureRule<Scalar> rule;
  rule.nodes.resize(n + 1);
  rule.weights.resize(n + 1);
  rule.domain = {a, b, false};

  for (int k = 0; k <= n; ++k) {
    const Scalar theta = pi * k / n;
    Scalar sum{0};
    for (int j = 1; j <= n / 2; ++j) {
      const Scalar b_j = (2 * j == n) ? Scalar(1) : Scalar(2);
      sum += b_j / (4 * j * j - 1) * cos(2 * j * theta);
    }
    const Scalar c_k = (k == 0 || k == n) ? Scalar(1) : Scalar(2);
    // Weights are symmetric, so node -cos(theta) pairs with the same weight.
    rule.nodes[k] = mid - half_len * cos(theta);
    rule.weights[k] = half_len * c_k / n * (1 - sum);
  }
  rule.nodes[0] = a;
  rule.nodes[n] = b;
  if (n % 2 == 0) rule.nodes[n / 2] = mid;
  return rule;
}

/// x = s + scale * tan(pi xi / 2), mapping (0,1) onto (s, infinity).
template <typename Scalar = double>
struct SemiInfiniteTransform {
  Scalar s{0};
  Scalar scale{10};

  Scalar operator()(Scalar xi) const {
    using std::tan;
    return s + scale * tan(std::numbers::pi_v<Scalar> * xi / 2);
  }

  Scalar derivative(Scalar xi) const {
    using std::cos;
    const Scalar c = cos(std::numbers::pi_v<Scalar> * xi / 2);
    return scale * std::numbers::pi_v<Scalar> / 2 / (c * c);
  }
};

/// Rule for integrals over (s, infinity): Gauss-Legendre on (0,1) pushed
/// through the tangent map, weights multiplied by the map's derivative.
template <typename Scalar = double>
QuadratureRule<Scalar> semi_infinite_rule(Scalar s, int n, Scalar scale = Scalar(10)) {
  using std::isfinite;
  if (n < 1) throw ArgumentError("semi_infinite_rule: need n >= 1");
  if (!isfinite(s)) throw ArgumentError("semi_infinite_rule: s must be finite");
  if (!isfinite(scale) || !(scale > 0))
    throw ArgumentError("semi_infinite_rule: scale must be positive");

  const auto base = gauss_legendre<Scalar>(n, Scalar(0), Scalar(1));
  const SemiInfiniteTransform<Scalar> phi{s, scale};

  QuadratureRule<Scalar> rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  rule.domain = {s, std::numeric_limits<Scalar>::infinity(), true};
  for (int j = 0; j < n; ++j) {
    rule.nodes[j] = phi(base.nodes[j]);
    rule.weights[j] = base.weights[j] * phi.derivative(base.nodes[j]);
  }
  return rule;
}

}  // namespace airycov
