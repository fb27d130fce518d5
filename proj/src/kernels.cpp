#include "airycov/kernels.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <numbers>
#include <string>

#include "airycov/airy.hpp"
#include "airycov/errors.hpp"

namespace airycov {

namespace {

constexpr double kLogSqrt4Pi = 1.2655121234846454;  // log(sqrt(4 pi))
constexpr double kMuDecayExponent = 38.0;           // e^{-38} ~ 3e-17
constexpr double kMuMax = 2000.0;
constexpr double kPointwiseTol = 1e-13;

void check_finite(std::initializer_list<double> values, const char* who) {
  for (double v : values)
    if (!std::isfinite(v)) throw ArgumentError(std::string(who) + ": arguments must be finite");
}

// Taylor coefficients of Ai around m (scaled by e^{zeta(m)} for m > 0).
template <std::size_t N>
std::array<double, N> airy_taylor_coefficients(double m) {
  const AiryValue v = airy_ai_scaled(m);
  std::array<double, N> a{};
  a[0] = v.ai;
  a[1] = v.ai_prime;
  for (std::size_t k = 0; k + 2 < N; ++k)
    a[k + 2] = (m * a[k] + (k > 0 ? a[k - 1] : 0.0)) / static_cast<double>((k + 2) * (k + 1));
  return a;
}

// Half-line integral with an arbitrary rule size; used by the pointwise
// kernel, which never takes the equal-time closed form.
double airy2_pointwise_quadrature(double u, double s, double u_prime, double s_prime,
                                  const Airy2Options& opts) {
  Eigen::VectorXd x(1), y(1);
  x << s;
  y << s_prime;
  const Airy2Branch branch = airy2_branch(u, u_prime, s, s_prime, opts);
  if (branch == Airy2Branch::Direct) {
    const double tau = u_prime - u;
    const auto mu = airy2_mu_rule(tau, std::min(s, s_prime), opts);
    const Eigen::MatrixXd fx = airy_negative_half_line_factor(x, mu, tau);
    const Eigen::MatrixXd fy = airy_negative_half_line_factor(y, mu, tau);
    return -(fx * fy.transpose())(0, 0);
  }
  const auto lambda = airy2_lambda_rule(opts);
  const double c = (u_prime - u) / 2;
  const Eigen::MatrixXd fx = airy_half_line_factor(x, lambda, c);
  const Eigen::MatrixXd fy = airy_half_line_factor(y, lambda, c);
  double value = (fx * fy.transpose())(0, 0);
  if (branch == Airy2Branch::Subtraction) value -= airy2_full_line(u_prime - u, s, s_prime);
  return value;
}

}  // namespace

std::string_view to_string(Process p) { return p == Process::Airy1 ? "airy1" : "airy2"; }

Process parse_process(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "airy1") return Process::Airy1;
  if (lower == "airy2") return Process::Airy2;
  throw ArgumentError("unknown process '" + std::string(name) + "' (expected airy1 or airy2)");
}

double airy_kernel(double x, double y) {
  check_finite({x, y}, "airy_kernel");
  const double m = (x + y) / 2;
  const double d = (x - y) / 2;
  const double local_scale = std::max(1.0, std::sqrt(std::abs(m)));

  if (std::abs(d) * local_scale >= 0.25) {
    const AiryValue ax = airy_ai_scaled(x);
    const AiryValue ay = airy_ai_scaled(y);
    const double num = ax.ai * ay.ai_prime - ax.ai_prime * ay.ai;
    return num / (x - y) * std::exp(-airy_zeta(x) - airy_zeta(y));
  }

  // N(d) = A(d) A'(-d) - A'(d) A(-d) is odd in d; K = N(d) / (2d).
  constexpr std::size_t kTerms = 34;
  const auto a = airy_taylor_coefficients<kTerms + 1>(m);
  std::array<double, kTerms> b{};  // coefficients of A'
  for (std::size_t k = 0; k < kTerms; ++k) b[k] = static_cast<double>(k + 1) * a[k + 1];

  double sum = 0, dpow = 1;
  for (std::size_t j = 1; j < kTerms; j += 2) {
    double n_j = 0;
    for (std::size_t i = 0; i <= j; ++i) {
      const double sign = ((j - i) % 2 == 0) ? 1.0 : -1.0;
      n_j += sign * (a[i] * b[j - i] - b[i] * a[j - i]);
    }
    sum += n_j * dpow;
    dpow *= d * d;
  }
  return sum / 2 * std::exp(-2 * airy_zeta(m));
}

double airy2_full_line(double t, double s, double s_prime) {
  check_finite({t, s, s_prime}, "airy2_full_line");
  if (!(t > 0)) throw ArgumentError("airy2_full_line: need t > 0");
  const double diff = s - s_prime;
  const double log_value =
      -diff * diff / (4 * t) - t * (s + s_prime) / 2 + t * t * t / 12 - kLogSqrt4Pi - 0.5 * std::log(t);
  return std::exp(log_value);
}

Airy2Branch airy2_branch(double u, double u_prime, double x_min, double y_min,
                         const Airy2Options& opts) {
  if (u_prime == u) return Airy2Branch::EqualTime;
  if (u_prime < u) return Airy2Branch::HalfLine;
  const double tau = u_prime - u;
  const double log_cancellation = -tau * (x_min + y_min) / 2 + tau * tau * tau / 12;
  return log_cancellation <= opts.max_log_cancellation ? Airy2Branch::Subtraction
                                                       : Airy2Branch::Direct;
}

QuadratureRule<double> airy2_lambda_rule(const Airy2Options& opts) {
  return semi_infinite_rule<double>(0.0, opts.lambda_points, opts.lambda_scale);
}

QuadratureRule<double> airy2_mu_rule(double tau, double x_min, const Airy2Options& opts) {
  if (!(tau > 0)) throw ArgumentError("airy2_mu_rule: need tau > 0");
  const double mu_max = std::min(kMuDecayExponent / tau, kMuMax);
  const int panels = static_cast<int>(std::ceil(mu_max));
  const int refine = std::max(1, opts.mu_refinement);

  std::vector<double> nodes, weights;
  for (int k = 0; k < panels; ++k) {
    const double a = k;
    const double b = std::min<double>(k + 1, mu_max);
    if (!(b > a)) break;
    // Ai(x - mu) oscillates with local wave number sqrt(mu - x); the product
    // of two such factors with at most twice that.
    const double wave = 2 * std::sqrt(std::max(0.0, b - x_min));
    const int q = refine * (8 + static_cast<int>(std::ceil(wave * (b - a))));
    const auto panel = gauss_legendre<double>(q, a, b);
    nodes.insert(nodes.end(), panel.nodes.begin(), panel.nodes.end());
    weights.insert(weights.end(), panel.weights.begin(), panel.weights.end());
  }
  QuadratureRule<double> rule;
  rule.nodes = Eigen::Map<const Eigen::VectorXd>(nodes.data(), static_cast<Eigen::Index>(nodes.size()));
  rule.weights = Eigen::Map<const Eigen::VectorXd>(weights.data(), static_cast<Eigen::Index>(weights.size()));
  rule.domain = {0.0, mu_max, false};
  return rule;
}

Eigen::MatrixXd airy_half_line_factor(const Eigen::VectorXd& x,
                                      const QuadratureRule<double>& lambda_rule, double c) {
  const Eigen::Index n = x.size();
  const Eigen::Index L = lambda_rule.size();
  Eigen::MatrixXd f(n, L);
  for (Eigen::Index l = 0; l < L; ++l) {
    const double lambda = lambda_rule.nodes[l];
    const double log_sqrt_w = 0.5 * std::log(lambda_rule.weights[l]);
    for (Eigen::Index p = 0; p < n; ++p)
      f(p, l) = airy_ai_times_exp(x[p] + lambda, c * lambda + log_sqrt_w);
  }
  return f;
}

Eigen::MatrixXd airy_negative_half_line_factor(const Eigen::VectorXd& x,
                                               const QuadratureRule<double>& mu_rule, double tau) {
  const Eigen::Index n = x.size();
  const Eigen::Index L = mu_rule.size();
  Eigen::MatrixXd f(n, L);
  for (Eigen::Index l = 0; l < L; ++l) {
    const double mu = mu_rule.nodes[l];
    const double log_weight = 0.5 * std::log(mu_rule.weights[l]) - tau * mu / 2;
    for (Eigen::Index p = 0; p < n; ++p) f(p, l) = airy_ai_times_exp(x[p] - mu, log_weight);
  }
  return f;
}

Eigen::MatrixXd airy2_full_line_matrix(double tau, const Eigen::VectorXd& x,
                                       const Eigen::VectorXd& y) {
  Eigen::MatrixXd g(x.size(), y.size());
  for (Eigen::Index q = 0; q < y.size(); ++q)
    for (Eigen::Index p = 0; p < x.size(); ++p) g(p, q) = airy2_full_line(tau, x[p], y[q]);
  return g;
}

Eigen::MatrixXd airy_kernel_matrix(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  Eigen::MatrixXd k(x.size(), y.size());
  for (Eigen::Index q = 0; q < y.size(); ++q)
    for (Eigen::Index p = 0; p < x.size(); ++p) k(p, q) = airy_kernel(x[p], y[q]);
  return k;
}

double airy2_kernel(double u, double s, double u_prime, double s_prime) {
  check_finite({u, s, u_prime, s_prime}, "airy2_kernel");
  Airy2Options opts;
  opts.lambda_points = 40;
  opts.mu_refinement = 1;
  double previous = airy2_pointwise_quadrature(u, s, u_prime, s_prime, opts);
  while (opts.lambda_points < 320) {
    opts.lambda_points *= 2;
    opts.mu_refinement *= 2;
    const double value = airy2_pointwise_quadrature(u, s, u_prime, s_prime, opts);
    if (std::abs(value - previous) <= kPointwiseTol) return value;
    previous = value;
  }
  return previous;
}

double airy1_kernel(double u, double s, double u_prime, double s_prime) {
  check_finite({u, s, u_prime, s_prime}, "airy1_kernel");
  const double tau = u_prime - u;
  const double sum = s + s_prime;
  double value = airy_ai_times_exp(sum + tau * tau, tau * sum + 2.0 / 3.0 * tau * tau * tau);
  if (tau > 0) {
    const double diff = s_prime - s;
    value -= std::exp(-diff * diff / (4 * tau) - kLogSqrt4Pi - 0.5 * std::log(tau));
  }
  return value;
}

double kernel(Process p, double u, double s, double u_prime, double s_prime) {
  return p == Process::Airy1 ? airy1_kernel(u, s, u_prime, s_prime)
                             : airy2_kernel(u, s, u_prime, s_prime);
}

Eigen::MatrixXd airy2_kernel_matrix(double u, const Eigen::VectorXd& x, double u_prime,
                                    const Eigen::VectorXd& y, const Airy2Options& opts) {
  if (x.size() == 0 || y.size() == 0) return Eigen::MatrixXd(x.size(), y.size());
  const Airy2Branch branch = airy2_branch(u, u_prime, x.minCoeff(), y.minCoeff(), opts);
  switch (branch) {
    case Airy2Branch::EqualTime:
      return airy_kernel_matrix(x, y);
    case Airy2Branch::HalfLine:
    case Airy2Branch::Subtraction: {
      const auto lambda = airy2_lambda_rule(opts);
      const double c = (u_prime - u) / 2;
      Eigen::MatrixXd k = airy_half_line_factor(x, lambda, c) *
                          airy_half_line_factor(y, lambda, c).transpose();
      if (branch == Airy2Branch::Subtraction) k -= airy2_full_line_matrix(u_prime - u, x, y);
      return k;
    }
    case Airy2Branch::Direct: {
      const double tau = u_prime - u;
      const auto mu = airy2_mu_rule(tau, std::min(x.minCoeff(), y.minCoeff()), opts);
      return -(airy_negative_half_line_factor(x, mu, tau) *
               airy_negative_half_line_factor(y, mu, tau).transpose());
    }
  }
  throw ArgumentError("airy2_kernel_matrix: unknown branch");
}

Eigen::MatrixXd airy1_kernel_matrix(double u, const Eigen::VectorXd& x, double u_prime,
                                    const Eigen::VectorXd& y) {
  Eigen::MatrixXd k(x.size(), y.size());
  for (Eigen::Index q = 0; q < y.size(); ++q)
    for (Eigen::Index p = 0; p < x.size(); ++p) k(p, q) = airy1_kernel(u, x[p], u_prime, y[q]);
  return k;
}

Eigen::MatrixXd kernel_matrix(Process p, double u, const Eigen::VectorXd& x, double u_prime,
                              const Eigen::VectorXd& y, const Airy2Options& opts) {
  return p == Process::Airy1 ? airy1_kernel_matrix(u, x, u_prime, y)
                             : airy2_kernel_matrix(u, x, u_prime, y, opts);
}

}  // namespace airycov
