#include "airycov/covariance.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "airycov/errors.hpp"
#include "airycov/parallel.hpp"
#include "airycov/processes.hpp"
#include "airycov/quadrature.hpp"

namespace airycov {

namespace {

constexpr std::array<int, 12> kNystromLadder{24, 32, 40, 48, 64, 80, 96, 128, 160, 192, 256, 320};
constexpr std::array<double, 4> kPilotLevels{-4.0, -2.0, 0.0, 2.0};
constexpr std::array<std::pair<double, double>, 5> kPilotPairs{
    {{-3.0, -3.0}, {-1.0, -1.0}, {1.0, 1.0}, {-3.0, 0.0}, {0.0, -3.0}}};

// The lowest threshold is always a pilot: oscillation of the kernels there
// sets the Nystrom size the whole grid needs.
std::vector<double> pilot_values(Process process, double u, double lowest, int n,
                                 const Airy2Options& airy2) {
  JointCdfEvaluator ev(process, u, n, std::min(lowest, -4.0), airy2);
  std::vector<double> out;
  ev.prepare(lowest);
  out.push_back(ev.one_point(lowest));
  if (u > 0) out.push_back(ev.two_point(lowest, lowest));
  if (u == 0) {
    for (double s : kPilotLevels) {
      ev.prepare(s);
      out.push_back(ev.one_point(s));
    }
    return out;
  }
  for (auto [s1, s2] : kPilotPairs) {
    ev.prepare(s1);
    ev.prepare(s2);
    out.push_back(ev.two_point(s1, s2));
  }
  return out;
}

double tail(double f) { return std::min(f, 1.0 - f); }

void check_options(const CovarianceOptions& o) {
  if (!(o.truncation > 0) || !(o.small_u_truncation > 0))
    throw ArgumentError("covariance: truncation must be positive");
  if (o.cc_points < 3 || o.small_u_cc_points < 3)
    throw ArgumentError("covariance: need at least 3 quadrature points per dimension");
  if (o.nystrom_n < 0 || 2 * o.nystrom_n > kMaxAssembledSize)
    throw ArgumentError("covariance: bad Nystrom size");
  if (!(o.pilot_tol > 0)) throw ArgumentError("covariance: pilot tolerance must be positive");
  if (!(o.skip_bound >= 0)) throw ArgumentError("covariance: skip bound must be >= 0");
}

}  // namespace

int select_nystrom_n(Process process, double u, double lowest, double tol,
                     const Airy2Options& airy2) {
  if (!std::isfinite(lowest)) throw ArgumentError("select_nystrom_n: lowest threshold must be finite");
  std::vector<double> prev = pilot_values(process, u, lowest, kNystromLadder[0], airy2);
  for (std::size_t k = 1; k < kNystromLadder.size(); ++k) {
    std::vector<double> next = pilot_values(process, u, lowest, kNystromLadder[k], airy2);
    double diff = 0;
    for (std::size_t i = 0; i < prev.size(); ++i) diff = std::max(diff, std::abs(next[i] - prev[i]));
    if (diff <= tol) return kNystromLadder[k - 1];
    if (k + 1 == kNystromLadder.size()) {
      std::ostringstream msg;
      msg << "select_nystrom_n: pilot determinants still differ by " << diff << " at n = "
          << kNystromLadder[k] << " (u = " << u << ")";
      throw ConvergenceError(msg.str(), prev.front(), next.front());
    }
    prev = std::move(next);
  }
  return kNystromLadder.back();
}

CovariancePoint covariance_point(Process process, double u, const CovarianceOptions& opts) {
  if (!std::isfinite(u) || u < 0) throw ArgumentError("covariance_point: need finite u >= 0");
  check_options(opts);

  CovariancePoint out;
  out.u = u;
  const bool enlarged = process == Process::Airy1 && u <= opts.small_u_limit;
  out.truncation = enlarged ? opts.small_u_truncation : opts.truncation;
  out.cc_points = enlarged ? opts.small_u_cc_points : opts.cc_points;
  const double T = out.truncation;
  out.nystrom_n = opts.nystrom_n > 0 ? opts.nystrom_n
                                     : select_nystrom_n(process, u, -T, opts.pilot_tol, opts.airy2);

  const auto rule = clenshaw_curtis<double>(out.cc_points - 1, -T, T);
  const Eigen::Index m = rule.size();
  const auto& s = rule.nodes;
  const auto& w = rule.weights;

  JointCdfEvaluator ev(process, u, out.nystrom_n, -T, opts.airy2);
  for (Eigen::Index i = 0; i < m; ++i) ev.prepare(s[i]);
  Eigen::VectorXd F(m);
  for (Eigen::Index i = 0; i < m; ++i) F[i] = ev.one_point(s[i]);

  if (u == 0) {
    // On the diagonal F2 = F(min(s1, s2)), and the double integral collapses to
    // int 2 (T - s) F(s) ds - (int F)^2, which is smooth where the 2-D
    // integrand has a kink.
    double first = 0, second = 0;
    for (Eigen::Index i = 0; i < m; ++i) {
      first += w[i] * 2.0 * (T - s[i]) * F[i];
      second += w[i] * F[i];
    }
    out.value = first - second * second;
    out.evaluated = m;
    for (Eigen::Index i : {Eigen::Index{0}, m - 1})
      for (Eigen::Index j = 0; j < m; ++j)
        out.boundary_max = std::max(out.boundary_max, std::abs(F[std::min(i, j)] - F[i] * F[j]));
    out.truncation_warning = out.boundary_max > opts.boundary_warning;
    return out;
  }

  Eigen::MatrixXd integrand = Eigen::MatrixXd::Zero(m, m);
  Eigen::MatrixXd bound = Eigen::MatrixXd::Zero(m, m);
  std::vector<unsigned char> evaluated(static_cast<std::size_t>(m * m), 0);
  parallel_for(static_cast<std::size_t>(m), [&](std::size_t row) {
    const auto i = static_cast<Eigen::Index>(row);
    for (Eigen::Index j = 0; j < m; ++j) {
      const double b = std::min(tail(F[i]), tail(F[j]));
      bound(i, j) = std::max(b, 0.0);
      if (b <= opts.skip_bound) continue;
      integrand(i, j) = ev.two_point(s[i], s[j]) - F[i] * F[j];
      evaluated[static_cast<std::size_t>(i * m + j)] = 1;
    }
  });

  double total = 0;
  for (Eigen::Index i = 0; i < m; ++i) {
    double row = 0;
    for (Eigen::Index j = 0; j < m; ++j) row += w[j] * integrand(i, j);
    total += w[i] * row;
  }
  out.value = total;
  out.evaluated = std::count(evaluated.begin(), evaluated.end(), 1);
  out.skipped = m * m - out.evaluated;
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      if (i != 0 && j != 0 && i != m - 1 && j != m - 1) continue;
      const double v = evaluated[static_cast<std::size_t>(i * m + j)] ? std::abs(integrand(i, j))
                                                                      : bound(i, j);
      out.boundary_max = std::max(out.boundary_max, v);
    }
  }
  out.truncation_warning = out.boundary_max > opts.boundary_warning;
  return out;
}

CovCurve covariance_curve(Process process, double umax, double du, const CovarianceOptions& opts) {
  if (!std::isfinite(umax) || !std::isfinite(du) || !(du > 0) || umax < 0 || umax > 10)
    throw ArgumentError("covariance_curve: need du > 0 and 0 <= umax <= 10");
  check_options(opts);
  const auto count = static_cast<std::size_t>(std::floor(umax / du + 1e-9)) + 1;

  CovCurve curve;
  curve.tag = to_string(process);
  for (std::size_t k = 0; k < count; ++k) {
    const double u = static_cast<double>(k) * du;
    curve.grid.push_back(u);
    try {
      CovariancePoint p = covariance_point(process, u, opts);
      curve.values.push_back(p.value);
      curve.failed.push_back(false);
      curve.errors.emplace_back();
      curve.details.push_back(p);
    } catch (const std::exception& e) {
      if (dynamic_cast<const ArgumentError*>(&e)) throw;
      curve.values.push_back(std::numeric_limits<double>::quiet_NaN());
      curve.failed.push_back(true);
      curve.errors.emplace_back(e.what());
      CovariancePoint p;
      p.u = u;
      p.value = curve.values.back();
      curve.details.push_back(p);
    }
  }
  return curve;
}

double derivative_at_zero(const std::function<double(double)>& g) {
  if (!g) throw ArgumentError("derivative_at_zero: empty function");
  const double g0 = g(0.0);
  const auto quotient = [&](double h) { return (g(h) - g0) / h; };
  const double d08 = quotient(0.08), d04 = quotient(0.04), d02 = quotient(0.02);
  // Eliminate the O(h) and O(h^2) terms of the one-sided quotient.
  const double r1 = 2 * d04 - d08;
  const double r2 = 2 * d02 - d04;
  return (4 * r2 - r1) / 3;
}

double derivative_at_zero(Process process, const CovarianceOptions& opts) {
  return derivative_at_zero([&](double u) { return covariance_point(process, u, opts).value; });
}

Moments one_point_moments(Process process, double truncation, int cc_points, double tol) {
  if (!(truncation > 0)) throw ArgumentError("one_point_moments: truncation must be positive");
  if (cc_points < 3) throw ArgumentError("one_point_moments: need at least 3 points");
  const auto left = clenshaw_curtis<double>(cc_points - 1, -truncation, 0.0);
  const auto right = clenshaw_curtis<double>(cc_points - 1, 0.0, truncation);

  double mean = 0, second = 0;
  for (Eigen::Index i = 0; i < left.size(); ++i) {
    const double s = left.nodes[i];
    const double f = one_point_cdf(process, s, tol);
    mean -= left.weights[i] * f;
    second += left.weights[i] * (-2 * s) * f;
  }
  for (Eigen::Index i = 0; i < right.size(); ++i) {
    const double s = right.nodes[i];
    const double g = 1.0 - one_point_cdf(process, s, tol);
    mean += right.weights[i] * g;
    second += right.weights[i] * 2 * s * g;
  }
  return {mean, second - mean * mean};
}

}  // namespace airycov
