#pragma once

// Covariances g(u) = Cov(A(u), A(0)) of the Airy processes from the
// Hoeffding identity
//
//   Cov = int int [F2(u; s1, s2) - F(s1) F(s2)] ds1 ds2,
//
// truncated to [-T, T]^2 and integrated by tensor-product Clenshaw-Curtis.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "airycov/kernels.hpp"

namespace airycov {

/// Large-u constant of g2(u) = u^-2 + c u^-4 + O(u^-6); a stored reference
/// value, not computed here.
inline constexpr double kAiry2AsymptoticConstant = -3.542;

struct CovarianceOptions {
  double truncation = 10.0;
  int cc_points = 100;
  /// Airy1 at u <= small_u_limit uses the enlarged settings below.
  double small_u_limit = 0.05;
  double small_u_truncation = 14.0;
  int small_u_cc_points = 160;
  /// Nystrom size; 0 selects it per u by pilot determinants.
  int nystrom_n = 0;
  double pilot_tol = 1e-12;
  /// Grid points where min(F, 1-F) at either threshold is below this bound
  /// contribute at most that much and are not evaluated.
  double skip_bound = 1e-15;
  double boundary_warning = 1e-9;
  Airy2Options airy2{};
};

struct CovariancePoint {
  double u = 0;
  double value = 0;
  double truncation = 0;
  int cc_points = 0;
  int nystrom_n = 0;
  /// Largest |F2 - F F| (or its bound, where skipped) on the boundary of the
  /// truncated square.
  double boundary_max = 0;
  bool truncation_warning = false;
  long evaluated = 0;
  long skipped = 0;
};

CovariancePoint covariance_point(Process process, double u, const CovarianceOptions& opts = {});

/// Smallest Nystrom size on a fixed ladder whose pilot determinants (a few
/// central thresholds plus the lowest one) change by at most tol when moving
/// to the next ladder entry.
int select_nystrom_n(Process process, double u, double lowest, double tol,
                     const Airy2Options& airy2 = {});

/// A sampled covariance function.
struct CovCurve {
  std::string tag;  // process or ensemble name
  std::vector<double> grid;
  std::vector<double> values;
  std::optional<std::vector<double>> stderrs;  // stochastic curves only
  std::vector<bool> failed;                     // per grid point
  std::vector<std::string> errors;              // message per failed point, else empty
  std::vector<CovariancePoint> details;         // deterministic curves only
};

/// covariance_point on {0, du, 2du, ..., umax}; per-point failures are
/// recorded and leave NaN in values.
CovCurve covariance_curve(Process process, double umax, double du,
                          const CovarianceOptions& opts = {});

/// Richardson-extrapolated one-sided difference quotient (g(h) - g(0)) / h
/// over h in {0.08, 0.04, 0.02}.
double derivative_at_zero(Process process, const CovarianceOptions& opts = {});
double derivative_at_zero(const std::function<double(double)>& g);

struct Moments {
  double mean = 0;
  double variance = 0;
};

/// Mean and variance of the one-point law from the truncated tail integrals
/// E X = int_0^T (1 - F) - int_{-T}^0 F and
/// E X^2 = int_0^T 2s (1 - F) + int_{-T}^0 (-2s) F.
Moments one_point_moments(Process process, double truncation = 10.0, int cc_points = 100,
                          double tol = 1e-14);

}  // namespace airycov
