#pragma once

// Pointwise and block evaluation of the extended Airy2 kernel and the Airy1
// kernel. Blocks are the building material of the Nystrom determinants in
// fredholm.hpp; the factor functions below let callers cache the expensive
// Airy tables per node set and reuse them across many blocks.

#include <Eigen/Core>

#include <string>
#include <string_view>

#include "airycov/quadrature.hpp"

namespace airycov {

enum class Process { Airy1, Airy2 };

std::string_view to_string(Process p);
/// Accepts "airy1"/"airy2" (case-insensitive); throws ArgumentError otherwise.
Process parse_process(std::string_view name);

struct Airy2Options {
  /// Size of the tangent-mapped rule for the half-line lambda integral.
  int lambda_points = 160;
  double lambda_scale = 10.0;
  /// Largest log of the cancellation factor accepted in the subtraction
  /// route for u' > u; beyond it the negative half-line is integrated directly.
  double max_log_cancellation = 7.0;
  /// Multiplier on the per-panel Gauss-Legendre counts of the direct route.
  int mu_refinement = 1;
};

/// How a block of the extended Airy2 kernel is computed.
enum class Airy2Branch {
  EqualTime,    // closed-form Airy kernel
  HalfLine,     // u' < u: decaying half-line integral
  Subtraction,  // u' > u: half-line integral minus the full-line closed form
  Direct,       // u' > u: negative half-line integral, exponentially damped
};

/// (Ai(x)Ai'(y) - Ai'(x)Ai(y)) / (x - y), with the diagonal and near-diagonal
/// limits handled by a local Taylor expansion.
double airy_kernel(double x, double y);

/// Full-line integral of e^{t lambda} Ai(s+lambda) Ai(s'+lambda), t > 0:
/// (4 pi t)^{-1/2} exp(-(s-s')^2/(4t) - t(s+s')/2 + t^3/12).
double airy2_full_line(double t, double s, double s_prime);

/// Extended Airy2 kernel K(u,s; u',s'), evaluated by quadrature in lambda with
/// the rule size doubled from 40 until successive values agree to 1e-13
/// (capped at 320).
double airy2_kernel(double u, double s, double u_prime, double s_prime);

/// Airy1 kernel K(u,s; u',s'), closed form.
double airy1_kernel(double u, double s, double u_prime, double s_prime);

double kernel(Process p, double u, double s, double u_prime, double s_prime);

/// Branch used for the block between node sets with smallest nodes x_min,
/// y_min.
Airy2Branch airy2_branch(double u, double u_prime, double x_min, double y_min,
                         const Airy2Options& opts = {});

/// Half-line rule for lambda in (0, infinity).
QuadratureRule<double> airy2_lambda_rule(const Airy2Options& opts = {});

/// Composite Gauss-Legendre rule for mu in (0, mu_max) used by the direct
/// route; panel sizes follow the oscillation of Ai(x - mu) for x >= x_min and
/// mu_max is set by the damping e^{-tau mu}.
QuadratureRule<double> airy2_mu_rule(double tau, double x_min, const Airy2Options& opts = {});

/// F(p,l) = sqrt(w_l) Ai(x_p + lambda_l) e^{c lambda_l}. With c = (u'-u)/2,
/// F_x F_y^T is the half-line integral between node sets x and y.
Eigen::MatrixXd airy_half_line_factor(const Eigen::VectorXd& x,
                                      const QuadratureRule<double>& lambda_rule, double c);

/// F(p,l) = sqrt(w_l) Ai(x_p - mu_l) e^{-tau mu_l / 2}; -F_x F_y^T is the
/// direct-route kernel block.
Eigen::MatrixXd airy_negative_half_line_factor(const Eigen::VectorXd& x,
                                               const QuadratureRule<double>& mu_rule, double tau);

/// Closed-form full-line matrix airy2_full_line(tau, x_p, y_q).
Eigen::MatrixXd airy2_full_line_matrix(double tau, const Eigen::VectorXd& x,
                                       const Eigen::VectorXd& y);

Eigen::MatrixXd airy_kernel_matrix(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

/// Block K(u, x_p; u', y_q) of the extended Airy2 kernel.
Eigen::MatrixXd airy2_kernel_matrix(double u, const Eigen::VectorXd& x, double u_prime,
                                    const Eigen::VectorXd& y, const Airy2Options& opts = {});

/// Block K(u, x_p; u', y_q) of the Airy1 kernel.
Eigen::MatrixXd airy1_kernel_matrix(double u, const Eigen::VectorXd& x, double u_prime,
                                    const Eigen::VectorXd& y);

Eigen::MatrixXd kernel_matrix(Process p, double u, const Eigen::VectorXd& x, double u_prime,
                              const Eigen::VectorXd& y, const Airy2Options& opts = {});

}  // namespace airycov
