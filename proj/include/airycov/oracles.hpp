#pragma once

// Independent reference computations used by the self-test and the test
// suites. Each one takes a different numerical route from the production code.

#include <Eigen/Core>

namespace airycov::oracle {

/// Ai(x) from Ai(x) = (1/pi) Re int_0^inf w exp(-r^3/3 + i x w r) dr with
/// w = e^{i pi/6}, the cosine integral rotated onto the steepest-descent rays.
/// Good to ~1e-12 for |x| <= 10.
double airy_contour_integral(double x);

/// Brute-force panel quadrature of int e^{t lambda} Ai(s+lambda) Ai(s'+lambda)
/// over the whole line, t > 0.
double airy2_full_line(double t, double s, double s_prime);

/// Brute-force panel quadrature of -int_{-inf}^0 e^{t lambda} Ai(s+lambda)
/// Ai(s'+lambda) d lambda, t > 0: the extended Airy2 kernel for u' - u = t.
double airy2_negative_half_line(double t, double s, double s_prime);

/// Largest eigenvalue of a real symmetric matrix by cyclic Jacobi rotations.
double jacobi_largest_eigenvalue(const Eigen::MatrixXd& m);

}  // namespace airycov::oracle
