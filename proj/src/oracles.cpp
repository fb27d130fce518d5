#include "airycov/oracles.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "airycov/airy.hpp"
#include "airycov/errors.hpp"
#include "airycov/quadrature.hpp"

namespace airycov::oracle {

namespace {

// Composite Gauss-Legendre over [a, b] with panels of width <= h.
template <typename F>
double panel_integral(F&& f, double a, double b, double h, int points) {
  const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / h)));
  const auto ref = gauss_legendre<double>(points, 0.0, 1.0);
  const double width = (b - a) / panels;
  double total = 0;
  for (int p = 0; p < panels; ++p) {
    const double left = a + p * width;
    double part = 0;
    for (Eigen::Index i = 0; i < ref.size(); ++i) part += ref.weights[i] * f(left + width * ref.nodes[i]);
    total += width * part;
  }
  return total;
}

double damping_length(double t) { return std::min(45.0 / t, 1000.0); }

}  // namespace

double airy_contour_integral(double x) {
  const std::complex<double> w = std::polar(1.0, std::numbers::pi / 6);
  const std::complex<double> iw = std::complex<double>(0, 1) * w;
  const auto f = [&](double r) { return std::real(w * std::exp(-r * r * r / 3 + iw * (x * r))); };
  return panel_integral(f, 0.0, 14.0, 0.125, 20) / std::numbers::pi;
}

double airy2_full_line(double t, double s, double s_prime) {
  if (!(t > 0)) throw ArgumentError("oracle::airy2_full_line: need t > 0");
  const double lower = -damping_length(t) - std::min(s, s_prime);
  const double upper = 45.0 - std::min(s, s_prime);
  const auto f = [&](double l) { return std::exp(t * l) * airy_ai(s + l).ai * airy_ai(s_prime + l).ai; };
  return panel_integral(f, std::max(lower, kAiryMinArgument - std::min(s, s_prime)), upper, 0.125, 16);
}

double airy2_negative_half_line(double t, double s, double s_prime) {
  if (!(t > 0)) throw ArgumentError("oracle::airy2_negative_half_line: need t > 0");
  const double lower = std::max(-damping_length(t), kAiryMinArgument - std::min(s, s_prime));
  const auto f = [&](double l) { return std::exp(t * l) * airy_ai(s + l).ai * airy_ai(s_prime + l).ai; };
  return -panel_integral(f, lower, 0.0, 0.125, 16);
}

double jacobi_largest_eigenvalue(const Eigen::MatrixXd& input) {
  if (input.rows() != input.cols() || input.rows() == 0)
    throw ArgumentError("oracle::jacobi_largest_eigenvalue: need a square matrix");
  Eigen::MatrixXd a = 0.5 * (input + input.transpose());
  const Eigen::Index n = a.rows();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off <= 1e-30 * a.squaredNorm()) break;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (a(p, q) == 0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
        const double c = 1 / std::sqrt(t * t + 1), s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  return a.diagonal().maxCoeff();
}

}  // namespace airycov::oracle
