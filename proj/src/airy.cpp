#include "airycov/airy.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "airycov/errors.hpp"

namespace airycov {

namespace {

// Anchors x_j = kTableLo + j * kTableStep carry Ai and Ai' to long double
// accuracy. Between anchors Ai is expanded in its Taylor series, whose
// coefficients follow from Ai'' = x Ai.
constexpr double kTableLo = -10.0;
constexpr double kTableHi = 10.0;
constexpr double kTableStep = 0.25;
constexpr int kTableSize = 81;
constexpr double kTableReach = 10.5;

struct Anchor {
  double x;
  double ai;
  double ai_prime;
};

std::atomic<double> g_series_perturbation{0.0};

// Ai(x) e^{zeta} and Ai'(x) e^{zeta} for large positive x.
template <typename Real>
void asymptotic_positive_scaled(Real x, Real& ai, Real& aip) {
  using std::abs;
  using std::pow;
  using std::sqrt;
  const Real sqrt_pi = sqrt(std::numbers::pi_v<Real>);
  const Real zeta = Real(2) / 3 * x * sqrt(x);
  const Real eps = std::numeric_limits<Real>::epsilon() / 8;

  const Real inv_zeta = 1 / zeta;
  Real u = 1, sum_u = 1, sum_v = 1, term_prev = 1, zk_inv = 1;
  for (int k = 1; k < 80; ++k) {
    u *= Real((6 * k - 5) * (6 * k - 3) * (6 * k - 1)) / Real((2 * k - 1) * 216 * k);
    const Real v = -Real(6 * k + 1) / Real(6 * k - 1) * u;
    zk_inv *= inv_zeta;
    const Real sign = (k % 2 == 0) ? Real(1) : Real(-1);
    const Real tu = sign * u * zk_inv;
    if (abs(tu) > abs(term_prev)) break;  // asymptotic series starts diverging
    sum_u += tu;
    sum_v += sign * v * zk_inv;
    term_prev = tu;
    if (abs(tu) < eps * abs(sum_u)) break;
  }
  const Real x14 = pow(x, Real(0.25));
  ai = sum_u / (2 * sqrt_pi * x14);
  aip = -x14 / (2 * sqrt_pi) * sum_v;
}

// Ai(-z), Ai'(-z) for large positive z; phase handled in long double.
void asymptotic_negative(long double z, long double& ai, long double& aip) {
  using std::abs;
  const long double sqrt_pi = std::sqrt(std::numbers::pi_v<long double>);
  const long double zeta = 2.0L / 3.0L * z * std::sqrt(z);
  const long double eps = std::numeric_limits<long double>::epsilon() / 8;

  // Even and odd parts of the u_k and v_k series with alternating signs.
  long double u = 1, even_u = 1, odd_u = 0, even_v = 1, odd_v = 0, term_prev = 1;
  for (int k = 1; k < 80; ++k) {
    u *= static_cast<long double>((6 * k - 5) * (6 * k - 3) * (6 * k - 1)) /
         static_cast<long double>((2 * k - 1) * 216 * k);
    const long double v = -static_cast<long double>(6 * k + 1) / (6 * k - 1) * u;
    const long double zk = std::pow(zeta, static_cast<long double>(k));
    const long double tu = u / zk;
    if (tu > term_prev) break;
    // Index k = 2m carries (-1)^m; k = 2m+1 carries (-1)^m.
    const long double sign = ((k / 2) % 2 == 0) ? 1.0L : -1.0L;
    if (k % 2 == 0) {
      even_u += sign * tu;
      even_v += sign * v / zk;
    } else {
      odd_u += sign * tu;
      odd_v += sign * v / zk;
    }
    term_prev = tu;
    if (tu < eps) break;
  }
  const long double theta = zeta - std::numbers::pi_v<long double> / 4;
  const long double c = std::cos(theta);
  const long double s = std::sin(theta);
  const long double z14 = std::pow(z, 0.25L);
  ai = (c * even_u + s * odd_u) / (sqrt_pi * z14);
  aip = z14 / sqrt_pi * (s * even_v - c * odd_v);
}

// One Taylor step of length h from (x0, ai, aip), in long double.
void taylor_step(long double x0, long double h, long double& ai, long double& aip) {
  long double c_km1 = 0, c_k = ai, c_kp1 = aip;  // c_{k-1}, c_k, c_{k+1}
  long double hk = 1, sum = 0, dsum = 0;
  for (int k = 0; k < 80; ++k) {
    sum += c_k * hk;
    dsum += (k + 1) * c_kp1 * hk;
    const long double c_kp2 = (x0 * c_k + c_km1) / ((k + 2) * (k + 1));
    c_km1 = c_k;
    c_k = c_kp1;
    c_kp1 = c_kp2;
    hk *= h;
    if (k > 8 && std::abs(c_k * hk) + std::abs(c_kp1 * hk * h) < 1e-24L * (std::abs(sum) + std::abs(dsum)))
      break;
  }
  ai = sum;
  aip = dsum;
}

std::array<Anchor, kTableSize> build_table() {
  std::array<Anchor, kTableSize> table{};
  const int zero = static_cast<int>(std::lround(-kTableLo / kTableStep));

  // Positive side: start from the asymptotic expansion at the right end and
  // walk left, where Ai is the dominant solution.
  long double ai = 0, aip = 0;
  long double x = kTableHi;
  asymptotic_positive_scaled<long double>(x, ai, aip);
  const long double decay = std::exp(-2.0L / 3.0L * x * std::sqrt(x));
  ai *= decay;
  aip *= decay;
  table[kTableSize - 1] = {kTableHi, static_cast<double>(ai), static_cast<double>(aip)};
  for (int j = kTableSize - 2; j > zero; --j) {
    taylor_step(x, -static_cast<long double>(kTableStep), ai, aip);
    x -= kTableStep;
    table[j] = {kTableLo + j * kTableStep, static_cast<double>(ai), static_cast<double>(aip)};
  }

  // Negative side: closed-form values at the origin, then walk left through
  // the oscillatory region.
  ai = 1.0L / (std::pow(3.0L, 2.0L / 3.0L) * std::tgamma(2.0L / 3.0L));
  aip = -1.0L / (std::pow(3.0L, 1.0L / 3.0L) * std::tgamma(1.0L / 3.0L));
  x = 0;
  table[zero] = {0.0, static_cast<double>(ai), static_cast<double>(aip)};
  for (int j = zero - 1; j >= 0; --j) {
    taylor_step(x, -static_cast<long double>(kTableStep), ai, aip);
    x -= kTableStep;
    table[j] = {kTableLo + j * kTableStep, static_cast<double>(ai), static_cast<double>(aip)};
  }
  return table;
}

const std::array<Anchor, kTableSize>& table() {
  static const std::array<Anchor, kTableSize> t = build_table();
  return t;
}

void check_argument(double x) {
  if (!std::isfinite(x)) throw ArgumentError("airy_ai: argument must be finite");
  if (x < kAiryMinArgument)
    throw RangeError("airy_ai: argument " + std::to_string(x) + " below supported range");
}

}  // namespace

double airy_zeta(double x) { return x > 0 ? 2.0 / 3.0 * x * std::sqrt(x) : 0.0; }

namespace detail {

void inject_series_perturbation(double rel) { g_series_perturbation.store(rel); }

AiryValue airy_from_table(double x) {
  if (!(x >= -kTableReach && x <= kTableReach))
    throw RangeError("airy_from_table: argument outside table reach");
  const auto& t = table();
  int j = static_cast<int>(std::lround((x - kTableLo) / kTableStep));
  j = std::clamp(j, 0, kTableSize - 1);
  const Anchor& a = t[j];
  const double h = x - a.x;

  double c_km1 = 0, c_k = a.ai, c_kp1 = a.ai_prime;
  double hk = 1, sum = 0, dsum = 0;
  const double scale = std::abs(a.ai) + std::abs(a.ai_prime);
  for (int k = 0; k < 60; ++k) {
    sum += c_k * hk;
    dsum += (k + 1) * c_kp1 * hk;
    const double c_kp2 = (a.x * c_k + c_km1) / ((k + 2) * (k + 1));
    c_km1 = c_k;
    c_k = c_kp1;
    c_kp1 = c_kp2;
    hk *= h;
    if (k > 2 && std::abs(c_k * hk) + std::abs(c_kp1 * hk) < 1e-18 * scale) break;
  }
  const double perturb = g_series_perturbation.load(std::memory_order_relaxed);
  if (perturb != 0.0) sum *= 1.0 + perturb;
  return {x, sum, dsum};
}

AiryValue airy_asymptotic(double x) {
  if (!(std::abs(x) >= 1.0)) throw RangeError("airy_asymptotic: need |x| >= 1");
  if (x > 0) {
    double ai = 0, aip = 0;
    asymptotic_positive_scaled<double>(x, ai, aip);
    // zeta reaches several hundred here; its rounding would dominate in double.
    const long double xl = x;
    const double decay = static_cast<double>(std::exp(-2.0L / 3.0L * xl * std::sqrt(xl)));
    return {x, ai * decay, aip * decay};
  }
  long double ai = 0, aip = 0;
  asymptotic_negative(-static_cast<long double>(x), ai, aip);
  return {x, static_cast<double>(ai), static_cast<double>(aip)};
}

}  // namespace detail

AiryValue airy_ai(double x) {
  check_argument(x);
  if (x > kTableHi) return detail::airy_asymptotic(x);
  if (x < kTableLo) return detail::airy_asymptotic(x);
  return detail::airy_from_table(x);
}

AiryValue airy_ai_scaled(double x) {
  check_argument(x);
  if (x > kTableHi) {
    AiryValue v{x, 0, 0};
    asymptotic_positive_scaled<double>(x, v.ai, v.ai_prime);
    return v;
  }
  if (x > 0) {
    AiryValue v = detail::airy_from_table(x);
    const double grow = std::exp(airy_zeta(x));
    v.ai *= grow;
    v.ai_prime *= grow;
    return v;
  }
  return airy_ai(x);
}

double airy_ai_times_exp(double x, double c) {
  if (x <= 0) return airy_ai(x).ai * std::exp(c);
  return airy_ai_scaled(x).ai * std::exp(c - airy_zeta(x));
}

}  // namespace airycov
