#pragma once

#include <limits>

namespace airycov {

/// Ai and Ai' at one real argument.
struct AiryValue {
  double x = 0;
  double ai = 0;
  double ai_prime = 0;
};

/// Most negative argument accepted by airy_ai; below it the phase of the
/// oscillatory asymptotics can no longer be resolved to 1e-13.
inline constexpr double kAiryMinArgument = -1000.0;

/// Ai(x), Ai'(x) for x >= kAiryMinArgument. Relative accuracy ~1e-15 for
/// x >= 0 (values underflow to zero past x ~ 105), absolute ~1e-15 below.
/// Throws ArgumentError for non-finite x and RangeError below the range.
AiryValue airy_ai(double x);

/// Exponentially scaled variant: for x > 0 returns Ai(x) e^{zeta} and
/// Ai'(x) e^{zeta} with zeta = (2/3) x^{3/2}; identical to airy_ai for x <= 0.
AiryValue airy_ai_scaled(double x);

/// zeta = (2/3) x^{3/2} for x > 0, zero otherwise; the exponent removed by
/// airy_ai_scaled.
double airy_zeta(double x);

/// Ai(x) * exp(c), evaluated without forming exp(c) or Ai(x) separately when
/// either would overflow or underflow.
double airy_ai_times_exp(double x, double c);

namespace detail {

/// Taylor evaluation from the tabulated anchors; valid on [-10.5, 10.5].
AiryValue airy_from_table(double x);
/// Large-|x| asymptotic expansions; accurate for |x| >= 9.5.
AiryValue airy_asymptotic(double x);

/// Scales every Taylor-path Ai value by (1 + rel). Only for negative controls
/// in the self-test; zero restores normal operation.
void inject_series_perturbation(double rel);

}  // namespace detail

}  // namespace airycov
