#include "sparsemt/normal.hpp"

#include <array>
#include <cmath>

#include "sparsemt/error.hpp"

namespace sparsemt::normal {
namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Lo = -4.833646656726457e-17;  // 1/sqrt(2) - kInvSqrt2
constexpr double kTwoOverSqrtPi = 1.12837916709551257390;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

// Acklam's rational approximation to the lower quantile, |rel err| < 1.2e-9.
constexpr std::array<double, 6> kA = {-3.969683028665376e+01, 2.209460984245205e+02,
                                      -2.759285104469687e+02, 1.383577518672690e+02,
                                      -3.066479806614716e+01, 2.506628277459239e+00};
constexpr std::array<double, 5> kB = {-5.447609879822406e+01, 1.615858368580409e+02,
                                      -1.556989798598866e+02, 6.680131188771972e+01,
                                      -1.328068155288572e+01};
constexpr std::array<double, 6> kC = {-7.784894002430293e-03, -3.223964580411365e-01,
                                      -2.400758277161838e+00, -2.549732539343734e+00,
                                      4.374664141464968e+00,  2.938163982698783e+00};
constexpr std::array<double, 4> kD = {7.784695709041462e-03, 3.224671290700398e-01,
                                      2.445134137142996e+00, 3.754408661907416e+00};
constexpr double kLowRegion = 0.02425;

// x / sqrt(2) as hi + lo. Rounding the scaled argument costs a relative
// error of about x^2 eps in the tails, which lo lets us undo.
struct Scaled {
  double hi;
  double lo;
};

Scaled scale(double x) {
  const double hi = x * kInvSqrt2;
  if (!std::isfinite(x)) return {hi, 0.0};
  return {hi, std::fma(x, kInvSqrt2, -hi) + x * kInvSqrt2Lo};
}

double erfc_scaled(double x) {
  const Scaled a = scale(x);
  return std::erfc(a.hi) - a.lo * kTwoOverSqrtPi * std::exp(-a.hi * a.hi);
}

double erf_scaled(double x) {
  const Scaled a = scale(x);
  return std::erf(a.hi) + a.lo * kTwoOverSqrtPi * std::exp(-a.hi * a.hi);
}

double rational_lower_quantile(double p) {
  if (p < kLowRegion) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((kC[0] * q + kC[1]) * q + kC[2]) * q + kC[3]) * q + kC[4]) * q + kC[5]) /
           ((((kD[0] * q + kD[1]) * q + kD[2]) * q + kD[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((kA[0] * r + kA[1]) * r + kA[2]) * r + kA[3]) * r + kA[4]) * r + kA[5]) * q /
         (((((kB[0] * r + kB[1]) * r + kB[2]) * r + kB[3]) * r + kB[4]) * r + 1.0);
}

// p in (0, 0.5]; result <= 0, where cdf is a pure tail evaluation.
double lower_quantile(double p) {
  double x = rational_lower_quantile(p);
  for (int step = 0; step < 2; ++step) {
    const double density = pdf(x);
    if (density == 0.0) break;
    const double u = (cdf(x) - p) / density;
    x -= u / (1.0 + 0.5 * x * u);  // Halley
  }
  return x;
}

}  // namespace

double pdf(double x) {
  detail::require_finite(x, "x");
  return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

double cdf(double x) {
  if (std::isnan(x)) detail::fail_argument("x must not be NaN");
  return 0.5 * erfc_scaled(-x);
}

double sf(double x) {
  if (std::isnan(x)) detail::fail_argument("x must not be NaN");
  return 0.5 * erfc_scaled(x);
}

double two_sided_tail(double c) {
  if (std::isnan(c) || c < 0.0) detail::fail_argument("c must be >= 0");
  return erfc_scaled(c);
}

double two_sided_inner(double c) {
  if (std::isnan(c) || c < 0.0) detail::fail_argument("c must be >= 0");
  return erf_scaled(c);
}

double quantile(double q) {
  detail::require_open_unit(q, "q");
  if (q <= 0.5) return lower_quantile(q);
  // 1 - q is exact for q in [0.5, 1).
  return -lower_quantile(1.0 - q);
}

double upper_quantile(double tail) {
  detail::require_open_unit(tail, "tail");
  if (tail <= 0.5) return -lower_quantile(tail);
  return lower_quantile(1.0 - tail);
}

TailApprox tail_approx(double c) {
  if (!(c > 0.0) || !std::isfinite(c)) detail::fail_argument("c must be > 0 and finite");
  // Mills bounds c/(1+c^2) < (1-Phi(c))/phi(c) < 1/c give 0 < z1(c) < 1/(1+c^2).
  const double c_sq = c * c;
  return {2.0 * pdf(c) / c, c_sq / (1.0 + c_sq)};
}

}  // namespace sparsemt::normal
