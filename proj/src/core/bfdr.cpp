#include "sparsemt/bfdr.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

#include "sparsemt/error.hpp"
#include "sparsemt/normal.hpp"

namespace sparsemt {
namespace {

double u_of(const MixtureModel& model) { return model.tau_sq() / model.sigma_sq(); }

// Solves decreasing(c_sq) = target on [0, inf). decreasing(0) > target must hold.
// The bracket starts at 4 (log(u f^2) + log(u + 2) + 50) and doubles until the
// sign changes; bisection then runs until the bracket is a few ulps wide.
ThresholdSq solve_decreasing(const MixtureModel& model, double target,
                             const std::function<double(double)>& decreasing) {
  const double u = u_of(model);
  const double log_f = std::log1p(-model.p()) - std::log(model.p());
  double lo = 0.0;
  double hi = 4.0 * (std::max(0.0, std::log(u) + 2.0 * log_f) + std::log(u + 2.0) + 50.0);
  while (decreasing(hi) > target) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) detail::fail_domain("threshold bracket diverged");
  }
  for (int iter = 0; iter < 2000; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (decreasing(mid) > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double err_lo = std::abs(decreasing(lo) - target);
  const double err_hi = std::abs(decreasing(hi) - target);
  return ThresholdSq(err_lo <= err_hi ? lo : hi);
}

}  // namespace

BfdrLevel::BfdrLevel(double alpha) : alpha_(alpha) {
  detail::require_open_unit(alpha, "alpha");
  r_alpha_ = alpha / (1.0 - alpha);
}

double bfdr_of_threshold(const MixtureModel& model, ThresholdSq c_sq) {
  const double p = model.p();
  const double false_part = (1.0 - p) * type1_exact(c_sq);
  const double true_part = p * power_exact(c_sq, u_of(model));
  if (false_part == 0.0) return 0.0;
  return false_part / (false_part + true_part);
}

ThresholdSq bfdr_threshold(const MixtureModel& model, const BfdrLevel& level) {
  const double sup = 1.0 - model.p();
  if (level.alpha() >= sup) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "BFDR level " << level.alpha() << " is not attainable; levels must lie below 1-p = "
        << sup;
    throw LevelOutOfRange(msg.str(), sup);
  }
  return solve_decreasing(model, level.alpha(),
                          [&](double c_sq) { return bfdr_of_threshold(model, ThresholdSq(c_sq)); });
}

double gw_ratio(const MixtureModel& model, ThresholdSq c_sq) {
  const double p = model.p();
  const double t1 = type1_exact(c_sq);
  const double power = power_exact(c_sq, u_of(model));
  if (t1 == 0.0) return 0.0;
  return t1 / ((1.0 - p) * t1 + p * power);
}

ThresholdSq gw_threshold(const MixtureModel& model, const BfdrLevel& level) {
  return solve_decreasing(model, level.alpha(),
                          [&](double c_sq) { return gw_ratio(model, ThresholdSq(c_sq)); });
}

double bfdr_threshold_asymptotic(double f, const BfdrLevel& level,
                                 const AsymptoticConstants& consts) {
  detail::require_positive(f, "f");
  const double log_ratio = std::log(f / level.r_alpha());
  if (!(log_ratio > 1.0)) detail::fail_argument("asymptotic BFDR threshold requires f/r_alpha > e");
  const double D = consts.D();
  return 2.0 * log_ratio - std::log(2.0 * log_ratio) +
         std::log(2.0 / (std::numbers::pi * D * D));
}

double oracle_bfdr_scale(const DerivedParams& derived) {
  if (!(derived.log_v > 0.0)) detail::fail_argument("t_{u,v,delta} requires v > 1");
  return derived.delta * std::sqrt(derived.u * derived.log_v);
}

double oracle_bfdr_asymptotic(const DerivedParams& derived, const AsymptoticConstants& consts) {
  const double t = oracle_bfdr_scale(derived);
  return std::sqrt(2.0 / std::numbers::pi) * std::exp(-0.5 * consts.C()) / (consts.D() * t);
}

double oracle_bfdr_limit(const AsymptoticConstants& consts, double C1) {
  detail::require_finite(C1, "C1");
  if (C1 < 0.0) detail::fail_argument("C1 must be >= 0");
  return 1.0 /
         (1.0 + std::sqrt(0.5 * std::numbers::pi) * std::exp(0.5 * consts.C()) * consts.D() * C1);
}

BfdrDiagnostics bfdr_optimality_diagnostics(const DerivedParams& derived, const BfdrLevel& level) {
  const double log_ratio = derived.log_f - std::log(level.r_alpha());
  const double log_scale = derived.log_f + std::log(derived.delta) + 0.5 * std::log(derived.u);
  if (!(log_ratio > 0.0)) detail::fail_argument("BFDR diagnostics require f/r_alpha > 1");
  if (!(log_scale > 0.0)) detail::fail_argument("BFDR diagnostics require f delta sqrt(u) > 1");

  BfdrDiagnostics out;
  out.s_t = log_scale / log_ratio - 1.0;
  out.cond_w2 = 2.0 * out.s_t * log_ratio - std::log(log_ratio);
  out.t_uvd = derived.log_v > 0.0 ? derived.delta * std::sqrt(derived.u * derived.log_v)
                                  : std::numeric_limits<double>::quiet_NaN();
  return out;
}

double bfdr_identity_residual(const MixtureModel& model, ThresholdSq c_sq) {
  const double p = model.p();
  const double alpha = bfdr_of_threshold(model, c_sq);
  const double t1 = type1_exact(c_sq);
  const double t2 = type2_exact(c_sq, u_of(model));
  return (1.0 - alpha) * (1.0 - p) * t1 + alpha * p * t2 - alpha * p;
}

double tail_ratio(double sigma, double x) {
  detail::require_positive(sigma, "sigma");
  return normal::sf(x / sigma) / normal::sf(x);
}

}  // namespace sparsemt
