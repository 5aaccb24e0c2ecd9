#include "sparsemt/risk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "sparsemt/error.hpp"
#include "sparsemt/normal.hpp"

namespace sparsemt {

RiskBreakdown fixed_threshold_risk(const TestingSetting& setting, ThresholdSq c_sq) {
  const auto& model = setting.model();
  const auto& losses = setting.losses();
  const double u = model.tau_sq() / model.sigma_sq();
  const double m = setting.m();
  const double p = model.p();

  RiskBreakdown r;
  r.r1 = m * (1.0 - p) * type1_exact(c_sq) * losses.delta0();
  r.r2 = m * p * type2_exact(c_sq, u) * losses.deltaA();
  r.total = r.r1 + r.r2;
  return r;
}

RiskBreakdown optimal_risk_exact(const TestingSetting& setting) {
  return fixed_threshold_risk(setting, oracle_threshold_sq(derive(setting)).c_sq);
}

double optimal_risk_asymptotic(const TestingSetting& setting, const AsymptoticConstants& consts) {
  const DerivedParams d = derive(setting);
  if (!(d.log_v > 0.0)) detail::fail_argument("asymptotic risk requires v > 1");
  const double scale = setting.m() * setting.model().p() * setting.losses().deltaA();
  if (consts.C() > 0.0) return scale * normal::two_sided_inner(std::sqrt(consts.C()));
  return scale * std::sqrt(2.0 * d.log_v / (std::numbers::pi * d.u));
}

double risk_ratio(const RiskBreakdown& rule, const RiskBreakdown& opt) {
  if (!(opt.total > 0.0)) detail::fail_argument("optimal risk must be > 0 to form a ratio");
  return rule.total / opt.total;
}

OptimalityDiagnostics optimality_diagnostics_log(ThresholdSq c_sq, double log_v) {
  if (!(log_v > 0.0)) detail::fail_argument("optimality diagnostics require v > 1");
  OptimalityDiagnostics out;
  out.z_t = c_sq.value() - log_v;
  out.ratio1 = out.z_t / log_v;
  out.crit2 = log_v > 1.0 ? out.z_t + 2.0 * std::log(log_v)
                          : -std::numeric_limits<double>::infinity();
  return out;
}

OptimalityDiagnostics optimality_diagnostics(ThresholdSq c_sq, double v) {
  if (!(v > 1.0)) detail::fail_argument("optimality diagnostics require v > 1");
  return optimality_diagnostics_log(c_sq, std::log(v));
}

TrendSummary summarize_trend(std::span<const double> values, std::size_t tail_length) {
  TrendSummary t;
  if (values.empty()) return t;
  t.first = values.front();
  t.last = values.back();
  t.tail_length = std::min(tail_length, values.size());
  const auto tail = values.last(t.tail_length);
  t.tail_decreasing = t.tail_length >= 2;
  t.tail_increasing = t.tail_length >= 2;
  for (std::size_t i = 1; i < tail.size(); ++i) {
    if (!(tail[i] < tail[i - 1])) t.tail_decreasing = false;
    if (!(tail[i] > tail[i - 1])) t.tail_increasing = false;
  }
  return t;
}

}  // namespace sparsemt
