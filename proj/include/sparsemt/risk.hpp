#pragma once

// Bayes risk of fixed-threshold rules under additive loss, and the
// per-point quantities that characterize asymptotic optimality.

#include <cstddef>
#include <span>

#include "sparsemt/model.hpp"

namespace sparsemt {

struct RiskBreakdown {
  double r1 = 0.0;  ///< m (1-p) t1 delta0
  double r2 = 0.0;  ///< m p t2 deltaA
  double total = 0.0;
};

RiskBreakdown fixed_threshold_risk(const TestingSetting& setting, ThresholdSq c_sq);

/// Risk of the Bayes oracle (the reject-all rule when the oracle degenerates).
RiskBreakdown optimal_risk_exact(const TestingSetting& setting);

/// C = 0: m p deltaA sqrt(2 log v / (pi u)); C > 0: m p deltaA (2 Phi(sqrt C) - 1).
double optimal_risk_asymptotic(const TestingSetting& setting, const AsymptoticConstants& consts);

/// rule.total / opt.total; opt.total must be > 0.
double risk_ratio(const RiskBreakdown& rule, const RiskBreakdown& opt);

/// For a threshold written as c^2 = log v + z_t: z_t, z_t / log v and
/// z_t + 2 log log v. crit2 is -inf when log log v is undefined (v <= e).
struct OptimalityDiagnostics {
  double z_t = 0.0;
  double ratio1 = 0.0;
  double crit2 = 0.0;
};

OptimalityDiagnostics optimality_diagnostics(ThresholdSq c_sq, double v);
/// Same, from log v (usable when v overflows a double).
OptimalityDiagnostics optimality_diagnostics_log(ThresholdSq c_sq, double log_v);

/// Endpoint values and tail monotonicity of a sequence indexed along a grid.
struct TrendSummary {
  double first = 0.0;
  double last = 0.0;
  std::size_t tail_length = 0;
  bool tail_decreasing = false;  ///< strictly
  bool tail_increasing = false;  ///< strictly
};

TrendSummary summarize_trend(std::span<const double> values, std::size_t tail_length);

}  // namespace sparsemt
