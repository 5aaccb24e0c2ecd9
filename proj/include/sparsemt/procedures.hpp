#pragma once

// Data-level multiple testing rules: p-values, fixed thresholds,
// Bonferroni, universal thresholds and the Benjamini-Hochberg step-up.

#include <cstddef>
#include <span>
#include <vector>

#include "sparsemt/model.hpp"

namespace sparsemt {

struct RejectionResult {
  std::vector<bool> rejected;
  std::size_t num_rejected = 0;
  /// Threshold on the X^2/sigma^2 scale that reproduces the mask (up to
  /// exact boundary ties). never() when nothing can be rejected.
  ThresholdSq realized_threshold_sq;
};

struct ConfusionCounts {
  std::size_t V = 0;   ///< false rejections
  std::size_t S = 0;   ///< true rejections
  std::size_t K = 0;   ///< true signals
  std::size_t FN = 0;  ///< missed signals, K - S

  /// Additive loss delta0 V + deltaA FN.
  double loss(const Losses& losses) const;
};

/// (x / sigma)^2, the statistic every threshold rule compares against c^2.
double z_squared(double x, double sigma);

/// p_i = 2 (1 - Phi(|x_i| / sigma)).
std::vector<double> pvalues(std::span<const double> x, double sigma);

/// Step-up at level alpha: k = max{i : p_(i) <= i alpha / m}, reject every
/// p <= p_(k). The realized threshold is min(c_Bon, c_(k))^2 with c_(k) the
/// |Z| value of p_(k), or c_Bon^2 when nothing qualifies.
RejectionResult bh_reject(std::span<const double> pvals, double alpha);

/// BH on raw statistics; same mask as bh_reject(pvalues(x, sigma), alpha),
/// but the realized threshold is taken from the observed statistics so it
/// reproduces the mask without a quantile round trip.
RejectionResult bh_reject_statistics(std::span<const double> x, double sigma, double alpha);

/// c_Bon^2 with 1 - Phi(c_Bon) = alpha / (2m); 0 if alpha/(2m) >= 1/2.
ThresholdSq bonferroni_threshold(double m, double alpha);

/// 2 log(m/alpha) - log(2 log(m/alpha)) + log(2/pi); requires m/alpha > e.
ThresholdSq bonferroni_threshold_asymptotic(double m, double alpha);

/// 2 log m + d, floored at 0.
ThresholdSq universal_threshold(double m, double d);

/// log n + 2 log m + d, floored at 0.
ThresholdSq replicate_threshold(double m, double n, double d);

RejectionResult fixed_threshold_reject(std::span<const double> x, double sigma, ThresholdSq c_sq);

ConfusionCounts confusion(const RejectionResult& result, const std::vector<bool>& truth);

/// alpha (k/(1-alpha) + 1/(1-alpha)^2): bound on E(V | K = k) for BH.
double bh_conditional_false_rejection_bound(double k, double alpha);

/// Infimum of the admissible constants C1 in E(V) < C1 alpha m p for BH
/// when m p -> s (s = +inf allowed) and alpha -> alpha_inf.
double bh_false_rejection_constant(double s, double alpha_inf);

}  // namespace sparsemt
