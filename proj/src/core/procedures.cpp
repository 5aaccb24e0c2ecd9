#include "sparsemt/procedures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "sparsemt/error.hpp"
#include "sparsemt/normal.hpp"

namespace sparsemt {
namespace {

struct StepUp {
  std::size_t k = 0;          // number of qualifying order statistics
  double cutoff = 0.0;        // p_(k); meaningful only when k > 0
};

// Only p-values <= alpha can satisfy p_(i) <= i alpha / m, and their ranks
// among all m values equal their ranks among themselves, so sorting the
// candidates is enough.
StepUp step_up(std::span<const double> pvals, double alpha) {
  const std::size_t m = pvals.size();
  std::vector<double> candidates;
  for (double p : pvals) {
    if (p <= alpha) candidates.push_back(p);
  }
  std::sort(candidates.begin(), candidates.end());
  const double md = static_cast<double>(m);
  for (std::size_t i = candidates.size(); i > 0; --i) {
    if (candidates[i - 1] <= static_cast<double>(i) * alpha / md) {
      return {i, candidates[i - 1]};
    }
  }
  return {};
}

void check_level(double alpha) { detail::require_open_unit(alpha, "alpha"); }

}  // namespace

double ConfusionCounts::loss(const Losses& losses) const {
  return losses.delta0() * static_cast<double>(V) + losses.deltaA() * static_cast<double>(FN);
}

double z_squared(double x, double sigma) {
  const double z = x / sigma;
  return z * z;
}

std::vector<double> pvalues(std::span<const double> x, double sigma) {
  detail::require_positive(sigma, "sigma");
  std::vector<double> out;
  out.reserve(x.size());
  for (double xi : x) {
    detail::require_finite(xi, "statistic");
    out.push_back(normal::two_sided_tail(std::abs(xi) / sigma));
  }
  return out;
}

RejectionResult bh_reject(std::span<const double> pvals, double alpha) {
  check_level(alpha);
  if (pvals.empty()) detail::fail_argument("bh_reject needs at least one p-value");
  for (double p : pvals) {
    if (!(p >= 0.0 && p <= 1.0)) detail::fail_argument("p-values must lie in [0, 1]");
  }
  const StepUp su = step_up(pvals, alpha);
  const ThresholdSq bonferroni = bonferroni_threshold(static_cast<double>(pvals.size()), alpha);

  RejectionResult out;
  out.rejected.assign(pvals.size(), false);
  if (su.k == 0) {
    out.realized_threshold_sq = bonferroni;
    return out;
  }
  for (std::size_t i = 0; i < pvals.size(); ++i) {
    if (pvals[i] <= su.cutoff) {
      out.rejected[i] = true;
      ++out.num_rejected;
    }
  }
  double cutoff_sq = std::numeric_limits<double>::infinity();
  if (su.cutoff > 0.0) {
    const double z = normal::upper_quantile(0.5 * su.cutoff);
    cutoff_sq = z * z;
  }
  out.realized_threshold_sq = ThresholdSq(std::min(bonferroni.value(), cutoff_sq));
  return out;
}

RejectionResult bh_reject_statistics(std::span<const double> x, double sigma, double alpha) {
  check_level(alpha);
  const std::vector<double> pvals = pvalues(x, sigma);
  if (pvals.empty()) detail::fail_argument("bh_reject needs at least one statistic");
  const StepUp su = step_up(pvals, alpha);
  const ThresholdSq bonferroni = bonferroni_threshold(static_cast<double>(x.size()), alpha);

  RejectionResult out;
  out.rejected.assign(x.size(), false);
  if (su.k == 0) {
    out.realized_threshold_sq = bonferroni;
    return out;
  }
  double smallest_sq = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (pvals[i] <= su.cutoff) {
      out.rejected[i] = true;
      ++out.num_rejected;
      smallest_sq = std::min(smallest_sq, z_squared(x[i], sigma));
    }
  }
  out.realized_threshold_sq = ThresholdSq(std::min(bonferroni.value(), smallest_sq));
  return out;
}

ThresholdSq bonferroni_threshold(double m, double alpha) {
  check_level(alpha);
  if (!(m >= 1.0) || !std::isfinite(m)) detail::fail_argument("m must be >= 1");
  const double tail = alpha / (2.0 * m);
  if (tail >= 0.5) return ThresholdSq(0.0);
  const double c = normal::upper_quantile(tail);
  return ThresholdSq(c * c);
}

ThresholdSq bonferroni_threshold_asymptotic(double m, double alpha) {
  check_level(alpha);
  const double log_ratio = std::log(m / alpha);
  if (!(log_ratio > 1.0)) detail::fail_argument("asymptotic Bonferroni threshold requires m/alpha > e");
  return ThresholdSq(2.0 * log_ratio - std::log(2.0 * log_ratio) +
                     std::log(2.0 / std::numbers::pi));
}

ThresholdSq universal_threshold(double m, double d) {
  if (!(m >= 1.0)) detail::fail_argument("m must be >= 1");
  detail::require_finite(d, "d");
  return ThresholdSq(std::max(0.0, 2.0 * std::log(m) + d));
}

ThresholdSq replicate_threshold(double m, double n, double d) {
  if (!(m >= 1.0)) detail::fail_argument("m must be >= 1");
  if (!(n >= 1.0)) detail::fail_argument("n must be >= 1");
  detail::require_finite(d, "d");
  return ThresholdSq(std::max(0.0, std::log(n) + 2.0 * std::log(m) + d));
}

RejectionResult fixed_threshold_reject(std::span<const double> x, double sigma, ThresholdSq c_sq) {
  detail::require_positive(sigma, "sigma");
  RejectionResult out;
  out.rejected.assign(x.size(), false);
  out.realized_threshold_sq = c_sq;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (z_squared(x[i], sigma) >= c_sq.value()) {
      out.rejected[i] = true;
      ++out.num_rejected;
    }
  }
  return out;
}

ConfusionCounts confusion(const RejectionResult& result, const std::vector<bool>& truth) {
  if (result.rejected.size() != truth.size()) {
    detail::fail_argument("rejection mask and truth vector differ in length");
  }
  ConfusionCounts c;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i]) ++c.K;
    if (!result.rejected[i]) continue;
    if (truth[i]) {
      ++c.S;
    } else {
      ++c.V;
    }
  }
  c.FN = c.K - c.S;
  return c;
}

double bh_conditional_false_rejection_bound(double k, double alpha) {
  check_level(alpha);
  if (!(k >= 0.0)) detail::fail_argument("k must be >= 0");
  const double q = 1.0 - alpha;
  return alpha * (k / q + 1.0 / (q * q));
}

double bh_false_rejection_constant(double s, double alpha_inf) {
  if (!(alpha_inf >= 0.0 && alpha_inf < 1.0)) detail::fail_argument("alpha_inf must lie in [0, 1)");
  if (!(s > 0.0)) detail::fail_argument("s must be > 0");
  const double q = 1.0 - alpha_inf;
  const double base = (2.0 - alpha_inf) / (q * q);
  if (std::isinf(s)) return base;
  return std::exp(-s) / (s * q) + base;
}

}  // namespace sparsemt
