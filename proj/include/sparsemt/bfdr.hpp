#pragma once

// Bayesian FDR of threshold rules under the scale mixture, its inversion,
// the Genovese-Wasserman approximation to the BH threshold, and the
// asymptotic expansions that go with them.

#include "sparsemt/model.hpp"

namespace sparsemt {

/// A BFDR/FDR level alpha in (0, 1) together with r_alpha = alpha/(1-alpha).
class BfdrLevel {
 public:
  explicit BfdrLevel(double alpha);

  double alpha() const noexcept { return alpha_; }
  double r_alpha() const noexcept { return r_alpha_; }

 private:
  double alpha_;
  double r_alpha_;
};

/// (1-p) t1 / ((1-p) t1 + p (1 - t2)). Strictly decreasing from 1-p at c^2 = 0
/// to 0 as c^2 grows.
double bfdr_of_threshold(const MixtureModel& model, ThresholdSq c_sq);

/// The unique c^2 with BFDR(c^2) = alpha. Throws LevelOutOfRange (supremum
/// 1-p) when alpha >= 1-p.
ThresholdSq bfdr_threshold(const MixtureModel& model, const BfdrLevel& level);

/// c^2 solving (1-Phi(c)) / ((1-p)(1-Phi(c)) + p(1-Phi(c/sqrt(u+1)))) = alpha.
/// Solved on its own equation; coincides with bfdr_threshold at alpha (1-p).
ThresholdSq gw_threshold(const MixtureModel& model, const BfdrLevel& level);

/// Left-hand side of the GW equation at c^2.
double gw_ratio(const MixtureModel& model, ThresholdSq c_sq);

/// 2 log(f/r) - log(2 log(f/r)) + log(2/(pi D^2)); requires f/r_alpha > e.
double bfdr_threshold_asymptotic(double f, const BfdrLevel& level,
                                 const AsymptoticConstants& consts);

/// t_{u,v,delta} = delta sqrt(u log v).
double oracle_bfdr_scale(const DerivedParams& derived);

/// BFDR of the oracle when t_{u,v,delta} diverges:
/// sqrt(2/pi) e^{-C/2} / (D t_{u,v,delta}).
double oracle_bfdr_asymptotic(const DerivedParams& derived, const AsymptoticConstants& consts);

/// Limit of the oracle BFDR when t_{u,v,delta} -> C1 in [0, inf):
/// 1 / (1 + sqrt(pi/2) e^{C/2} D C1).
double oracle_bfdr_limit(const AsymptoticConstants& consts, double C1);

struct BfdrDiagnostics {
  double s_t = 0.0;      ///< log(f delta sqrt u) / log(f / r_alpha) - 1
  double cond_w2 = 0.0;  ///< 2 s_t log(f/r_alpha) - log log(f/r_alpha)
  double t_uvd = 0.0;    ///< delta sqrt(u log v); NaN when v <= 1
};

BfdrDiagnostics bfdr_optimality_diagnostics(const DerivedParams& derived, const BfdrLevel& level);

/// (1-alpha)(1-p) t1 + alpha p t2 - alpha p at alpha = BFDR(c^2). Zero up to
/// rounding for every threshold.
double bfdr_identity_residual(const MixtureModel& model, ThresholdSq c_sq);

/// H(x) = (1 - Phi(x/sigma)) / (1 - Phi(x)); increasing on [0, inf) for sigma > 1.
double tail_ratio(double sigma, double x);

}  // namespace sparsemt
