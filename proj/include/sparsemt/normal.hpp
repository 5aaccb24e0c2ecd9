#pragma once

// Standard normal primitives with tail-accurate evaluation.
//
// Upper tails are computed from erfc directly, never as 1 - cdf, so
// probabilities down to the 1e-300 range keep full relative precision.

namespace sparsemt::normal {

/// Density exp(-x^2/2)/sqrt(2 pi).
double pdf(double x);

/// Lower CDF Phi(x).
double cdf(double x);

/// Upper tail 1 - Phi(x), evaluated without cancellation.
double sf(double x);

/// P(|Z| > c) = 2 (1 - Phi(c)) for c >= 0.
double two_sided_tail(double c);

/// P(|Z| < c) = 2 Phi(c) - 1 for c >= 0.
double two_sided_inner(double c);

/// Inverse of cdf on (0, 1).
double quantile(double q);

/// x with sf(x) = tail, for tail in (0, 1). Keeps relative precision
/// for tiny tails where 1 - tail would round to 1.
double upper_quantile(double tail);

/// Mills-ratio approximation P(|Z| > c) ~ 2 phi(c) / c.
struct TailApprox {
  double approx = 0.0;
  /// Bound on z1(c) c^2 where P(|Z|>c) = approx (1 - z1(c)).
  double correction_bound = 0.0;
};

TailApprox tail_approx(double c);

}  // namespace sparsemt::normal
