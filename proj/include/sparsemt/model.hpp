#pragma once

// Two-group normal scale mixture, its (u, v) reparametrization, the Bayes
// oracle threshold and the exact/asymptotic error probabilities of
// threshold rules.
//
// Every threshold is carried on the chi-square(1) scale as c^2, i.e. the
// rule rejects H0i when X_i^2 / sigma^2 >= c^2.

#include <cstdint>
#include <optional>
#include <vector>

namespace sparsemt {

/// Squared threshold c^2 in units of X^2/sigma^2. +inf means "never reject".
class ThresholdSq {
 public:
  constexpr ThresholdSq() = default;
  explicit ThresholdSq(double value);

  static ThresholdSq never();

  double value() const noexcept { return value_; }
  /// Threshold on the |Z| scale.
  double z() const;
  bool is_never() const noexcept;

  friend bool operator==(const ThresholdSq&, const ThresholdSq&) = default;

 private:
  double value_ = 0.0;
};

/// Optional split of the null variance into effect and noise parts.
struct VarianceSplit {
  double sigma0_sq = 0.0;     ///< spread of null effects
  double sigma_eps_sq = 0.0;  ///< measurement noise
};

/// X_i ~ (1-p) N(0, sigma^2) + p N(0, sigma^2 + tau^2).
class MixtureModel {
 public:
  MixtureModel(double p, double sigma_sq, double tau_sq);
  /// sigma^2 = sigma0^2 + sigma_eps^2, with the split retained for
  /// effect-level sampling.
  static MixtureModel with_split(double p, double sigma0_sq, double sigma_eps_sq,
                                 double tau_sq);

  double p() const noexcept { return p_; }
  double sigma_sq() const noexcept { return sigma_sq_; }
  double tau_sq() const noexcept { return tau_sq_; }
  const std::optional<VarianceSplit>& split() const noexcept { return split_; }

 private:
  double p_;
  double sigma_sq_;
  double tau_sq_;
  std::optional<VarianceSplit> split_;
};

/// Per-test losses: delta0 for a false rejection, deltaA for a missed signal.
class Losses {
 public:
  Losses() : Losses(1.0, 1.0) {}
  Losses(double delta0, double deltaA);

  double delta0() const noexcept { return delta0_; }
  double deltaA() const noexcept { return deltaA_; }
  double ratio() const noexcept { return delta0_ / deltaA_; }

 private:
  double delta0_;
  double deltaA_;
};

/// Model, losses and number of tests. `m` is a real >= 1 so closed-form
/// studies can use non-integer grids; sampling requires an integral m.
class TestingSetting {
 public:
  TestingSetting(MixtureModel model, Losses losses, double m);

  const MixtureModel& model() const noexcept { return model_; }
  const Losses& losses() const noexcept { return losses_; }
  double m() const noexcept { return m_; }

 private:
  MixtureModel model_;
  Losses losses_;
  double m_;
};

/// u = tau^2/sigma^2, f = (1-p)/p, delta = delta0/deltaA, v = u f^2 delta^2.
/// log_v and log_f are computed directly so extreme sparsity never overflows;
/// v itself may be +inf in that case.
struct DerivedParams {
  double u = 0.0;
  double f = 0.0;
  double delta = 0.0;
  double v = 0.0;
  double log_v = 0.0;
  double log_f = 0.0;
};

DerivedParams derive(const TestingSetting& setting);
DerivedParams derive(const MixtureModel& model, const Losses& losses);

/// Limit C of log v / u, and the asymptotic power D = 2(1 - Phi(sqrt C)).
class AsymptoticConstants {
 public:
  explicit AsymptoticConstants(double C);

  double C() const noexcept { return C_; }
  double D() const noexcept { return D_; }

 private:
  double C_;
  double D_;
};

struct OracleThreshold {
  ThresholdSq c_sq;
  /// The likelihood-ratio cutoff lies below every attainable ratio; the
  /// Bayes rule rejects everything and c_sq is 0.
  bool reject_all = false;
};

/// c^2 = (1 + 1/u)(log v + log(1 + 1/u)).
OracleThreshold oracle_threshold_sq(double u, double v);
OracleThreshold oracle_threshold_sq(const DerivedParams& derived);

/// c^2 = ((sigma^2+tau^2)/tau^2)(log(tau^2/sigma^2 + 1) + 2 log(f delta)).
OracleThreshold oracle_threshold_sq_raw(const MixtureModel& model, const Losses& losses);

/// P(|Z| > c): the type I error of the threshold rule.
double type1_exact(ThresholdSq c_sq);
/// P(Z^2 < c^2/(u+1)): the type II error under the alternative.
double type2_exact(ThresholdSq c_sq, double u);
/// 1 - type2_exact, evaluated in the tail directly.
double power_exact(ThresholdSq c_sq, double u);

/// Leading term e^{-C/2} sqrt(2 / (pi v log v)); requires v > 1.
double type1_asymptotic(double v, const AsymptoticConstants& consts);
/// C > 0: 2 Phi(sqrt C) - 1.  C = 0: sqrt(2 log v / (pi u)).
double type2_asymptotic(double u, double v, const AsymptoticConstants& consts);

struct Sample {
  std::vector<bool> truth;
  std::vector<double> x;
};

struct EffectSample {
  std::vector<bool> truth;
  std::vector<double> mu;
  std::vector<double> x;
};

/// Draws (truth, X) from the X-marginal. Deterministic in `seed`.
/// Requires an integral m.
Sample sample(const TestingSetting& setting, std::uint64_t seed);

/// Same as `sample` but with exactly k signals at uniformly chosen positions.
Sample sample_with_signals(const TestingSetting& setting, std::uint64_t k, std::uint64_t seed);

/// Draws the effects mu_i first, then X_i = mu_i + noise. Requires a model
/// built with a variance split.
EffectSample sample_effects(const TestingSetting& setting, std::uint64_t seed);

}  // namespace sparsemt
