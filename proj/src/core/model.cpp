#include "sparsemt/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "sparsemt/error.hpp"
#include "sparsemt/normal.hpp"
#include "sparsemt/rng.hpp"

namespace sparsemt {

using detail::fail_argument;

ThresholdSq::ThresholdSq(double value) : value_(value) {
  if (std::isnan(value) || value < 0.0) fail_argument("threshold c^2 must be >= 0");
}

ThresholdSq ThresholdSq::never() {
  return ThresholdSq(std::numeric_limits<double>::infinity());
}

double ThresholdSq::z() const { return std::sqrt(value_); }

bool ThresholdSq::is_never() const noexcept { return std::isinf(value_); }

MixtureModel::MixtureModel(double p, double sigma_sq, double tau_sq)
    : p_(p), sigma_sq_(sigma_sq), tau_sq_(tau_sq) {
  detail::require_open_unit(p, "p");
  detail::require_finite(sigma_sq, "sigma_sq");
  detail::require_positive(sigma_sq, "sigma_sq");
  detail::require_finite(tau_sq, "tau_sq");
  detail::require_positive(tau_sq, "tau_sq");
}

MixtureModel MixtureModel::with_split(double p, double sigma0_sq, double sigma_eps_sq,
                                      double tau_sq) {
  detail::require_finite(sigma0_sq, "sigma0_sq");
  if (sigma0_sq < 0.0) fail_argument("sigma0_sq must be >= 0");
  detail::require_positive(sigma_eps_sq, "sigma_eps_sq");
  MixtureModel model(p, sigma0_sq + sigma_eps_sq, tau_sq);
  model.split_ = VarianceSplit{sigma0_sq, sigma_eps_sq};
  return model;
}

Losses::Losses(double delta0, double deltaA) : delta0_(delta0), deltaA_(deltaA) {
  detail::require_finite(delta0, "delta0");
  detail::require_positive(delta0, "delta0");
  detail::require_finite(deltaA, "deltaA");
  detail::require_positive(deltaA, "deltaA");
}

TestingSetting::TestingSetting(MixtureModel model, Losses losses, double m)
    : model_(std::move(model)), losses_(losses), m_(m) {
  detail::require_finite(m, "m");
  if (m < 1.0) fail_argument("m must be >= 1");
}

DerivedParams derive(const MixtureModel& model, const Losses& losses) {
  DerivedParams d;
  const double p = model.p();
  d.u = model.tau_sq() / model.sigma_sq();
  d.f = (1.0 - p) / p;
  d.delta = losses.ratio();
  d.log_f = std::log1p(-p) - std::log(p);
  d.log_v = std::log(d.u) + 2.0 * d.log_f + 2.0 * std::log(d.delta);
  d.v = std::exp(d.log_v);
  return d;
}

DerivedParams derive(const TestingSetting& setting) {
  return derive(setting.model(), setting.losses());
}

AsymptoticConstants::AsymptoticConstants(double C) : C_(C) {
  detail::require_finite(C, "C");
  if (C < 0.0) fail_argument("C must be >= 0");
  D_ = std::erfc(std::sqrt(0.5 * C));
}

namespace {

OracleThreshold oracle_from_log(double u, double log_v) {
  detail::require_positive(u, "u");
  const double inv_u = 1.0 / u;
  const double c_sq = (1.0 + inv_u) * (log_v + std::log1p(inv_u));
  if (c_sq < 0.0) return {ThresholdSq(0.0), true};
  return {ThresholdSq(c_sq), false};
}

}  // namespace

OracleThreshold oracle_threshold_sq(double u, double v) {
  detail::require_positive(v, "v");
  return oracle_from_log(u, std::log(v));
}

OracleThreshold oracle_threshold_sq(const DerivedParams& derived) {
  return oracle_from_log(derived.u, derived.log_v);
}

OracleThreshold oracle_threshold_sq_raw(const MixtureModel& model, const Losses& losses) {
  const double sigma_sq = model.sigma_sq();
  const double tau_sq = model.tau_sq();
  const double f = (1.0 - model.p()) / model.p();
  const double c_sq = ((sigma_sq + tau_sq) / tau_sq) *
                      (std::log(tau_sq / sigma_sq + 1.0) + 2.0 * std::log(f * losses.ratio()));
  if (c_sq < 0.0) return {ThresholdSq(0.0), true};
  return {ThresholdSq(c_sq), false};
}

double type1_exact(ThresholdSq c_sq) {
  if (c_sq.is_never()) return 0.0;
  return normal::two_sided_tail(c_sq.z());
}

double type2_exact(ThresholdSq c_sq, double u) {
  detail::require_positive(u, "u");
  if (c_sq.is_never()) return 1.0;
  return normal::two_sided_inner(std::sqrt(c_sq.value() / (u + 1.0)));
}

double power_exact(ThresholdSq c_sq, double u) {
  detail::require_positive(u, "u");
  if (c_sq.is_never()) return 0.0;
  return normal::two_sided_tail(std::sqrt(c_sq.value() / (u + 1.0)));
}

double type1_asymptotic(double v, const AsymptoticConstants& consts) {
  if (!(v > 1.0)) fail_argument("type1_asymptotic requires v > 1");
  const double log_v = std::log(v);
  return std::exp(-0.5 * consts.C()) * std::sqrt(2.0 / (std::numbers::pi * v * log_v));
}

double type2_asymptotic(double u, double v, const AsymptoticConstants& consts) {
  detail::require_positive(u, "u");
  if (consts.C() > 0.0) return normal::two_sided_inner(std::sqrt(consts.C()));
  if (!(v > 1.0)) fail_argument("type2_asymptotic with C = 0 requires v > 1");
  return std::sqrt(2.0 * std::log(v) / (std::numbers::pi * u));
}

namespace {

std::size_t integral_m(const TestingSetting& setting) {
  const double m = setting.m();
  if (m != std::floor(m) || m > 1e10) {
    fail_argument("sampling requires an integral m <= 1e10");
  }
  return static_cast<std::size_t>(m);
}

}  // namespace

Sample sample(const TestingSetting& setting, std::uint64_t seed) {
  const std::size_t m = integral_m(setting);
  const auto& model = setting.model();
  const double null_sd = std::sqrt(model.sigma_sq());
  const double alt_sd = std::sqrt(model.sigma_sq() + model.tau_sq());

  Engine engine(seed);
  std::bernoulli_distribution signal(model.p());
  std::normal_distribution<double> noise;

  Sample out;
  out.truth.resize(m);
  out.x.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const bool alt = signal(engine);
    out.truth[i] = alt;
    out.x[i] = (alt ? alt_sd : null_sd) * noise(engine);
  }
  return out;
}

Sample sample_with_signals(const TestingSetting& setting, std::uint64_t k, std::uint64_t seed) {
  const std::size_t m = integral_m(setting);
  if (k > m) fail_argument("number of signals k must not exceed m");
  const auto& model = setting.model();
  const double null_sd = std::sqrt(model.sigma_sq());
  const double alt_sd = std::sqrt(model.sigma_sq() + model.tau_sq());

  Engine engine(seed);
  Sample out;
  out.truth.assign(m, false);
  out.x.resize(m);

  // Selection sampling: position i is taken with probability
  // (still needed) / (still available), giving a uniform k-subset.
  std::uint64_t needed = k;
  for (std::size_t i = 0; i < m && needed > 0; ++i) {
    std::uniform_int_distribution<std::uint64_t> pick(0, m - i - 1);
    if (pick(engine) < needed) {
      out.truth[i] = true;
      --needed;
    }
  }

  std::normal_distribution<double> noise;
  for (std::size_t i = 0; i < m; ++i) {
    out.x[i] = (out.truth[i] ? alt_sd : null_sd) * noise(engine);
  }
  return out;
}

EffectSample sample_effects(const TestingSetting& setting, std::uint64_t seed) {
  const auto& model = setting.model();
  if (!model.split()) fail_argument("effect-level sampling needs a variance split");
  const std::size_t m = integral_m(setting);
  const VarianceSplit split = *model.split();
  const double null_sd = std::sqrt(split.sigma0_sq);
  const double alt_sd = std::sqrt(split.sigma0_sq + model.tau_sq());
  const double noise_sd = std::sqrt(split.sigma_eps_sq);

  Engine engine(seed);
  std::bernoulli_distribution signal(model.p());
  std::normal_distribution<double> gauss;

  EffectSample out;
  out.truth.resize(m);
  out.mu.resize(m);
  out.x.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const bool alt = signal(engine);
    out.truth[i] = alt;
    out.mu[i] = (alt ? alt_sd : null_sd) * gauss(engine);
    out.x[i] = out.mu[i] + noise_sd * gauss(engine);
  }
  return out;
}

}  // namespace sparsemt
