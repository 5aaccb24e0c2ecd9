#include "sparsemt/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <thread>
#include <vector>

#include "sparsemt/bfdr.hpp"
#include "sparsemt/error.hpp"
#include "sparsemt/procedures.hpp"
#include "sparsemt/rng.hpp"

namespace sparsemt {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct ReplicateStats {
  double loss = 0.0;
  double fdp = 0.0;
  double any_false = 0.0;
  double v = 0.0;
  double power = 0.0;
  double type1 = kNaN;
  double type2 = kNaN;
  double r = 0.0;
  double threshold = kNaN;
  double gap = kNaN;
};

unsigned resolve_workers(unsigned requested, std::size_t reps) {
  unsigned w = requested != 0 ? requested : std::thread::hardware_concurrency();
  if (w == 0) w = 1;
  return static_cast<unsigned>(std::min<std::size_t>(w, reps));
}

// Runs body(r) for r in [0, reps) on a pool of workers. Each index is
// claimed exactly once; the first exception is rethrown after the join.
void parallel_for(std::size_t reps, unsigned workers, const std::function<void(std::size_t)>& body) {
  workers = resolve_workers(workers, reps);
  if (workers <= 1) {
    for (std::size_t r = 0; r < reps; ++r) body(r);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        while (!stop.load(std::memory_order_relaxed)) {
          const std::size_t r = next.fetch_add(1, std::memory_order_relaxed);
          if (r >= reps) return;
          try {
            body(r);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            stop = true;
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

void check_options(const McOptions& opts) {
  if (opts.reps < 2) detail::fail_argument("reps must be >= 2");
}

struct Plan {
  bool bh = false;
  double alpha = 0.0;
  ThresholdSq fixed;
  std::optional<double> c_gw;
};

Plan make_plan(const TestingSetting& setting, const Rule& rule) {
  Plan plan;
  if (const auto* bh = std::get_if<BhRule>(&rule)) {
    if (!bh->alpha) detail::fail_argument("rule parameter 'alpha' is not bound");
    plan.bh = true;
    plan.alpha = *bh->alpha;
    plan.c_gw = gw_threshold(setting.model(), BfdrLevel(plan.alpha)).z();
  } else {
    plan.fixed = fixed_threshold(rule, setting);
  }
  return plan;
}

ReplicateStats evaluate(const TestingSetting& setting, const Plan& plan, const Sample& s) {
  const double sigma = std::sqrt(setting.model().sigma_sq());
  const RejectionResult res = plan.bh ? bh_reject_statistics(s.x, sigma, plan.alpha)
                                      : fixed_threshold_reject(s.x, sigma, plan.fixed);
  const ConfusionCounts c = confusion(res, s.truth);
  const auto m = static_cast<double>(s.x.size());
  const auto V = static_cast<double>(c.V);
  const auto K = static_cast<double>(c.K);
  const auto R = static_cast<double>(res.num_rejected);

  ReplicateStats st;
  st.loss = c.loss(setting.losses());
  st.fdp = R > 0.0 ? V / R : 0.0;
  st.any_false = c.V > 0 ? 1.0 : 0.0;
  st.v = V;
  st.power = c.K > 0 ? static_cast<double>(c.S) / K : 0.0;
  if (K < m) st.type1 = V / (m - K);
  if (c.K > 0) st.type2 = static_cast<double>(c.FN) / K;
  st.r = R;
  if (!res.realized_threshold_sq.is_never()) st.threshold = res.realized_threshold_sq.z();
  if (plan.c_gw && std::isfinite(st.threshold)) st.gap = std::abs(st.threshold - *plan.c_gw);
  return st;
}

using Sampler = std::function<Sample(std::uint64_t seed)>;

std::vector<ReplicateStats> run_replicates(const TestingSetting& setting, const Plan& plan,
                                           const Sampler& draw, const McOptions& opts) {
  std::vector<ReplicateStats> stats(opts.reps);
  parallel_for(opts.reps, opts.workers, [&](std::size_t r) {
    stats[r] = evaluate(setting, plan, draw(stream_seed(opts.seed, r)));
  });
  return stats;
}

McEstimate collect(const std::vector<ReplicateStats>& stats, double ReplicateStats::*field) {
  std::vector<double> values;
  values.reserve(stats.size());
  for (const auto& s : stats) values.push_back(s.*field);
  return estimate(values.data(), values.size());
}

McReport summarize(const std::vector<ReplicateStats>& stats, bool with_gap) {
  McReport rep;
  rep.risk = collect(stats, &ReplicateStats::loss);
  rep.fdr = collect(stats, &ReplicateStats::fdp);
  rep.fwer = collect(stats, &ReplicateStats::any_false);
  rep.ev = collect(stats, &ReplicateStats::v);
  rep.power = collect(stats, &ReplicateStats::power);
  rep.type1 = collect(stats, &ReplicateStats::type1);
  rep.type2 = collect(stats, &ReplicateStats::type2);
  rep.rejections = collect(stats, &ReplicateStats::r);
  rep.threshold = collect(stats, &ReplicateStats::threshold);
  if (with_gap) rep.threshold_gap = collect(stats, &ReplicateStats::gap);
  return rep;
}

}  // namespace

McEstimate estimate(const double* values, std::size_t n) {
  McEstimate est;
  // Sums are taken relative to the first value so constant columns come out
  // with an exact mean and a zero standard error.
  double shift = kNaN;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::isnan(values[i])) continue;
    if (std::isnan(shift)) shift = values[i];
    sum += values[i] - shift;
    ++est.reps;
  }
  if (est.reps == 0) {
    est.mean = kNaN;
    return est;
  }
  const double offset = sum / static_cast<double>(est.reps);
  est.mean = shift + offset;
  if (est.reps < 2) return est;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::isnan(values[i])) continue;
    const double d = (values[i] - shift) - offset;
    ss += d * d;
  }
  const double var = ss / static_cast<double>(est.reps - 1);
  est.std_error = std::sqrt(var / static_cast<double>(est.reps));
  return est;
}

McReport mc_run(const TestingSetting& setting, const Rule& rule, const McOptions& opts) {
  check_options(opts);
  const Plan plan = make_plan(setting, rule);
  const auto stats = run_replicates(
      setting, plan, [&](std::uint64_t seed) { return sample(setting, seed); }, opts);
  return summarize(stats, plan.bh);
}

McReport mc_conditional_k(const TestingSetting& setting, const Rule& rule, std::uint64_t k,
                          const McOptions& opts) {
  check_options(opts);
  if (static_cast<double>(k) > setting.m()) detail::fail_argument("k must not exceed m");
  const Plan plan = make_plan(setting, rule);
  const auto stats = run_replicates(
      setting, plan, [&](std::uint64_t seed) { return sample_with_signals(setting, k, seed); },
      opts);
  return summarize(stats, plan.bh);
}

GapStudy threshold_gap_study(const TestingSetting& setting, double alpha, double epsilon,
                             const McOptions& opts, std::optional<std::uint64_t> k) {
  check_options(opts);
  if (!(epsilon > 0.0)) detail::fail_argument("epsilon must be > 0");
  if (k && static_cast<double>(*k) > setting.m()) detail::fail_argument("k must not exceed m");
  const Plan plan = make_plan(setting, BhRule{alpha});
  const Sampler draw = [&](std::uint64_t seed) {
    return k ? sample_with_signals(setting, *k, seed) : sample(setting, seed);
  };
  const auto stats = run_replicates(setting, plan, draw, opts);

  GapStudy out;
  out.gap = collect(stats, &ReplicateStats::gap);
  out.c_gw = *plan.c_gw;
  out.c_bon = bonferroni_threshold(setting.m(), alpha).z();

  std::vector<double> gaps;
  gaps.reserve(stats.size());
  for (const auto& s : stats) {
    if (!std::isnan(s.gap)) gaps.push_back(s.gap);
  }
  if (gaps.empty()) {
    out.median_gap = kNaN;
    out.exceed_frac = kNaN;
    return out;
  }
  std::sort(gaps.begin(), gaps.end());
  const std::size_t n = gaps.size();
  out.median_gap = n % 2 == 1 ? gaps[n / 2] : 0.5 * (gaps[n / 2 - 1] + gaps[n / 2]);
  const auto exceed = std::count_if(gaps.begin(), gaps.end(), [&](double g) { return g > epsilon; });
  out.exceed_frac = static_cast<double>(exceed) / static_cast<double>(n);
  return out;
}

}  // namespace sparsemt
