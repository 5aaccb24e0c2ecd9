#pragma once

// Replicated simulation of threshold and step-up rules: realized risk,
// FDR, FWER, E(V), power, and the BH versus GW threshold gap.
//
// Replicate r draws its data from an engine seeded with
// stream_seed(seed, r), and statistics are reduced in replicate order, so a
// report depends only on (setting, rule, reps, seed), never on the worker
// count.

#include <cstddef>
#include <cstdint>
#include <optional>

#include "sparsemt/model.hpp"
#include "sparsemt/rules.hpp"

namespace sparsemt {

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;  ///< sample standard deviation / sqrt(reps)
  std::size_t reps = 0;    ///< replicates that contributed a value
};

struct McReport {
  McEstimate risk;        ///< delta0 V + deltaA FN
  McEstimate fdr;         ///< V / R, 0 when R = 0
  McEstimate fwer;        ///< 1{V > 0}
  McEstimate ev;          ///< V
  McEstimate power;       ///< S / K, 0 when K = 0
  McEstimate type1;       ///< V / (m - K); replicates without nulls skipped
  McEstimate type2;       ///< FN / K; replicates without signals skipped
  McEstimate rejections;  ///< R
  McEstimate threshold;   ///< realized threshold on the |Z| scale
  /// |c_BH - c_GW| on the |Z| scale, for BH rules.
  std::optional<McEstimate> threshold_gap;
};

struct McOptions {
  std::size_t reps = 1000;
  std::uint64_t seed = 0;
  /// 0 picks std::thread::hardware_concurrency().
  unsigned workers = 0;
};

McEstimate estimate(const double* values, std::size_t n);

/// Rules with unbound parameters are rejected; bind() them first.
McReport mc_run(const TestingSetting& setting, const Rule& rule, const McOptions& opts);

/// Every replicate carries exactly k signals at uniformly drawn positions.
McReport mc_conditional_k(const TestingSetting& setting, const Rule& rule, std::uint64_t k,
                          const McOptions& opts);

struct GapStudy {
  McEstimate gap;            ///< |c_BH - c_GW|
  double median_gap = 0.0;
  double exceed_frac = 0.0;  ///< fraction of replicates with gap > epsilon
  double c_gw = 0.0;         ///< |Z| scale
  double c_bon = 0.0;        ///< |Z| scale
};

/// epsilon may be +inf, in which case exceed_frac is 0. With `k` set, each
/// replicate carries exactly k signals.
GapStudy threshold_gap_study(const TestingSetting& setting, double alpha, double epsilon,
                             const McOptions& opts, std::optional<std::uint64_t> k = {});

}  // namespace sparsemt
