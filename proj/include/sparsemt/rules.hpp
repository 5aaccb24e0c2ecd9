#pragma once

// Procedure descriptors shared by the Monte Carlo runner and the
// convergence studies.
//
// Text form: `name[:key=value[,key=value...]]`, for example
//   oracle | fixed:c_sq=4 | universal:d=0 | replicate:n=100,d=0
//   logv:coef=-3,offset=0 | bonferroni:alpha=0.05 | bfdr:alpha=0.1
//   gw:alpha=0.1 | bh:alpha=0.1
// Level and replicate parameters may be left unset; a regime fills them in
// per grid point through bind().

#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "sparsemt/model.hpp"

namespace sparsemt {

struct OracleRule {};
struct FixedRule {
  double c_sq = 0.0;
};
/// 2 log m + d.
struct UniversalRule {
  double d = 0.0;
};
/// log n + 2 log m + d.
struct ReplicateRule {
  std::optional<double> n;
  double d = 0.0;
};
/// log v + coef * log log v + offset.
struct LogVRule {
  double coef = 0.0;
  double offset = 0.0;
};
struct BonferroniRule {
  std::optional<double> alpha;
};
struct BfdrRule {
  std::optional<double> alpha;
};
struct GwRule {
  std::optional<double> alpha;
};
struct BhRule {
  std::optional<double> alpha;
};

using Rule = std::variant<OracleRule, FixedRule, UniversalRule, ReplicateRule, LogVRule,
                          BonferroniRule, BfdrRule, GwRule, BhRule>;

/// Throws std::invalid_argument on unknown names or malformed parameters.
Rule parse_rule(std::string_view text);
std::string to_string(const Rule& rule);

/// Fills unset level / replicate parameters.
Rule bind(Rule rule, std::optional<double> alpha, std::optional<double> n);

bool is_fixed_threshold(const Rule& rule);

/// Level of a level-based rule, if it has one.
std::optional<double> rule_level(const Rule& rule);

/// Threshold of a fixed-threshold rule in this setting. Throws for BH and
/// for rules whose parameters are still unbound.
ThresholdSq fixed_threshold(const Rule& rule, const TestingSetting& setting);

}  // namespace sparsemt
