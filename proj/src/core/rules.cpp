#include "sparsemt/rules.hpp"

#include <charconv>
#include <cmath>
#include <map>

#include "sparsemt/bfdr.hpp"
#include "sparsemt/error.hpp"
#include "sparsemt/procedures.hpp"

namespace sparsemt {
namespace {

using Params = std::map<std::string, double, std::less<>>;

double parse_number(std::string_view text, std::string_view key) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    detail::fail_argument("rule parameter '" + std::string(key) + "' is not a number: '" +
                          std::string(text) + "'");
  }
  return value;
}

Params parse_params(std::string_view text) {
  Params params;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const std::string_view item = text.substr(0, comma);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0) {
      detail::fail_argument("rule parameter must look like key=value: '" + std::string(item) + "'");
    }
    const std::string_view key = item.substr(0, eq);
    params[std::string(key)] = parse_number(item.substr(eq + 1), key);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return params;
}

class ParamReader {
 public:
  ParamReader(std::string_view rule, Params params) : rule_(rule), params_(std::move(params)) {}

  std::optional<double> optional(std::string_view key) {
    const auto it = params_.find(key);
    if (it == params_.end()) return std::nullopt;
    const double v = it->second;
    params_.erase(it);
    return v;
  }

  double value_or(std::string_view key, double fallback) { return optional(key).value_or(fallback); }

  void finish() const {
    if (!params_.empty()) {
      detail::fail_argument("unknown parameter '" + params_.begin()->first + "' for rule '" +
                            std::string(rule_) + "'");
    }
  }

 private:
  std::string_view rule_;
  Params params_;
};

// Shortest text that reads back to the same double.
std::string format_number(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void append_optional(std::string& out, const char* key, const std::optional<double>& v,
                     bool& first) {
  if (!v) return;
  out += first ? ':' : ',';
  out += key;
  out += '=';
  out += format_number(*v);
  first = false;
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double require_bound(const std::optional<double>& v, const char* what) {
  if (!v) detail::fail_argument(std::string("rule parameter '") + what + "' is not bound");
  return *v;
}

}  // namespace

Rule parse_rule(std::string_view text) {
  const auto colon = text.find(':');
  const std::string_view name = text.substr(0, colon);
  ParamReader params(name, colon == std::string_view::npos ? Params{}
                                                           : parse_params(text.substr(colon + 1)));
  Rule rule;
  if (name == "oracle") {
    rule = OracleRule{};
  } else if (name == "fixed") {
    const auto c = params.optional("c_sq");
    if (!c) detail::fail_argument("rule 'fixed' needs c_sq");
    ThresholdSq check(*c);
    rule = FixedRule{*c};
  } else if (name == "universal") {
    rule = UniversalRule{params.value_or("d", 0.0)};
  } else if (name == "replicate") {
    ReplicateRule r;
    r.n = params.optional("n");
    r.d = params.value_or("d", 0.0);
    rule = r;
  } else if (name == "logv") {
    LogVRule r;
    r.coef = params.value_or("coef", 0.0);
    r.offset = params.value_or("offset", 0.0);
    rule = r;
  } else if (name == "bonferroni") {
    rule = BonferroniRule{params.optional("alpha")};
  } else if (name == "bfdr") {
    rule = BfdrRule{params.optional("alpha")};
  } else if (name == "gw") {
    rule = GwRule{params.optional("alpha")};
  } else if (name == "bh") {
    rule = BhRule{params.optional("alpha")};
  } else {
    detail::fail_argument("unknown rule '" + std::string(name) + "'");
  }
  params.finish();
  if (auto level = rule_level(rule)) BfdrLevel check(*level);
  return rule;
}

std::string to_string(const Rule& rule) {
  return std::visit(
      Overloaded{
          [](const OracleRule&) { return std::string("oracle"); },
          [](const FixedRule& r) { return "fixed:c_sq=" + format_number(r.c_sq); },
          [](const UniversalRule& r) { return "universal:d=" + format_number(r.d); },
          [](const ReplicateRule& r) {
            std::string out = "replicate";
            bool first = true;
            append_optional(out, "n", r.n, first);
            append_optional(out, "d", r.d, first);
            return out;
          },
          [](const LogVRule& r) {
            return "logv:coef=" + format_number(r.coef) + ",offset=" + format_number(r.offset);
          },
          [](const BonferroniRule& r) {
            std::string out = "bonferroni";
            bool first = true;
            append_optional(out, "alpha", r.alpha, first);
            return out;
          },
          [](const BfdrRule& r) {
            std::string out = "bfdr";
            bool first = true;
            append_optional(out, "alpha", r.alpha, first);
            return out;
          },
          [](const GwRule& r) {
            std::string out = "gw";
            bool first = true;
            append_optional(out, "alpha", r.alpha, first);
            return out;
          },
          [](const BhRule& r) {
            std::string out = "bh";
            bool first = true;
            append_optional(out, "alpha", r.alpha, first);
            return out;
          },
      },
      rule);
}

Rule bind(Rule rule, std::optional<double> alpha, std::optional<double> n) {
  std::visit(Overloaded{
                 [&](ReplicateRule& r) {
                   if (!r.n) r.n = n;
                 },
                 [&](BonferroniRule& r) {
                   if (!r.alpha) r.alpha = alpha;
                 },
                 [&](BfdrRule& r) {
                   if (!r.alpha) r.alpha = alpha;
                 },
                 [&](GwRule& r) {
                   if (!r.alpha) r.alpha = alpha;
                 },
                 [&](BhRule& r) {
                   if (!r.alpha) r.alpha = alpha;
                 },
                 [](auto&) {},
             },
             rule);
  return rule;
}

bool is_fixed_threshold(const Rule& rule) { return !std::holds_alternative<BhRule>(rule); }

std::optional<double> rule_level(const Rule& rule) {
  return std::visit(Overloaded{
                        [](const BonferroniRule& r) { return r.alpha; },
                        [](const BfdrRule& r) { return r.alpha; },
                        [](const GwRule& r) { return r.alpha; },
                        [](const BhRule& r) { return r.alpha; },
                        [](const auto&) { return std::optional<double>{}; },
                    },
                    rule);
}

ThresholdSq fixed_threshold(const Rule& rule, const TestingSetting& setting) {
  return std::visit(
      Overloaded{
          [&](const OracleRule&) { return oracle_threshold_sq(derive(setting)).c_sq; },
          [&](const FixedRule& r) { return ThresholdSq(r.c_sq); },
          [&](const UniversalRule& r) { return universal_threshold(setting.m(), r.d); },
          [&](const ReplicateRule& r) {
            return replicate_threshold(setting.m(), require_bound(r.n, "n"), r.d);
          },
          [&](const LogVRule& r) {
            const double log_v = derive(setting).log_v;
            if (!(log_v > 1.0)) detail::fail_argument("rule 'logv' requires v > e");
            return ThresholdSq(std::max(0.0, log_v + r.coef * std::log(log_v) + r.offset));
          },
          [&](const BonferroniRule& r) {
            return bonferroni_threshold(setting.m(), require_bound(r.alpha, "alpha"));
          },
          [&](const BfdrRule& r) {
            return bfdr_threshold(setting.model(), BfdrLevel(require_bound(r.alpha, "alpha")));
          },
          [&](const GwRule& r) {
            return gw_threshold(setting.model(), BfdrLevel(require_bound(r.alpha, "alpha")));
          },
          [](const BhRule&) -> ThresholdSq {
            detail::fail_argument("BH has a random threshold; use a Monte Carlo study");
          },
      },
      rule);
}

}  // namespace sparsemt
