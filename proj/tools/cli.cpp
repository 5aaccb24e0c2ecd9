#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sparsemt/sparsemt.h"

namespace sparsemt::cli {
namespace {

using json = nlohmann::ordered_json;

constexpr double kInf = std::numeric_limits<double>::infinity();

// Exit 2: the invocation itself is malformed.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Exit 1: well-formed request the library or file system refused.
struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void check(smt_status status) {
  if (status != SMT_OK) throw Failure(smt_last_error());
}

struct SettingDeleter {
  void operator()(smt_setting* s) const { smt_setting_destroy(s); }
};
struct RuleDeleter {
  void operator()(smt_rule* r) const { smt_rule_destroy(r); }
};
struct StudyDeleter {
  void operator()(smt_study* s) const { smt_study_destroy(s); }
};
struct TableDeleter {
  void operator()(smt_table* t) const { smt_table_destroy(t); }
};
using Setting = std::unique_ptr<smt_setting, SettingDeleter>;
using Rule = std::unique_ptr<smt_rule, RuleDeleter>;
using Study = std::unique_ptr<smt_study, StudyDeleter>;
using Table = std::unique_ptr<smt_table, TableDeleter>;

// Shortest text that reads back to the same double.
std::string num(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string opt_num(const std::optional<double>& x) { return x ? num(*x) : std::string(); }

// Everything a run needs, whether it came from flags or a config document.
struct Config {
  std::optional<double> p, u, sigma_sq, delta, m;
  std::optional<std::string> preset, rule, mode, out;
  std::optional<double> c_sq, alpha, n, d, epsilon;
  std::vector<std::string> thresholds;
  std::optional<std::vector<double>> grid;
  std::optional<std::uint64_t> reps, seed, k;
};

template <class T>
void take(std::optional<T>& into, const std::optional<T>& from) {
  if (from) into = from;
}

Config merge(Config base, const Config& flags) {
  take(base.p, flags.p);
  take(base.u, flags.u);
  take(base.sigma_sq, flags.sigma_sq);
  take(base.delta, flags.delta);
  take(base.m, flags.m);
  take(base.preset, flags.preset);
  take(base.rule, flags.rule);
  take(base.mode, flags.mode);
  take(base.out, flags.out);
  take(base.c_sq, flags.c_sq);
  take(base.alpha, flags.alpha);
  take(base.n, flags.n);
  take(base.d, flags.d);
  take(base.epsilon, flags.epsilon);
  take(base.grid, flags.grid);
  take(base.reps, flags.reps);
  take(base.seed, flags.seed);
  take(base.k, flags.k);
  if (!flags.thresholds.empty()) base.thresholds = flags.thresholds;
  return base;
}

// --- config documents -------------------------------------------------------

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  throw UsageError("config " + (path.empty() ? std::string("/") : path) + ": " + what);
}

double read_number(const json& j, const std::string& path) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return kInf;
  }
  schema_error(path, "expected a number");
}

std::uint64_t read_count(const json& j, const std::string& path) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_float()) {
    const double x = j.get<double>();
    if (x >= 0.0 && x <= 9007199254740992.0 && x == std::floor(x)) {
      return static_cast<std::uint64_t>(x);
    }
  }
  schema_error(path, "expected a nonnegative integer");
}

std::string read_string(const json& j, const std::string& path) {
  if (!j.is_string()) schema_error(path, "expected a string");
  return j.get<std::string>();
}

std::vector<double> decade_grid(double lo, double hi, double per_decade) {
  if (!(per_decade >= 1.0) || per_decade != std::floor(per_decade) || !(hi >= lo) ||
      !std::isfinite(lo) || !std::isfinite(hi)) {
    throw UsageError("grid range needs lo <= hi and an integral per_decade >= 1");
  }
  std::vector<double> out;
  const auto steps = std::llround((hi - lo) * per_decade);
  for (long long i = 0; i <= steps; ++i) {
    out.push_back(std::pow(10.0, lo + static_cast<double>(i) / per_decade));
  }
  return out;
}

std::vector<double> read_grid(const json& j, const std::string& path) {
  if (j.is_array()) {
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(read_number(j[i], path + "/" + std::to_string(i)));
    if (out.empty()) schema_error(path, "grid must not be empty");
    return out;
  }
  if (j.is_object()) {
    std::optional<double> lo, hi;
    double per_decade = 1.0;
    for (const auto& [key, value] : j.items()) {
      const std::string sub = path + "/" + key;
      if (key == "lo") lo = read_number(value, sub);
      else if (key == "hi") hi = read_number(value, sub);
      else if (key == "per_decade") per_decade = read_number(value, sub);
      else schema_error(sub, "unknown field");
    }
    if (!lo) schema_error(path + "/lo", "missing");
    if (!hi) schema_error(path + "/hi", "missing");
    try {
      return decade_grid(*lo, *hi, per_decade);
    } catch (const UsageError& e) {
      schema_error(path, e.what());
    }
  }
  schema_error(path, "expected an array of m values or {lo, hi, per_decade}");
}

void read_setting(const json& j, Config& cfg) {
  if (!j.is_object()) schema_error("/setting", "expected an object");
  for (const auto& [key, value] : j.items()) {
    const std::string path = "/setting/" + key;
    if (key == "p") cfg.p = read_number(value, path);
    else if (key == "u") cfg.u = read_number(value, path);
    else if (key == "sigma_sq") cfg.sigma_sq = read_number(value, path);
    else if (key == "delta") cfg.delta = read_number(value, path);
    else if (key == "m") cfg.m = read_number(value, path);
    else schema_error(path, "unknown field");
  }
}

void read_mc(const json& j, Config& cfg) {
  if (!j.is_object()) schema_error("/mc", "expected an object");
  for (const auto& [key, value] : j.items()) {
    const std::string path = "/mc/" + key;
    if (key == "reps") cfg.reps = read_count(value, path);
    else if (key == "seed") cfg.seed = read_count(value, path);
    else schema_error(path, "unknown field");
  }
}

Config read_config_object(const json& j, const std::string& command) {
  if (!j.is_object()) schema_error("", "expected an object");
  Config cfg;
  for (const auto& [key, value] : j.items()) {
    const std::string path = "/" + key;
    if (key == "command") {
      if (read_string(value, path) != command) {
        schema_error(path, "document is for '" + value.get<std::string>() + "', not '" + command + "'");
      }
    } else if (key == "setting") {
      read_setting(value, cfg);
    } else if (key == "mc") {
      read_mc(value, cfg);
    } else if (key == "preset") {
      cfg.preset = read_string(value, path);
    } else if (key == "rule") {
      cfg.rule = read_string(value, path);
    } else if (key == "mode") {
      cfg.mode = read_string(value, path);
      if (*cfg.mode != "exact" && *cfg.mode != "mc") schema_error(path, "expected \"exact\" or \"mc\"");
    } else if (key == "out") {
      cfg.out = read_string(value, path);
    } else if (key == "c_sq") {
      cfg.c_sq = read_number(value, path);
    } else if (key == "alpha") {
      cfg.alpha = read_number(value, path);
    } else if (key == "n") {
      cfg.n = read_number(value, path);
    } else if (key == "d") {
      cfg.d = read_number(value, path);
    } else if (key == "epsilon") {
      cfg.epsilon = read_number(value, path);
    } else if (key == "k") {
      cfg.k = read_count(value, path);
    } else if (key == "grid") {
      cfg.grid = read_grid(value, path);
    } else if (key == "thresholds") {
      if (!value.is_array()) schema_error(path, "expected an array of names");
      for (std::size_t i = 0; i < value.size(); ++i) {
        cfg.thresholds.push_back(read_string(value[i], path + "/" + std::to_string(i)));
      }
    } else {
      schema_error(path, "unknown field");
    }
  }
  return cfg;
}

// Accepts a plain config document or a sidecar written by an earlier run.
Config load_config(const std::string& file, const std::string& command) {
  std::ifstream in(file);
  if (!in) throw UsageError("cannot read config file '" + file + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError("config " + file + ": " + e.what());
  }
  if (doc.is_object() && doc.contains("config")) {
    for (const auto& [key, value] : doc.items()) {
      if (key == "command") {
        if (read_string(value, "/command") != command) {
          schema_error("/command", "document is for '" + value.get<std::string>() + "', not '" +
                                       command + "'");
        }
      } else if (key != "config" && key != "version" && key != "seed") {
        schema_error("/" + key, "unknown field");
      }
    }
    return read_config_object(doc["config"], command);
  }
  return read_config_object(doc, command);
}

json number_json(double x) {
  if (std::isinf(x)) return x > 0 ? json("inf") : json("-inf");
  return json(x);
}

json config_json(const Config& cfg) {
  json j = json::object();
  json setting = json::object();
  if (cfg.p) setting["p"] = *cfg.p;
  if (cfg.u) setting["u"] = *cfg.u;
  if (cfg.sigma_sq) setting["sigma_sq"] = *cfg.sigma_sq;
  if (cfg.delta) setting["delta"] = *cfg.delta;
  if (cfg.m) setting["m"] = *cfg.m;
  if (!setting.empty()) j["setting"] = setting;
  if (cfg.preset) j["preset"] = *cfg.preset;
  if (cfg.rule) j["rule"] = *cfg.rule;
  if (!cfg.thresholds.empty()) j["thresholds"] = cfg.thresholds;
  if (cfg.c_sq) j["c_sq"] = *cfg.c_sq;
  if (cfg.alpha) j["alpha"] = *cfg.alpha;
  if (cfg.n) j["n"] = *cfg.n;
  if (cfg.d) j["d"] = *cfg.d;
  if (cfg.mode) j["mode"] = *cfg.mode;
  if (cfg.grid) j["grid"] = *cfg.grid;
  if (cfg.k) j["k"] = *cfg.k;
  if (cfg.epsilon) j["epsilon"] = number_json(*cfg.epsilon);
  json mc = json::object();
  if (cfg.reps) mc["reps"] = *cfg.reps;
  if (cfg.seed) mc["seed"] = *cfg.seed;
  if (!mc.empty()) j["mc"] = mc;
  if (cfg.out) j["out"] = *cfg.out;
  return j;
}

// --- output -----------------------------------------------------------------

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string render() const {
    std::string text;
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i > 0) text += ',';
        text += cells[i];
      }
      text += '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
    return text;
  }
};

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Failure("cannot write '" + path + "'");
  f << text;
  f.flush();
  if (!f) throw Failure("cannot write '" + path + "'");
}

// CSV goes to stdout, or to cfg.out with a replayable JSON sidecar at cfg.out + ".json".
void emit(const std::string& command, const Config& cfg, const Csv& csv,
          std::optional<std::uint64_t> seed, std::ostream& out) {
  const std::string text = csv.render();
  if (!cfg.out) {
    out << text;
    return;
  }
  json side = json::object();
  side["command"] = command;
  side["version"] = smt_version();
  side["seed"] = seed ? json(*seed) : json(nullptr);
  Config echoed = cfg;
  echoed.out.reset();
  side["config"] = config_json(echoed);
  write_file(*cfg.out, text);
  write_file(*cfg.out + ".json", side.dump(2) + "\n");
}

// --- shared pieces ----------------------------------------------------------

Setting explicit_setting(const Config& cfg) {
  if (!cfg.p) throw UsageError("--p is required");
  if (!cfg.u) throw UsageError("--u is required");
  const double sigma_sq = cfg.sigma_sq.value_or(1.0);
  smt_setting* s = nullptr;
  check(smt_setting_create(*cfg.p, sigma_sq, *cfg.u * sigma_sq, cfg.delta.value_or(1.0), 1.0,
                           cfg.m.value_or(1.0), &s));
  return Setting(s);
}

Rule parse_rule(const std::string& text) {
  smt_rule* r = nullptr;
  if (smt_rule_parse(text.c_str(), &r) != SMT_OK) {
    throw UsageError(std::string("--rule: ") + smt_last_error());
  }
  return Rule(r);
}

Study open_study(const std::string& name) {
  smt_study* s = nullptr;
  if (smt_study_open(name.c_str(), &s) != SMT_OK) {
    throw UsageError(std::string("--preset: ") + smt_last_error());
  }
  return Study(s);
}

std::string rule_text(const smt_rule* rule) {
  size_t needed = 0;
  check(smt_rule_text(rule, nullptr, 0, &needed));
  std::string text(needed + 1, '\0');
  check(smt_rule_text(rule, text.data(), text.size(), &needed));
  text.resize(needed);
  return text;
}

// Setting and bound rule: a preset evaluated at --m, or explicit parameters.
struct Problem {
  Setting setting;
  Rule rule;
};

Problem resolve_problem(const Config& cfg, bool need_rule) {
  Problem pr;
  if (cfg.preset) {
    if (!cfg.m) throw UsageError("--m is required with --preset");
    Study study = open_study(*cfg.preset);
    if (cfg.rule) {
      Rule r = parse_rule(*cfg.rule);
      check(smt_study_set_rule(study.get(), r.get()));
    }
    smt_setting* s = nullptr;
    smt_rule* r = nullptr;
    check(smt_study_point(study.get(), *cfg.m, &s, &r));
    pr.setting.reset(s);
    pr.rule.reset(r);
    return pr;
  }
  pr.setting = explicit_setting(cfg);
  if (cfg.rule) {
    pr.rule = parse_rule(*cfg.rule);
  } else if (need_rule) {
    throw UsageError("--rule or --preset is required");
  }
  return pr;
}

unsigned resolve_workers(const std::optional<unsigned>& flag) {
  if (flag) return *flag;
  const char* env = std::getenv("SPARSEMT_WORKERS");
  if (env == nullptr || *env == '\0') return 0;
  char* end = nullptr;
  const unsigned long w = std::strtoul(env, &end, 10);
  if (*end != '\0' || w > 4096) {
    throw UsageError("SPARSEMT_WORKERS must be an integer in [0, 4096]");
  }
  return static_cast<unsigned>(w);
}

// --- subcommands ------------------------------------------------------------

void cmd_threshold(const Config& cfg, std::ostream& out) {
  if (cfg.thresholds.empty()) {
    throw UsageError("request at least one of --oracle --bfdr --gw --bonferroni --universal --replicate");
  }
  Csv csv;
  csv.header = {"rule", "c_sq", "c", "p", "u", "delta", "m", "alpha", "n", "d"};
  auto require = [&](const std::optional<double>& v, const char* flag, const std::string& kind) {
    if (!v) throw UsageError(std::string(flag) + " is required for --" + kind);
    return *v;
  };
  for (const std::string& kind : cfg.thresholds) {
    double c_sq = 0.0;
    if (kind == "oracle") {
      Setting s = explicit_setting(cfg);
      check(smt_oracle_threshold(s.get(), &c_sq, nullptr));
    } else if (kind == "bfdr" || kind == "gw") {
      const double alpha = require(cfg.alpha, "--alpha", kind);
      Setting s = explicit_setting(cfg);
      check(kind == "bfdr" ? smt_bfdr_threshold(s.get(), alpha, &c_sq)
                           : smt_gw_threshold(s.get(), alpha, &c_sq));
    } else if (kind == "bonferroni") {
      check(smt_bonferroni_threshold(require(cfg.m, "--m", kind), require(cfg.alpha, "--alpha", kind),
                                     &c_sq));
    } else if (kind == "universal") {
      check(smt_universal_threshold(require(cfg.m, "--m", kind), cfg.d.value_or(0.0), &c_sq));
    } else if (kind == "replicate") {
      check(smt_replicate_threshold(require(cfg.m, "--m", kind), require(cfg.n, "--n", kind),
                                    cfg.d.value_or(0.0), &c_sq));
    } else {
      throw UsageError("unknown threshold '" + kind + "'");
    }
    // Only the inputs the rule uses are echoed.
    const bool model = kind == "oracle" || kind == "bfdr" || kind == "gw";
    const bool level = kind == "bfdr" || kind == "gw" || kind == "bonferroni";
    const bool additive = kind == "universal" || kind == "replicate";
    auto when = [](bool used, const std::optional<double>& v) { return used ? opt_num(v) : std::string(); };
    csv.rows.push_back({kind, num(c_sq), num(std::sqrt(c_sq)), when(model, cfg.p), when(model, cfg.u),
                        when(model, cfg.delta), opt_num(cfg.m), when(level, cfg.alpha),
                        when(kind == "replicate", cfg.n),
                        additive ? num(cfg.d.value_or(0.0)) : std::string()});
  }
  emit("threshold", cfg, csv, std::nullopt, out);
}

void cmd_risk(const Config& cfg, std::ostream& out) {
  if (cfg.c_sq && cfg.rule) throw UsageError("give either --c-sq or --rule, not both");
  Problem pr = resolve_problem(cfg, false);
  double c_sq = 0.0;
  if (cfg.c_sq) {
    c_sq = *cfg.c_sq;
  } else if (pr.rule) {
    check(smt_rule_threshold(pr.rule.get(), pr.setting.get(), &c_sq));
  } else {
    throw UsageError("--c-sq, --rule or --preset is required");
  }
  smt_risk rule{}, opt{};
  check(smt_fixed_threshold_risk(pr.setting.get(), c_sq, &rule));
  check(smt_optimal_risk(pr.setting.get(), &opt));
  double p = 0, sigma_sq = 0, tau_sq = 0, delta0 = 0, deltaA = 0, m = 0;
  check(smt_setting_params(pr.setting.get(), &p, &sigma_sq, &tau_sq, &delta0, &deltaA, &m));

  Csv csv;
  csv.header = {"m", "p", "u", "delta", "c_sq", "r1", "r2", "total", "risk_opt", "ratio"};
  csv.rows.push_back({num(m), num(p), num(tau_sq / sigma_sq), num(delta0 / deltaA), num(c_sq),
                      num(rule.r1), num(rule.r2), num(rule.total), num(opt.total),
                      num(rule.total / opt.total)});
  emit("risk", cfg, csv, std::nullopt, out);
}

void cmd_simulate(const Config& cfg, unsigned workers, std::ostream& out) {
  Problem pr = resolve_problem(cfg, true);
  const smt_mc_options opts{cfg.reps.value_or(1000), cfg.seed.value_or(0), workers};

  smt_mc_report rep{};
  if (cfg.k) {
    check(smt_mc_conditional(pr.setting.get(), pr.rule.get(), *cfg.k, &opts, &rep));
  } else {
    check(smt_mc_run(pr.setting.get(), pr.rule.get(), &opts, &rep));
  }
  smt_risk opt{};
  check(smt_optimal_risk(pr.setting.get(), &opt));

  Csv csv;
  csv.header = {"statistic", "mean", "std_error", "reps"};
  auto add = [&](const char* name, const smt_estimate& e) {
    csv.rows.push_back({name, num(e.mean), num(e.std_error), std::to_string(e.reps)});
  };
  auto add_value = [&](const char* name, double v) { csv.rows.push_back({name, num(v), "", ""}); };
  add("risk", rep.risk);
  add("fdr", rep.fdr);
  add("fwer", rep.fwer);
  add("ev", rep.ev);
  add("power", rep.power);
  add("type1", rep.type1);
  add("type2", rep.type2);
  add("rejections", rep.rejections);
  add("threshold", rep.threshold);
  if (rep.has_threshold_gap) add("threshold_gap", rep.threshold_gap);
  add_value("risk_opt", opt.total);

  if (cfg.epsilon) {
    double alpha = 0.0;
    int has_level = 0;
    check(smt_rule_level(pr.rule.get(), &alpha, &has_level));
    if (smt_rule_is_fixed(pr.rule.get()) || !has_level) {
      throw UsageError("--epsilon needs a BH rule with a level");
    }
    smt_gap_study gap{};
    check(smt_threshold_gap(pr.setting.get(), alpha, *cfg.epsilon, &opts, cfg.k ? 1 : 0,
                            cfg.k.value_or(0), &gap));
    add_value("gap_median", gap.median_gap);
    add_value("exceed_frac", gap.exceed_frac);
    add_value("c_gw", gap.c_gw);
    add_value("c_bon", gap.c_bon);
  }

  Config echo = cfg;
  echo.rule = rule_text(pr.rule.get());
  echo.reps = opts.reps;
  echo.seed = opts.seed;
  emit("simulate", echo, csv, opts.seed, out);
}

void cmd_convergence(const Config& cfg, unsigned workers, std::ostream& out) {
  if (!cfg.preset) throw UsageError("--preset is required");
  Study study = open_study(*cfg.preset);
  if (cfg.rule) {
    Rule r = parse_rule(*cfg.rule);
    check(smt_study_set_rule(study.get(), r.get()));
  }
  if (cfg.grid) check(smt_study_set_grid(study.get(), cfg.grid->data(), cfg.grid->size()));

  smt_rule* current = nullptr;
  check(smt_study_rule(study.get(), &current));
  Rule rule(current);

  std::string mode = cfg.mode.value_or(smt_rule_is_fixed(rule.get()) ? "exact" : "mc");
  if (mode != "exact" && mode != "mc") throw UsageError("--mode must be exact or mc");
  const bool mc = mode == "mc";
  const smt_mc_options opts{cfg.reps.value_or(200), cfg.seed.value_or(0), workers};

  smt_table* raw = nullptr;
  check(smt_study_run(study.get(), mc ? SMT_MODE_MC : SMT_MODE_EXACT, &opts, &raw));
  Table table(raw);

  Csv csv;
  const size_t cols = smt_table_columns(table.get());
  for (size_t c = 0; c < cols; ++c) csv.header.emplace_back(smt_table_column_name(table.get(), c));
  for (size_t r = 0; r < smt_table_rows(table.get()); ++r) {
    std::vector<std::string> cells;
    for (size_t c = 0; c < cols; ++c) {
      double v = 0.0;
      check(smt_table_value(table.get(), r, c, &v));
      cells.push_back(num(v));
    }
    csv.rows.push_back(std::move(cells));
  }

  Config echo = cfg;
  echo.rule = rule_text(rule.get());
  echo.mode = mode;
  const double* grid = nullptr;
  size_t count = 0;
  check(smt_study_grid(study.get(), &grid, &count));
  echo.grid = std::vector<double>(grid, grid + count);
  if (mc) {
    echo.reps = opts.reps;
    echo.seed = opts.seed;
  }
  emit("convergence", echo, csv, mc ? std::optional<std::uint64_t>(opts.seed) : std::nullopt, out);
}

void cmd_presets(std::ostream& out) {
  for (size_t i = 0; i < smt_preset_count(); ++i) {
    const char* name = smt_preset_name(i);
    smt_study* s = nullptr;
    check(smt_study_open(name, &s));
    Study study(s);
    out << name << "  " << smt_study_summary(study.get()) << "\n";
  }
}

// --- flag wiring ------------------------------------------------------------

std::vector<double> parse_grid_flag(const std::string& text) {
  auto to_double = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || s.empty()) throw UsageError("--grid: '" + s + "' is not a number");
    return v;
  };
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
    if (parts.size() != 3) throw UsageError("--grid range must be lo:hi:per_decade");
    return decade_grid(to_double(parts[0]), to_double(parts[1]), to_double(parts[2]));
  }
  std::vector<double> out;
  std::stringstream ss(text);
  for (std::string part; std::getline(ss, part, ',');) out.push_back(to_double(part));
  if (out.empty()) throw UsageError("--grid must not be empty");
  return out;
}

struct Flags {
  Config cfg;
  std::optional<std::string> config_file;
  std::optional<std::string> grid;
  std::optional<unsigned> workers;
  bool oracle = false, bfdr = false, gw = false, bonferroni = false, universal = false,
       replicate = false;
};

void add_setting_flags(CLI::App* app, Flags& f) {
  app->add_option("--p", f.cfg.p, "Mixture weight of the alternative");
  app->add_option("--u", f.cfg.u, "Signal scale tau^2/sigma^2");
  app->add_option("--sigma-sq", f.cfg.sigma_sq, "Null variance (default 1)");
  app->add_option("--delta", f.cfg.delta, "Loss ratio delta0/deltaA (default 1)");
  app->add_option("--m", f.cfg.m, "Number of tests");
}

void add_common_flags(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config_file, "JSON config document; flags override it");
  app->add_option("--out", f.cfg.out, "Write CSV here plus a .json sidecar");
}

void add_mc_flags(CLI::App* app, Flags& f) {
  app->add_option("--reps", f.cfg.reps, "Monte Carlo replicates");
  app->add_option("--seed", f.cfg.seed, "Master seed");
  app->add_option("--workers", f.workers,
                  "Worker threads (default $SPARSEMT_WORKERS, else one per core)");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Thresholds, risks, simulations and convergence studies for sparse multiple testing"};
  app.set_version_flag("--version", std::string(smt_version()));
  app.require_subcommand(1);
  Flags f;

  auto* threshold = app.add_subcommand("threshold", "Print thresholds (c^2 and |Z| scale)");
  add_common_flags(threshold, f);
  add_setting_flags(threshold, f);
  threshold->add_flag("--oracle", f.oracle, "Bayes oracle");
  threshold->add_flag("--bfdr", f.bfdr, "BFDR control at --alpha");
  threshold->add_flag("--gw", f.gw, "GW approximation to BH at --alpha");
  threshold->add_flag("--bonferroni", f.bonferroni, "Bonferroni at FWER --alpha");
  threshold->add_flag("--universal", f.universal, "2 log m + d");
  threshold->add_flag("--replicate", f.replicate, "log n + 2 log m + d");
  threshold->add_option("--alpha", f.cfg.alpha, "Level");
  threshold->add_option("--n", f.cfg.n, "Replicates per statistic");
  threshold->add_option("--d", f.cfg.d, "Additive constant (default 0)");

  auto* risk = app.add_subcommand("risk", "Exact Bayes risk of a threshold rule");
  add_common_flags(risk, f);
  add_setting_flags(risk, f);
  risk->add_option("--c-sq", f.cfg.c_sq, "Squared threshold");
  risk->add_option("--rule", f.cfg.rule, "Rule descriptor, e.g. bfdr:alpha=0.1");
  risk->add_option("--preset", f.cfg.preset, "Take setting and rule from a preset at --m");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo risk, FDR, FWER and E(V)");
  add_common_flags(simulate, f);
  add_setting_flags(simulate, f);
  add_mc_flags(simulate, f);
  simulate->add_option("--rule", f.cfg.rule, "Rule descriptor, e.g. bh:alpha=0.1");
  simulate->add_option("--preset", f.cfg.preset, "Take setting and rule from a preset at --m");
  simulate->add_option("--k", f.cfg.k, "Fix the number of signals in every replicate");
  simulate->add_option("--epsilon", f.cfg.epsilon, "Also report P(|c_BH - c_GW| > epsilon)");

  auto* convergence = app.add_subcommand("convergence", "Risk ratio along a preset regime");
  add_common_flags(convergence, f);
  add_mc_flags(convergence, f);
  convergence->add_option("--preset", f.cfg.preset, "Preset name (see 'presets')");
  convergence->add_option("--rule", f.cfg.rule, "Replace the preset rule");
  convergence->add_option("--mode", f.cfg.mode, "exact or mc")
      ->check(CLI::IsMember({"exact", "mc"}));
  convergence->add_option("--grid", f.grid, "lo:hi:per_decade in log10 m, or a comma list of m");

  auto* presets = app.add_subcommand("presets", "List preset studies");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help(e.get_name() == "--help" ? "" : e.get_name());
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << smt_version() << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (f.grid) f.cfg.grid = parse_grid_flag(*f.grid);
    if (f.oracle) f.cfg.thresholds.push_back("oracle");
    if (f.bfdr) f.cfg.thresholds.push_back("bfdr");
    if (f.gw) f.cfg.thresholds.push_back("gw");
    if (f.bonferroni) f.cfg.thresholds.push_back("bonferroni");
    if (f.universal) f.cfg.thresholds.push_back("universal");
    if (f.replicate) f.cfg.thresholds.push_back("replicate");

    const std::string command = app.get_subcommands().front()->get_name();
    Config cfg = f.config_file ? merge(load_config(*f.config_file, command), f.cfg) : f.cfg;

    if (command == "threshold") {
      cmd_threshold(cfg, out);
    } else if (command == "risk") {
      cmd_risk(cfg, out);
    } else if (command == "simulate") {
      cmd_simulate(cfg, resolve_workers(f.workers), out);
    } else if (command == "convergence") {
      cmd_convergence(cfg, resolve_workers(f.workers), out);
    } else if (presets->parsed()) {
      cmd_presets(out);
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const Failure& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace sparsemt::cli
