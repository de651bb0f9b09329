#include "pdmp/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

#include "pdmp/error.hpp"
#include "pdmp/format.hpp"
#include "pdmp/parallel.hpp"
#include "pdmp/penalty.hpp"

namespace pdmp {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

[[noreturn]] void schema_error(const std::string& where, const std::string& what) {
  throw Error(Errc::ConfigError, where + ": " + what);
}

void allow_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) schema_error(where, "expected an object");
  for (const auto& [key, _] : j.items()) {
    if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return key == k; }))
      schema_error(where, "unknown key \"" + key + "\"");
  }
}

const json& require(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) schema_error(where, std::string("missing \"") + key + "\"");
  return j.at(key);
}

double as_real(const json& j, const std::string& where) {
  if (!j.is_number()) schema_error(where, "expected a number");
  return j.get<double>();
}

std::uint64_t as_unsigned(const json& j, const std::string& where) {
  if (!j.is_number_unsigned()) schema_error(where, "expected a nonnegative integer");
  return j.get<std::uint64_t>();
}

std::string as_string(const json& j, const std::string& where) {
  if (!j.is_string()) schema_error(where, "expected a string");
  return j.get<std::string>();
}

std::vector<double> as_reals(const json& j, const std::string& where) {
  if (!j.is_array()) schema_error(where, "expected an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_real(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

JumpKernel parse_kernel(const json& j, const std::string& where) {
  if (!j.is_object()) schema_error(where, "expected a kernel object");
  const std::string kind = as_string(require(j, "kind", where), where + ".kind");
  if (kind == "dirac") {
    allow_keys(j, where, {"kind", "at"});
    return JumpKernel::dirac(as_real(require(j, "at", where), where + ".at"));
  }
  if (kind == "uniform") {
    allow_keys(j, where, {"kind", "lo", "hi"});
    return JumpKernel::uniform(as_real(require(j, "lo", where), where + ".lo"),
                               as_real(require(j, "hi", where), where + ".hi"));
  }
  if (kind == "mixture") {
    allow_keys(j, where, {"kind", "components"});
    const json& parts = require(j, "components", where);
    if (!parts.is_array() || parts.empty()) schema_error(where + ".components", "expected a nonempty array");
    std::vector<std::pair<double, JumpKernel>> out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      const std::string at = where + ".components[" + std::to_string(i) + "]";
      allow_keys(parts[i], at, {"weight", "kernel"});
      out.emplace_back(as_real(require(parts[i], "weight", at), at + ".weight"),
                       parse_kernel(require(parts[i], "kernel", at), at + ".kernel"));
    }
    return JumpKernel::mixture(std::move(out));
  }
  schema_error(where + ".kind", "unknown kernel kind \"" + kind + "\"");
}

ojson kernel_json(const JumpKernel& k) {
  return std::visit(
      [](const auto& v) -> ojson {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Dirac>) {
          return {{"kind", "dirac"}, {"at", v.at}};
        } else if constexpr (std::is_same_v<T, Uniform>) {
          return {{"kind", "uniform"}, {"lo", v.lo}, {"hi", v.hi}};
        } else if constexpr (std::is_same_v<T, Mixture>) {
          ojson parts = ojson::array();
          for (const auto& c : v.components) parts.push_back({{"weight", c.weight}, {"kernel", kernel_json(c.kernel)}});
          return {{"kind", "mixture"}, {"components", parts}};
        } else {
          throw Error(Errc::ConfigError, "pushforward kernels have no config representation");
        }
      },
      k.variant());
}

FlowSpec constant_flow(double m, double c, std::vector<double> alpha) {
  FlowSpec f;
  f.m = m;
  f.c = c;
  f.alpha = std::move(alpha);
  f.f = TabulatedF{"constant", [](double) { return 1.0; }, [m](double x) { return x - m; },
                   [m](double z) { return z + m; }};
  return f;
}

ProcessKind parse_kind(const std::string& s, const std::string& where) {
  for (auto k : {ProcessKind::Constrained, ProcessKind::Penalized, ProcessKind::Averaged, ProcessKind::Mirror,
                 ProcessKind::Flow, ProcessKind::Coupled})
    if (process_kind_name(k) == s) return k;
  schema_error(where, "unknown process \"" + s + "\"");
}

bool is_path_kind(ProcessKind k) {
  return k == ProcessKind::Constrained || k == ProcessKind::Averaged || k == ProcessKind::Flow ||
         k == ProcessKind::Penalized;
}

std::vector<std::string> estimator_names(const ExperimentConfig& cfg) {
  if (is_path_kind(cfg.kind)) {
    std::vector<std::string> names{"n_hits", "tv_prejump_pistar", "mean_first_hit"};
    if (cfg.drift_window) names.emplace_back("drift");
    if (cfg.kind == ProcessKind::Penalized) names.emplace_back("lambda_sup_dev");
    return names;
  }
  if (cfg.kind == ProcessKind::Coupled)
    return {"skorokhod_bound", "lambda_sup_dev", "exceptional_frequency", "coupling_broken_frequency", "mean_jumps"};
  return {"mirror_value"};
}

ProcessConfig linear_config(const ExperimentConfig& cfg) {
  if (cfg.kind == ProcessKind::Flow) return reduce_to_linear(FlowConfig{cfg.process, *cfg.flow});
  return cfg.process;
}

struct ReplicaResult {
  std::string rows;
  std::string path_csv;
  std::vector<double> speeds;
  double first_hit = kNaN;
  double slope = kNaN;
  double lambda_dev = 0.0;
  double bound = 0.0;
  double mirror = 0.0;
  bool exceptional = false;
  bool broken = false;
  std::size_t jumps = 0;
};

void record_hits(ReplicaResult& r, std::size_t replica, const CadlagPath& linear,
                 const std::vector<HittingRecord>& shown, const std::optional<DriftWindow>& window) {
  std::ostringstream rows;
  write_hits_rows(rows, replica, shown);
  r.rows = rows.str();
  for (const auto& h : linear.jumps) r.speeds.push_back(h.prejump_speed);
  r.jumps = linear.jumps.size();
  if (!linear.jumps.empty()) r.first_hit = linear.jumps.front().time;
  if (window) r.slope = drift_estimate(std::span<const CadlagPath>(&linear, 1), window->t0, window->t1).mean;
}

ReplicaResult run_replica(const ExperimentConfig& cfg, std::size_t r, bool dump) {
  const RngStream rng(cfg.seed, r);
  const ProcessConfig& p = cfg.process;
  ReplicaResult out;
  std::ostringstream path_out;
  switch (cfg.kind) {
    case ProcessKind::Constrained:
    case ProcessKind::Averaged: {
      const auto path = cfg.kind == ProcessKind::Constrained ? simulate_constrained(p, rng) : simulate_averaged(p, rng);
      record_hits(out, r, path, path.jumps, cfg.drift_window);
      if (dump) write_path_csv(path_out, path);
      break;
    }
    case ProcessKind::Flow: {
      const auto fp = simulate_flow(FlowConfig{p, *cfg.flow}, rng);
      record_hits(out, r, fp.z, fp.hits(), cfg.drift_window);
      if (dump) write_path_csv(path_out, fp.z, fp.g.inverse);
      break;
    }
    case ProcessKind::Penalized: {
      const auto pp = simulate_penalized(p, cfg.k, rng);
      record_hits(out, r, pp.path, pp.path.jumps, cfg.drift_window);
      out.lambda_dev = time_change(pp, p.epsilon, cfg.k).sup_deviation();
      if (dump) write_path_csv(path_out, pp.path);
      break;
    }
    case ProcessKind::Coupled: {
      const auto pair = simulate_coupled(p, cfg.k, rng);
      const auto s = summarize_coupling(pair, p.epsilon, cfg.k);
      std::ostringstream rows;
      write_coupling_row(rows, r, cfg.k, p.epsilon, s);
      out.rows = rows.str();
      out.lambda_dev = s.lambda_sup_dev;
      out.bound = s.skorokhod_bound;
      out.exceptional = s.switched_during_gap;
      out.broken = s.coupling_broken;
      out.jumps = s.n_jumps_x;
      if (dump) write_path_csv(path_out, pair.x);
      break;
    }
    case ProcessKind::Mirror: {
      const auto m = simulate_mirror(p, rng, cfg.mirror_horizon);
      out.mirror = path_value(m, cfg.mirror_horizon);
      out.rows = std::to_string(r) + ',' + format_real(cfg.mirror_horizon) + ',' + format_real(out.mirror) + '\n';
      if (dump) write_path_csv(path_out, m);
      break;
    }
  }
  out.path_csv = path_out.str();
  return out;
}

EstimatorResult from_estimate(std::string name, const Estimate& e, std::optional<double> reference = std::nullopt) {
  return EstimatorResult{std::move(name), e.mean, e.std_error, reference, std::nullopt};
}

Estimate estimate_or_nan(const std::vector<double>& v) {
  if (v.empty()) return Estimate{kNaN, kNaN, 0};
  return mean_and_error(v);
}

void apply_checks(const ExperimentConfig& cfg, std::vector<EstimatorResult>& results) {
  for (const auto& check : cfg.checks) {
    auto it = std::find_if(results.begin(), results.end(), [&](const auto& e) { return e.name == check.estimator; });
    if (it == results.end()) continue;
    bool ok = std::isfinite(it->value);
    if (check.max) ok = ok && it->value <= *check.max;
    if (check.tolerance) {
      ok = ok && it->reference &&
           std::abs(it->value - *it->reference) <= *check.tolerance + 3.0 * it->std_error;
    }
    it->pass = it->pass.value_or(true) && ok;
  }
}

ojson optional_number(const std::optional<double>& v) { return v ? ojson(*v) : ojson(nullptr); }

}  // namespace

std::string process_kind_name(ProcessKind kind) {
  switch (kind) {
    case ProcessKind::Constrained: return "constrained";
    case ProcessKind::Penalized: return "penalized";
    case ProcessKind::Averaged: return "averaged";
    case ProcessKind::Mirror: return "mirror";
    case ProcessKind::Flow: return "flow";
    case ProcessKind::Coupled: return "coupled";
  }
  return "unknown";
}

ExperimentConfig parse_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t column = 1;
    const std::size_t end = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw Error(Errc::ConfigError, "line " + std::to_string(line) + ", column " + std::to_string(column) +
                                       ": malformed JSON (" + e.what() + ")");
  }

  const std::string root = "config";
  allow_keys(j, root,
             {"schema", "process", "speeds", "generator", "boundary", "gap", "epsilon", "horizon", "initial",
              "initial_state", "kernels", "flow", "k", "replicas", "seed", "sweep", "drift_window", "mirror_horizon",
              "checks", "format"});
  if (as_unsigned(require(j, "schema", root), "schema") != 1) schema_error("schema", "only schema 1 is supported");

  ExperimentConfig cfg;
  if (j.contains("process")) cfg.kind = parse_kind(as_string(j["process"], "process"), "process");

  auto& p = cfg.process;
  p.generator.speeds = as_reals(require(j, "speeds", root), "speeds");
  const json& rows = require(j, "generator", root);
  const std::size_t n = p.generator.speeds.size();
  if (!rows.is_array() || rows.size() != n) schema_error("generator", "expected one row per speed");
  p.generator.q.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = as_reals(rows[i], "generator[" + std::to_string(i) + "]");
    if (row.size() != n) schema_error("generator[" + std::to_string(i) + "]", "expected one entry per speed");
    for (std::size_t jx = 0; jx < n; ++jx)
      p.generator.q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(jx)) = row[jx];
  }
  const json& kernels = require(j, "kernels", root);
  if (!kernels.is_array()) schema_error("kernels", "expected an array");
  for (std::size_t i = 0; i < kernels.size(); ++i)
    p.kernels.push_back(parse_kernel(kernels[i], "kernels[" + std::to_string(i) + "]"));

  if (j.contains("boundary")) p.boundary = as_real(j["boundary"], "boundary");
  if (j.contains("gap")) p.gap = as_real(j["gap"], "gap");
  if (j.contains("epsilon")) p.epsilon = as_real(j["epsilon"], "epsilon");
  if (j.contains("horizon")) p.horizon = as_real(j["horizon"], "horizon");
  if (j.contains("initial")) p.initial = parse_kernel(j["initial"], "initial");
  if (j.contains("initial_state")) {
    const json& s = j["initial_state"];
    if (s.is_string()) {
      if (s.get<std::string>() != "stationary") schema_error("initial_state", "expected \"stationary\"");
      p.initial_state = Stationary{};
    } else if (s.is_number_unsigned()) {
      p.initial_state = s.get<std::size_t>();
    } else {
      allow_keys(s, "initial_state", {"weights"});
      ProbabilityVector law;
      law.weights = as_reals(require(s, "weights", "initial_state"), "initial_state.weights");
      law.support = p.generator.speeds;
      p.initial_state = law;
    }
  }
  if (j.contains("flow")) {
    const json& f = j["flow"];
    allow_keys(f, "flow", {"m", "alpha", "F"});
    const double m = as_real(require(f, "m", "flow"), "flow.m");
    auto alpha = as_reals(require(f, "alpha", "flow"), "flow.alpha");
    const std::string kind = f.contains("F") ? as_string(f["F"], "flow.F") : "quadratic";
    if (kind == "quadratic") {
      FlowSpec spec;
      spec.m = m;
      spec.c = p.boundary;
      spec.alpha = std::move(alpha);
      cfg.flow = spec;
    } else if (kind == "constant") {
      cfg.flow = constant_flow(m, p.boundary, std::move(alpha));
    } else {
      schema_error("flow.F", "expected \"quadratic\" or \"constant\"");
    }
  }
  if (j.contains("k")) {
    const auto k = as_unsigned(j["k"], "k");
    if (k < 1 || k > 64) schema_error("k", "expected an integer in [1, 64]");
    cfg.k = static_cast<int>(k);
  }
  if (j.contains("replicas")) cfg.replicas = as_unsigned(j["replicas"], "replicas");
  if (j.contains("seed")) cfg.seed = as_unsigned(j["seed"], "seed");
  if (j.contains("sweep")) {
    const json& s = j["sweep"];
    allow_keys(s, "sweep", {"parameter", "values"});
    cfg.sweep = SweepSpec{as_string(require(s, "parameter", "sweep"), "sweep.parameter"),
                          as_reals(require(s, "values", "sweep"), "sweep.values")};
  }
  if (j.contains("drift_window")) {
    const auto w = as_reals(j["drift_window"], "drift_window");
    if (w.size() != 2) schema_error("drift_window", "expected [t0, t1]");
    cfg.drift_window = DriftWindow{w[0], w[1]};
  }
  if (j.contains("mirror_horizon")) cfg.mirror_horizon = as_real(j["mirror_horizon"], "mirror_horizon");
  if (j.contains("checks")) {
    const json& cs = j["checks"];
    if (!cs.is_array()) schema_error("checks", "expected an array");
    for (std::size_t i = 0; i < cs.size(); ++i) {
      const std::string at = "checks[" + std::to_string(i) + "]";
      allow_keys(cs[i], at, {"estimator", "max", "tolerance"});
      Check c{as_string(require(cs[i], "estimator", at), at + ".estimator"), std::nullopt, std::nullopt};
      if (cs[i].contains("max")) c.max = as_real(cs[i]["max"], at + ".max");
      if (cs[i].contains("tolerance")) c.tolerance = as_real(cs[i]["tolerance"], at + ".tolerance");
      cfg.checks.push_back(std::move(c));
    }
  }
  if (j.contains("format")) cfg.format = as_string(j["format"], "format");
  validate_experiment(cfg);
  return cfg;
}

nlohmann::ordered_json to_json(const ExperimentConfig& cfg) {
  const auto& p = cfg.process;
  ojson j;
  j["schema"] = 1;
  j["process"] = process_kind_name(cfg.kind);
  j["speeds"] = p.generator.speeds;
  ojson rows = ojson::array();
  for (Eigen::Index i = 0; i < p.generator.q.rows(); ++i) {
    ojson row = ojson::array();
    for (Eigen::Index k = 0; k < p.generator.q.cols(); ++k) row.push_back(p.generator.q(i, k));
    rows.push_back(row);
  }
  j["generator"] = rows;
  j["boundary"] = p.boundary;
  j["gap"] = p.gap;
  j["epsilon"] = p.epsilon;
  j["horizon"] = p.horizon;
  j["initial"] = kernel_json(p.initial);
  if (std::holds_alternative<Stationary>(p.initial_state)) {
    j["initial_state"] = "stationary";
  } else if (const auto* idx = std::get_if<std::size_t>(&p.initial_state)) {
    j["initial_state"] = *idx;
  } else {
    j["initial_state"] = {{"weights", std::get<ProbabilityVector>(p.initial_state).weights}};
  }
  ojson ks = ojson::array();
  for (const auto& k : p.kernels) ks.push_back(kernel_json(k));
  j["kernels"] = ks;
  if (cfg.flow) {
    std::string f = "quadratic";
    if (const auto* t = std::get_if<TabulatedF>(&cfg.flow->f)) f = t->name;
    j["flow"] = {{"m", cfg.flow->m}, {"alpha", cfg.flow->alpha}, {"F", f}};
  }
  j["k"] = cfg.k;
  j["replicas"] = cfg.replicas;
  j["seed"] = cfg.seed;
  if (cfg.sweep) j["sweep"] = {{"parameter", cfg.sweep->parameter}, {"values", cfg.sweep->values}};
  if (cfg.drift_window) j["drift_window"] = {cfg.drift_window->t0, cfg.drift_window->t1};
  j["mirror_horizon"] = cfg.mirror_horizon;
  ojson cs = ojson::array();
  for (const auto& c : cfg.checks) {
    ojson o{{"estimator", c.estimator}};
    if (c.max) o["max"] = *c.max;
    if (c.tolerance) o["tolerance"] = *c.tolerance;
    cs.push_back(o);
  }
  j["checks"] = cs;
  j["format"] = cfg.format;
  return j;
}

ExperimentConfig preset_config(std::string_view name) {
  ExperimentConfig cfg;
  cfg.replicas = 1000;
  cfg.seed = 7;
  if (name == "quadratic-if") {
    const FlowConfig f = quadratic_if_preset();
    cfg.kind = ProcessKind::Flow;
    cfg.process = f.process;
    cfg.flow = f.flow;
    return cfg;
  }
  if (name == "quadratic-z") {
    auto& p = cfg.process;
    p.generator.speeds = {1.0, 4.0};
    p.generator.q.resize(2, 2);
    p.generator.q << -1.0, 1.0, 2.0, -2.0;
    p.boundary = 1.0;
    p.gap = 1.0;
    p.initial = JumpKernel::dirac(0.0);
    p.kernels = {JumpKernel::dirac(0.0), JumpKernel::dirac(0.0)};
    p.epsilon = 1e-3;
    p.horizon = 1.2;
    cfg.drift_window = DriftWindow{0.0, 0.2};
    return cfg;
  }
  throw Error(Errc::ConfigError, "unknown preset \"" + std::string(name) + "\"");
}

void validate_experiment(const ExperimentConfig& cfg) {
  if (cfg.replicas < 1) throw Error(Errc::ConfigError, "replicas must be >= 1");
  if (cfg.k < 1) throw Error(Errc::ConfigError, "k must be >= 1");
  if (cfg.format != "json" && cfg.format != "csv") throw Error(Errc::ConfigError, "format must be json or csv");
  if (cfg.kind == ProcessKind::Flow && !cfg.flow) throw Error(Errc::ConfigError, "process \"flow\" needs a flow block");
  if (cfg.kind != ProcessKind::Flow && cfg.flow) throw Error(Errc::ConfigError, "a flow block needs process \"flow\"");
  try {
    validate_config(linear_config(cfg));
  } catch (const Error& e) {
    throw Error(Errc::ConfigError, e.what());
  }
  if (cfg.sweep) {
    const auto& s = *cfg.sweep;
    if (s.values.empty()) throw Error(Errc::ConfigError, "sweep needs at least one value");
    if (s.parameter == "epsilon") {
      for (double v : s.values)
        if (!(v > 0.0 && v <= 1.0)) throw Error(Errc::ConfigError, "epsilon sweep values must lie in (0,1]");
    } else if (s.parameter == "k") {
      if (cfg.kind != ProcessKind::Penalized && cfg.kind != ProcessKind::Coupled)
        throw Error(Errc::ConfigError, "a k sweep needs process penalized or coupled");
      for (double v : s.values)
        if (!(v >= 1.0 && v <= 64.0 && v == std::floor(v)))
          throw Error(Errc::ConfigError, "k sweep values must be integers in [1, 64]");
    } else {
      throw Error(Errc::ConfigError, "sweep parameter must be epsilon or k");
    }
  }
  if (cfg.drift_window) {
    if (!is_path_kind(cfg.kind)) throw Error(Errc::ConfigError, "drift_window needs a path-valued process");
    if (!(cfg.drift_window->t0 >= 0.0 && cfg.drift_window->t1 > cfg.drift_window->t0 &&
          cfg.drift_window->t1 <= cfg.process.horizon))
      throw Error(Errc::ConfigError, "drift_window must satisfy 0 <= t0 < t1 <= horizon");
  }
  if (!(cfg.mirror_horizon > 0.0)) throw Error(Errc::ConfigError, "mirror_horizon must be positive");
  const auto names = estimator_names(cfg);
  for (const auto& c : cfg.checks) {
    if (std::find(names.begin(), names.end(), c.estimator) == names.end())
      throw Error(Errc::ConfigError, "check refers to unknown estimator \"" + c.estimator + "\"");
    if (!c.max && !c.tolerance) throw Error(Errc::ConfigError, "check needs max or tolerance");
  }
}

ExperimentConfig at_sweep_value(const ExperimentConfig& cfg, double value) {
  ExperimentConfig out = cfg;
  out.sweep.reset();
  if (!cfg.sweep) return out;
  if (cfg.sweep->parameter == "epsilon") {
    out.process.epsilon = value;
  } else {
    out.k = static_cast<int>(value);
  }
  return out;
}

RunOutput run_experiment(const ExperimentConfig& cfg, unsigned threads, std::size_t dump_paths) {
  validate_experiment(cfg);
  if (cfg.sweep) throw Error(Errc::ConfigError, "run_experiment takes a single sweep value");
  const auto replicas = parallel_map(cfg.replicas, threads, [&](std::size_t r) {
    return run_replica(cfg, r, r < dump_paths);
  });

  RunOutput out;
  std::string records;
  if (is_path_kind(cfg.kind)) {
    out.records_name = "hits.csv";
    std::ostringstream h;
    write_hits_header(h);
    records = h.str();
  } else if (cfg.kind == ProcessKind::Coupled) {
    out.records_name = "coupling.csv";
    std::ostringstream h;
    write_coupling_header(h);
    records = h.str();
  } else {
    out.records_name = "mirror.csv";
    records = "replica,x_horizon,value\n";
  }
  for (const auto& r : replicas) {
    records += r.rows;
    if (!r.path_csv.empty()) out.dumped_paths.push_back(r.path_csv);
  }
  out.records_csv = std::move(records);

  const ProcessConfig lin = linear_config(cfg);
  const double e_pistar = pistar_first_moment(lin.generator);
  auto& est = out.estimators;

  if (is_path_kind(cfg.kind)) {
    std::vector<HittingRecord> all;
    std::vector<double> firsts;
    std::vector<double> slopes;
    std::vector<double> lambdas;
    for (const auto& r : replicas) {
      for (double s : r.speeds) all.push_back(HittingRecord{0, 0.0, s, 0.0});
      if (std::isfinite(r.first_hit)) firsts.push_back(r.first_hit);
      if (std::isfinite(r.slope)) slopes.push_back(r.slope);
      lambdas.push_back(r.lambda_dev);
    }
    est.push_back(EstimatorResult{"n_hits", static_cast<double>(all.size()), 0.0, std::nullopt, std::nullopt});
    const ProbabilityVector pistar = boundary_speed_law_on_speeds(lin.generator);
    if (all.empty()) {
      est.push_back(EstimatorResult{"tv_prejump_pistar", kNaN, kNaN, 0.0, std::nullopt});
    } else {
      est.push_back(EstimatorResult{"tv_prejump_pistar", tv_distance(prejump_speed_law(all), pistar),
                                    tv_standard_error(pistar, all.size()), 0.0, std::nullopt});
    }
    std::optional<double> first_ref;
    if (const auto* d = std::get_if<Dirac>(&lin.initial.variant())) first_ref = (lin.boundary - d->at) * e_pistar;
    est.push_back(from_estimate("mean_first_hit", estimate_or_nan(firsts), first_ref));
    if (cfg.drift_window) est.push_back(from_estimate("drift", estimate_or_nan(slopes), averaged_drift(lin.generator)));
    if (cfg.kind == ProcessKind::Penalized) est.push_back(from_estimate("lambda_sup_dev", mean_and_error(lambdas)));
  } else if (cfg.kind == ProcessKind::Coupled) {
    std::vector<double> bounds, lambdas, exceptional, broken, jumps;
    for (const auto& r : replicas) {
      bounds.push_back(r.bound);
      lambdas.push_back(r.lambda_dev);
      exceptional.push_back(r.exceptional ? 1.0 : 0.0);
      broken.push_back(r.broken ? 1.0 : 0.0);
      jumps.push_back(static_cast<double>(r.jumps));
    }
    est.push_back(from_estimate("skorokhod_bound", mean_and_error(bounds)));
    est.push_back(from_estimate("lambda_sup_dev", mean_and_error(lambdas)));
    est.push_back(from_estimate("exceptional_frequency", mean_and_error(exceptional)));
    est.push_back(from_estimate("coupling_broken_frequency", mean_and_error(broken)));
    est.push_back(from_estimate("mean_jumps", mean_and_error(jumps)));
  } else {
    std::vector<double> values;
    for (const auto& r : replicas) values.push_back(r.mirror);
    est.push_back(from_estimate("mirror_value", mean_and_error(values), cfg.mirror_horizon * e_pistar));
  }
  apply_checks(cfg, est);
  return out;
}

nlohmann::ordered_json summary_json(const ExperimentConfig& cfg, const RunOutput& out,
                                    std::optional<double> sweep_value) {
  const ojson resolved = to_json(cfg);
  ojson s;
  s["config_digest"] = fnv1a_hex(resolved.dump());
  s["process"] = process_kind_name(cfg.kind);
  s["n_replicas"] = cfg.replicas;
  if (sweep_value && cfg.sweep) s["sweep"] = {{"parameter", cfg.sweep->parameter}, {"value", *sweep_value}};
  s["resolved_config"] = resolved;
  ojson list = ojson::array();
  for (const auto& e : out.estimators) {
    list.push_back({{"name", e.name},
                    {"value", e.value},
                    {"std_error", e.std_error},
                    {"reference", optional_number(e.reference)},
                    {"pass", e.pass ? ojson(*e.pass) : ojson(nullptr)}});
  }
  s["estimators"] = list;
  return s;
}

std::string summary_csv(const RunOutput& out) {
  std::string s = "estimator,value,std_error,reference,pass\n";
  for (const auto& e : out.estimators) {
    s += e.name + ',' + format_real(e.value) + ',' + format_real(e.std_error) + ',' +
         (e.reference ? format_real(*e.reference) : "") + ',' + (e.pass ? (*e.pass ? "true" : "false") : "") + '\n';
  }
  return s;
}

bool checks_pass(const RunOutput& out) {
  return std::all_of(out.estimators.begin(), out.estimators.end(),
                     [](const EstimatorResult& e) { return e.pass.value_or(true); });
}

std::string emit_plot_data(std::span<const nlohmann::json> summaries) {
  if (summaries.empty()) throw Error(Errc::InconsistentSummaries, "no summaries given");
  auto names_of = [](const json& s) {
    std::vector<std::string> names;
    if (!s.contains("estimators") || !s["estimators"].is_array())
      throw Error(Errc::InconsistentSummaries, "summary without an estimator list");
    for (const auto& e : s["estimators"]) names.push_back(e.at("name").get<std::string>());
    return names;
  };
  const auto reference = names_of(summaries.front());
  auto number = [](const json& v) { return v.is_number() ? format_real(v.get<double>()) : std::string("nan"); };
  std::string out = "sweep_value,estimator,value,std_error\n";
  for (const auto& s : summaries) {
    if (names_of(s) != reference) throw Error(Errc::InconsistentSummaries, "summaries carry different estimators");
    json x;
    if (s.contains("sweep")) {
      x = s["sweep"].at("value");
    } else if (s.contains("resolved_config") && s["resolved_config"].contains("epsilon")) {
      x = s["resolved_config"]["epsilon"];
    }
    for (const auto& e : s["estimators"])
      out += number(x) + ',' + e.at("name").get<std::string>() + ',' + number(e.at("value")) + ',' +
             number(e.at("std_error")) + '\n';
  }
  return out;
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace pdmp
