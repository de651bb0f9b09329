#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pdmp/flows.hpp"
#include "pdmp/process.hpp"
#include "pdmp/validation.hpp"

namespace pdmp {

enum class ProcessKind { Constrained, Penalized, Averaged, Mirror, Flow, Coupled };

std::string process_kind_name(ProcessKind kind);

struct SweepSpec {
  std::string parameter;  // "epsilon" or "k"
  std::vector<double> values;
};

/// A requested acceptance check. Passes when value <= max (if given) and
/// |value - reference| <= tolerance + 3 std_error (if tolerance is given).
struct Check {
  std::string estimator;
  std::optional<double> max;
  std::optional<double> tolerance;
};

struct DriftWindow {
  double t0 = 0.0;
  double t1 = 0.0;
};

struct ExperimentConfig {
  ProcessKind kind = ProcessKind::Constrained;
  ProcessConfig process;
  std::optional<FlowSpec> flow;  // required for ProcessKind::Flow; F is quadratic or constant
  int k = 1;
  std::size_t replicas = 100;
  std::uint64_t seed = 0;
  std::optional<SweepSpec> sweep;
  std::optional<DriftWindow> drift_window;
  double mirror_horizon = 1.0;
  std::vector<Check> checks;
  std::string format = "json";  // summary format: json or csv
};

/// Parses a schema-1 JSON config. Throws Error(ConfigError); syntax errors
/// carry "line L, column C".
ExperimentConfig parse_config(std::string_view text);

/// The fully resolved config, defaults included. parse_config(to_json(c))
/// reproduces c.
nlohmann::ordered_json to_json(const ExperimentConfig& cfg);

/// Named presets: "quadratic-if" (flow in X-coordinates) and "quadratic-z"
/// (its linear reduction with point-mass kernels).
ExperimentConfig preset_config(std::string_view name);

/// Validates the parts of the config that do not depend on a sweep value.
void validate_experiment(const ExperimentConfig& cfg);

/// The config with one sweep value substituted.
ExperimentConfig at_sweep_value(const ExperimentConfig& cfg, double value);

struct RunOutput {
  std::string records_name;  // hits.csv, coupling.csv or mirror.csv
  std::string records_csv;
  std::vector<EstimatorResult> estimators;
  std::vector<std::string> dumped_paths;  // path CSVs for the first replicas
};

/// Runs one (non-sweep) experiment over `threads` workers. Replica r draws
/// from RngStream(seed, r); output is independent of `threads`.
RunOutput run_experiment(const ExperimentConfig& cfg, unsigned threads, std::size_t dump_paths = 0);

/// Summary document for one run. `sweep_value` is set for sweep members.
nlohmann::ordered_json summary_json(const ExperimentConfig& cfg, const RunOutput& out,
                                    std::optional<double> sweep_value = std::nullopt);

/// Summary as CSV: estimator,value,std_error,reference,pass.
std::string summary_csv(const RunOutput& out);

bool checks_pass(const RunOutput& out);

/// Long-format CSV `sweep_value,estimator,value,std_error` from summaries.
/// Throws InconsistentSummaries when estimator sets differ or input is empty.
std::string emit_plot_data(std::span<const nlohmann::json> summaries);

/// FNV-1a 64 over the bytes, as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);

}  // namespace pdmp
