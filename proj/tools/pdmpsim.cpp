// pdmpsim: command-line driver for the boundary-constrained PDMP simulator.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "pdmp/error.hpp"
#include "pdmp/experiment.hpp"

namespace fs = std::filesystem;
using pdmp::Errc;
using pdmp::Error;
using pdmp::ExperimentConfig;

namespace {

struct Options {
  std::string config;
  std::string preset;
  std::optional<double> epsilon;
  std::optional<int> k;
  std::optional<std::size_t> replicas;
  std::optional<std::uint64_t> seed;
  std::string out = "out";
  std::optional<std::string> format;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  std::size_t dump_paths = 0;
  std::vector<double> values;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::ConfigError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::ConfigError, "cannot write " + path.string());
  out << bytes;
}

ExperimentConfig load(const Options& o) {
  if (o.config.empty() == o.preset.empty()) throw Error(Errc::ConfigError, "give exactly one of --config and --preset");
  ExperimentConfig cfg = o.preset.empty() ? pdmp::parse_config(read_file(o.config)) : pdmp::preset_config(o.preset);
  if (o.epsilon) cfg.process.epsilon = *o.epsilon;
  if (o.k) cfg.k = *o.k;
  if (o.replicas) cfg.replicas = *o.replicas;
  if (o.seed) cfg.seed = *o.seed;
  if (const char* env = std::getenv("PDMP_SEED")) {
    try {
      std::size_t used = 0;
      cfg.seed = std::stoull(env, &used);
      if (used != std::string(env).size()) throw std::invalid_argument(env);
    } catch (const std::exception&) {
      throw Error(Errc::ConfigError, std::string("PDMP_SEED is not an unsigned integer: ") + env);
    }
  }
  if (o.format) cfg.format = *o.format;
  return cfg;
}

// Writes one run's artifacts into `dir`; returns false when a requested check failed.
bool write_run(const ExperimentConfig& full, const ExperimentConfig& single, std::optional<double> sweep_value,
               const Options& o, const fs::path& dir, std::vector<nlohmann::json>& summaries) {
  const auto out = pdmp::run_experiment(single, o.threads, o.dump_paths);
  fs::create_directories(dir);
  write_file(dir / out.records_name, out.records_csv);
  const auto summary = pdmp::summary_json(full, out, sweep_value);
  if (full.format == "json") {
    write_file(dir / "summary.json", summary.dump(2) + "\n");
  } else {
    write_file(dir / "summary.csv", pdmp::summary_csv(out));
  }
  if (!out.dumped_paths.empty()) {
    fs::create_directories(dir / "paths");
    for (std::size_t r = 0; r < out.dumped_paths.size(); ++r)
      write_file(dir / "paths" / ("replica_" + std::to_string(r) + ".csv"), out.dumped_paths[r]);
  }
  summaries.push_back(nlohmann::json::parse(summary.dump()));
  for (const auto& e : out.estimators)
    if (e.pass && !*e.pass) std::cerr << "check failed: " << e.name << " = " << e.value << "\n";
  return pdmp::checks_pass(out);
}

int run(ExperimentConfig cfg, const Options& o) {
  pdmp::validate_experiment(cfg);
  const fs::path dir(o.out);
  std::vector<nlohmann::json> summaries;
  bool ok = true;
  if (!cfg.sweep) {
    ok = write_run(cfg, cfg, std::nullopt, o, dir, summaries);
  } else {
    for (std::size_t i = 0; i < cfg.sweep->values.size(); ++i) {
      const double v = cfg.sweep->values[i];
      const fs::path sub = dir / (cfg.sweep->parameter + "_" + std::to_string(i));
      ok = write_run(cfg, pdmp::at_sweep_value(cfg, v), v, o, sub, summaries) && ok;
    }
    write_file(dir / "plot_data.csv", pdmp::emit_plot_data(summaries));
  }
  if (!ok) throw Error(Errc::ValidationFailure, "one or more requested checks failed");
  return 0;
}

void add_run_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config, "JSON experiment config (schema 1)");
  cmd->add_option("--preset", o.preset, "built-in config: quadratic-if or quadratic-z");
  cmd->add_option("--epsilon", o.epsilon, "time-scale parameter in (0,1]");
  cmd->add_option("--k", o.k, "penalty exponent (integer >= 1)");
  cmd->add_option("--replicas", o.replicas, "number of independent replicas");
  cmd->add_option("--seed", o.seed, "master seed (PDMP_SEED overrides)");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--format", o.format, "summary format")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--dump-paths", o.dump_paths, "write full path CSVs for the first N replicas");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact simulation of boundary-constrained piecewise-linear Markov processes"};
  app.require_subcommand(1);
  Options o;

  auto* simulate = app.add_subcommand("simulate", "run one experiment (or the sweep in its config)");
  add_run_options(simulate, o);

  auto* sweep_eps = app.add_subcommand("sweep-epsilon", "run the experiment for each epsilon");
  add_run_options(sweep_eps, o);
  sweep_eps->add_option("--values", o.values, "comma-separated epsilon values")->delimiter(',')->required();

  auto* sweep_k = app.add_subcommand("sweep-k", "run the experiment for each penalty exponent");
  add_run_options(sweep_k, o);
  sweep_k->add_option("--values", o.values, "comma-separated k values")->delimiter(',')->required();

  std::string preset_name;
  std::string preset_out;
  auto* preset = app.add_subcommand("preset", "print a built-in config as JSON");
  preset->add_option("name", preset_name, "quadratic-if or quadratic-z")->required();
  preset->add_option("--out", preset_out, "write to this file instead of stdout");

  std::vector<std::string> summary_files;
  std::string plot_out;
  auto* plot = app.add_subcommand("plot-data", "merge summary JSON files into long-format CSV");
  plot->add_option("summaries", summary_files, "summary.json files")->required();
  plot->add_option("--out", plot_out, "write to this file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*simulate) return run(load(o), o);
    if (*sweep_eps || *sweep_k) {
      ExperimentConfig cfg = load(o);
      cfg.sweep = pdmp::SweepSpec{*sweep_eps ? "epsilon" : "k", o.values};
      return run(cfg, o);
    }
    if (*preset) {
      const std::string text = pdmp::to_json(pdmp::preset_config(preset_name)).dump(2) + "\n";
      if (preset_out.empty()) {
        std::cout << text;
      } else {
        write_file(preset_out, text);
      }
      return 0;
    }
    if (*plot) {
      std::vector<nlohmann::json> docs;
      for (const auto& f : summary_files) {
        try {
          docs.push_back(nlohmann::json::parse(read_file(f)));
        } catch (const nlohmann::json::parse_error& e) {
          throw Error(Errc::ConfigError, f + ": " + e.what());
        }
      }
      const std::string csv = pdmp::emit_plot_data(docs);
      if (plot_out.empty()) {
        std::cout << csv;
      } else {
        write_file(plot_out, csv);
      }
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "pdmpsim: " << e.what() << "\n";
    return e.code() == Errc::ValidationFailure ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "pdmpsim: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
