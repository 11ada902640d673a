// Command-line front end: configuration-driven experiment runs, topology
// sweeps, the validation suite and the constants report.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "dsa/config.hpp"
#include "dsa/errors.hpp"
#include "dsa/experiment.hpp"
#include "dsa/version.hpp"

namespace {

// Accepts either a key-value config or a manifest.json produced by an
// earlier run (whose embedded config reproduces that run).
dsa::ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw dsa::ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    try {
      const auto manifest = nlohmann::json::parse(text);
      text = manifest.at("config_text").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw dsa::ConfigError(std::string("bad manifest: ") + e.what());
    }
  }
  dsa::ExperimentConfig cfg =
      dsa::ExperimentConfig::resolve(dsa::KeyValueConfig::parse_string(text));
  if (const char* dir = std::getenv("DSA_OUTPUT_DIR"); dir && *dir)
    cfg.output_dir = dir;
  return cfg;
}

int print_and_exit_code(const dsa::ValidationReport& report) {
  std::printf("%-55s %-6s %s\n", "check", "status", "residual/slack");
  for (const auto& c : report.checks)
    std::printf("%-55s %-6s %.3e\n", c.name.c_str(),
                c.pass ? "pass" : "FAIL", c.residual);
  if (!report.all_pass()) {
    std::fprintf(stderr, "failed checks: %s\n", report.failures().c_str());
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"decentralized stochastic optimization simulator"};
  app.set_version_flag("--version", dsa::kVersion);
  app.require_subcommand(1);

  std::string config_path;
  std::string level = "quick";
  bool corrupt_wtilde = false;
  std::string trace_path;

  auto* cmd_run = app.add_subcommand("run", "run configured algorithms");
  cmd_run->add_option("config", config_path, "config file or manifest.json")
      ->required();

  auto* cmd_sweep = app.add_subcommand(
      "topology-sweep", "iterations-to-threshold across topologies");
  cmd_sweep->add_option("config", config_path, "config file or manifest.json")
      ->required();

  auto* cmd_validate =
      app.add_subcommand("validate", "run the property suites");
  cmd_validate->add_option("--level", level, "quick|full")
      ->check(CLI::IsMember({"quick", "full"}));
  cmd_validate->add_flag("--corrupt-wtilde", corrupt_wtilde,
                         "inject an asymmetric mixing-matrix fault (debug)");

  auto* cmd_theory =
      app.add_subcommand("theory-report", "constants and contraction report");
  cmd_theory->add_option("config", config_path, "config file")->required();
  cmd_theory->add_option("--trace", trace_path,
                         "run CSV to fit an empirical rate from");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_run->parsed()) {
      const auto artifacts = dsa::execute_run(load_config(config_path));
      for (const auto& p : artifacts.csv_paths) std::printf("wrote %s\n", p.c_str());
      std::printf("wrote %s\n", artifacts.manifest_path.c_str());
      return 0;
    }
    if (cmd_sweep->parsed()) {
      const auto artifacts =
          dsa::execute_topology_sweep(load_config(config_path));
      for (const auto& p : artifacts.csv_paths) std::printf("wrote %s\n", p.c_str());
      return 0;
    }
    if (cmd_validate->parsed()) {
      const auto report = dsa::run_validation_suite(
          level == "full" ? dsa::ValidateLevel::full
                          : dsa::ValidateLevel::quick,
          corrupt_wtilde);
      return print_and_exit_code(report);
    }
    if (cmd_theory->parsed()) {
      std::optional<std::string> trace;
      if (!trace_path.empty()) trace = trace_path;
      std::fputs(dsa::theory_report(load_config(config_path), trace).c_str(),
                 stdout);
      return 0;
    }
  } catch (const dsa::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const dsa::NonFinite& e) {
    std::fprintf(stderr, "diverged: %s\n", e.what());
    return 3;
  } catch (const dsa::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
