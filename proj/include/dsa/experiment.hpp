#ifndef DSA_EXPERIMENT_HPP
#define DSA_EXPERIMENT_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dsa/analysis.hpp"
#include "dsa/config.hpp"
#include "dsa/graph.hpp"
#include "dsa/problem.hpp"
#include "dsa/solvers.hpp"
#include "dsa/weights.hpp"

namespace dsa {

/// Problem + topology + reference solution assembled from a config.
struct BuiltExperiment {
  std::shared_ptr<ProblemInstance> problem;
  std::optional<LogisticDataset> dataset;
  Graph graph;
  WeightPair weights;
  ReferenceSolution reference;
};

std::shared_ptr<ProblemInstance> build_problem(
    const ProblemSpec& spec, int n_nodes,
    std::optional<LogisticDataset>* dataset_out = nullptr);

/// "zeros", or per-node "random" normal draws scaled by `scale`.
StackedVector make_initial_iterate(const std::string& kind, double scale,
                                   int n_nodes, int dim, std::uint64_t seed);

BuiltExperiment build_experiment(const ExperimentConfig& cfg);

struct RunOutput {
  AlgoSpec algo;
  RunRecord record;
  double wall_ms = 0.0;
};

/// Runs every configured algorithm with per-algorithm metric hooks wired up.
std::vector<RunOutput> run_all(const ExperimentConfig& cfg,
                               const BuiltExperiment& built);

struct RunArtifacts {
  std::vector<std::string> csv_paths;
  std::string manifest_path;
  std::string resolved_config_path;
};

/// Full `run` command: builds, runs, writes one CSV per algorithm plus a
/// manifest and the resolved config (both sufficient to reproduce the run).
RunArtifacts execute_run(const ExperimentConfig& cfg);

/// First iteration with e^t <= threshold, or -1 when never reached.
std::int64_t first_hit_iteration(const RunRecord& record, double threshold);

struct SweepResult {
  std::string topology;
  double p_c = 0.0;
  std::uint64_t seed = 0;
  std::int64_t hit_iteration = -1;
  double final_error = 0.0;
};

/// Iterations-to-threshold for the fixed topology set
/// {complete, random(0.3), random(0.2), cycle, line, star}, one row per
/// (topology, seed). The first configured algorithm is used (default DSA).
std::vector<SweepResult> topology_sweep(const ExperimentConfig& cfg);
std::string sweep_to_csv(const std::vector<SweepResult>& results);
RunArtifacts execute_topology_sweep(const ExperimentConfig& cfg);

// ---------------------------------------------------------------------------
// Reusable diagnostics; the validate subcommand, the unit tests and the
// acceptance suite all call these.

/// Max abs deviation between the per-node enumeration average of the
/// averaging gradient and the true local gradient, over random reachable
/// states.
double max_unbiasedness_deviation(const ProblemInstance& pi,
                                  const WeightPair& wp, int n_states,
                                  std::uint64_t seed);

/// Max over t of the Frobenius distance between the iterates of two
/// algorithms run with identical seeds and index streams.
double max_trajectory_deviation(Algorithm a, Algorithm b,
                                const ProblemInstance& pi,
                                const WeightPair& wp,
                                const StepSchedule& schedule,
                                std::int64_t iterations, std::uint64_t seed,
                                const Vector& x_star);

/// Smallest slack across all expectation bounds over random reachable
/// states, using the closed-form parameter choice.
double min_expectation_bound_slack(const ProblemInstance& pi,
                                   const WeightPair& wp, int n_states,
                                   std::uint64_t seed,
                                   TheoryParams* params_out = nullptr);

/// Worst relative error (scaled by max(1, |grad|)) between analytic and
/// central-difference gradients over sampled instantaneous functions.
double max_fd_gradient_error(const ProblemInstance& pi, int points_per_function,
                             std::uint64_t seed, int max_functions = 1000000);

/// Max running-sum drift after a burst of random table replacements.
double running_sum_drift(const ProblemInstance& pi, int updates,
                         std::uint64_t seed);

enum class ValidateLevel { quick, full };

/// Property suites behind `validate`; returns structured pass/fail results.
/// `corrupt_wtilde` injects an asymmetric fault into one mixing matrix so the
/// failure path stays exercised.
ValidationReport run_validation_suite(ValidateLevel level,
                                      bool corrupt_wtilde = false);

/// Human-readable constants report; when `trace_csv` is given, the fitted
/// empirical rate is printed alongside 1 - delta.
std::string theory_report(const ExperimentConfig& cfg,
                          const std::optional<std::string>& trace_csv);

std::vector<double> read_error_column(const std::string& csv_path);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace dsa

#endif  // DSA_EXPERIMENT_HPP
