#ifndef DSA_CONFIG_HPP
#define DSA_CONFIG_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dsa/graph.hpp"
#include "dsa/problem.hpp"
#include "dsa/schedule.hpp"

namespace dsa {

/// Flat "key = value" configuration with dotted section names
/// (problem.*, graph.*, run.*, algo.N.*, sweep.*). Lines starting with '#'
/// are comments. Unknown keys are rejected at resolution time so typos fail
/// loudly.
class KeyValueConfig {
 public:
  static KeyValueConfig parse_string(const std::string& text);
  static KeyValueConfig parse_file(const std::string& path);

  bool has(const std::string& key) const;
  std::string get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double_or(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key) const;
  std::int64_t get_int_or(const std::string& key, std::int64_t fallback) const;
  bool get_bool_or(const std::string& key, bool fallback) const;

  void set(const std::string& key, const std::string& value);
  std::vector<std::string> keys_with_prefix(const std::string& prefix) const;
  const std::map<std::string, std::string>& values() const { return values_; }

  /// Canonical serialization (sorted keys); parses back to an equal config.
  std::string to_string() const;

 private:
  std::map<std::string, std::string> values_;
};

struct ProblemSpec {
  std::string kind = "logistic";  // logistic | quadratic
  LogisticParams logistic;
  int quad_q_per_node = 2;
  int quad_dim = 1;
  std::uint64_t quad_seed = 1;
};

struct GraphSpec {
  GraphKind kind = GraphKind::random;
  int n_nodes = 20;
  double p_c = 0.3;
  double tau_factor = 2.0 / 3.0;
  std::uint64_t seed = 7;
};

struct AlgoSpec {
  std::string name;
  StepSchedule schedule = StepSchedule::constant(1e-2);
  /// Filename-safe label, e.g. "dgd_a0.01".
  std::string label() const;
};

struct SweepSpec {
  double threshold = 1e-6;
  std::int64_t max_iterations = 2000;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
};

struct ExperimentConfig {
  ProblemSpec problem;
  GraphSpec graph;
  std::vector<AlgoSpec> algos;
  std::int64_t iterations = 1000;
  std::uint64_t run_seed = 99;
  std::string x0_kind = "zeros";  // zeros | random (per-node normal draws)
  double x0_scale = 1.0;
  bool record_p = false;
  bool record_lyapunov = false;
  double lyapunov_c = 0.0;
  bool export_weights = false;
  std::string output_dir = "out";

  SweepSpec sweep;

  /// Validates ranges and algorithm names; throws ConfigError with a
  /// diagnostic on any problem.
  static ExperimentConfig resolve(const KeyValueConfig& kv);
  /// Canonical key-value form that resolves back to this config.
  KeyValueConfig to_kv() const;
};

}  // namespace dsa

#endif  // DSA_CONFIG_HPP
