#include "dsa/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "dsa/errors.hpp"
#include "dsa/solvers.hpp"

namespace dsa {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace

KeyValueConfig KeyValueConfig::parse_string(const std::string& text) {
  KeyValueConfig cfg;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) +
                        ": expected 'key = value', got: " + stripped);
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    cfg.values_[key] = value;
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str());
}

bool KeyValueConfig::has(const std::string& key) const {
  return values_.count(key) > 0;
}

std::string KeyValueConfig::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing config key: " + key);
  return it->second;
}

std::string KeyValueConfig::get_or(const std::string& key,
                                   const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double KeyValueConfig::get_double(const std::string& key) const {
  const std::string raw = get(key);
  try {
    std::size_t pos = 0;
    const double v = std::stod(raw, &pos);
    if (pos != raw.size()) throw std::invalid_argument(raw);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key " + key + " is not a number: " + raw);
  }
}

double KeyValueConfig::get_double_or(const std::string& key,
                                     double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

std::int64_t KeyValueConfig::get_int(const std::string& key) const {
  const std::string raw = get(key);
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(raw, &pos);
    if (pos != raw.size()) throw std::invalid_argument(raw);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key " + key + " is not an integer: " + raw);
  }
}

std::int64_t KeyValueConfig::get_int_or(const std::string& key,
                                        std::int64_t fallback) const {
  return has(key) ? get_int(key) : fallback;
}

bool KeyValueConfig::get_bool_or(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string raw = get(key);
  if (raw == "true" || raw == "1" || raw == "yes") return true;
  if (raw == "false" || raw == "0" || raw == "no") return false;
  throw ConfigError("key " + key + " is not a boolean: " + raw);
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
  values_[key] = value;
}

std::vector<std::string> KeyValueConfig::keys_with_prefix(
    const std::string& prefix) const {
  std::vector<std::string> out;
  for (const auto& [k, _] : values_)
    if (k.rfind(prefix, 0) == 0) out.push_back(k);
  return out;
}

std::string KeyValueConfig::to_string() const {
  std::ostringstream os;
  for (const auto& [k, v] : values_) os << k << " = " << v << "\n";
  return os.str();
}

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string AlgoSpec::label() const {
  char buf[96];
  if (schedule.is_constant()) {
    std::snprintf(buf, sizeof(buf), "%s_a%g", name.c_str(),
                  schedule.alpha0());
  } else {
    std::snprintf(buf, sizeof(buf), "%s_a%g_d%g", name.c_str(),
                  schedule.alpha0(), schedule.decay());
  }
  return buf;
}

ExperimentConfig ExperimentConfig::resolve(const KeyValueConfig& kv) {
  ExperimentConfig cfg;
  try {
    cfg.problem.kind = kv.get_or("problem.kind", "logistic");
    if (cfg.problem.kind == "logistic") {
      auto& lp = cfg.problem.logistic;
      lp.n_nodes = static_cast<int>(kv.get_int_or("graph.n_nodes", 20));
      lp.total_samples =
          static_cast<int>(kv.get_int_or("problem.total_samples", 500));
      lp.dim = static_cast<int>(kv.get_int_or("problem.dim", 2));
      lp.lambda = kv.get_double_or("problem.lambda", 1e-4);
      lp.mean = kv.get_double_or("problem.mean", 2.0);
      lp.std_plus = kv.get_double_or("problem.std_plus", 2.0);
      lp.std_minus = kv.get_double_or("problem.std_minus", 2.0);
      lp.seed = static_cast<std::uint64_t>(kv.get_int_or("problem.seed", 1));
      if (lp.total_samples < 1 || lp.dim < 1)
        throw ConfigError("problem.total_samples and problem.dim must be >= 1");
      if (lp.lambda < 0.0) throw ConfigError("problem.lambda must be >= 0");
      if (lp.total_samples % lp.n_nodes != 0)
        throw ConfigError("problem.total_samples must be divisible by "
                          "graph.n_nodes");
    } else if (cfg.problem.kind == "quadratic") {
      cfg.problem.quad_q_per_node =
          static_cast<int>(kv.get_int_or("problem.q_per_node", 2));
      cfg.problem.quad_dim = static_cast<int>(kv.get_int_or("problem.dim", 1));
      cfg.problem.quad_seed =
          static_cast<std::uint64_t>(kv.get_int_or("problem.seed", 1));
      if (cfg.problem.quad_q_per_node < 1 || cfg.problem.quad_dim < 1)
        throw ConfigError("quadratic problem parameters must be >= 1");
    } else {
      throw ConfigError("problem.kind must be logistic or quadratic");
    }

    cfg.graph.kind = graph_kind_from_string(kv.get_or("graph.kind", "random"));
    cfg.graph.n_nodes = static_cast<int>(kv.get_int_or("graph.n_nodes", 20));
    cfg.graph.p_c = kv.get_double_or("graph.p_c", 0.3);
    cfg.graph.tau_factor = kv.get_double_or("graph.tau_factor", 2.0 / 3.0);
    cfg.graph.seed = static_cast<std::uint64_t>(kv.get_int_or("graph.seed", 7));
    if (cfg.graph.n_nodes < 2) throw ConfigError("graph.n_nodes must be >= 2");
    if (cfg.graph.kind == GraphKind::random &&
        !(cfg.graph.p_c > 0.0 && cfg.graph.p_c <= 1.0))
      throw ConfigError("graph.p_c must be in (0, 1]");
    if (!(cfg.graph.tau_factor > 0.5))
      throw ConfigError("graph.tau_factor must exceed 0.5");

    cfg.iterations = kv.get_int_or("run.iterations", 1000);
    if (cfg.iterations < 0) throw ConfigError("run.iterations must be >= 0");
    cfg.run_seed = static_cast<std::uint64_t>(kv.get_int_or("run.seed", 99));
    cfg.x0_kind = kv.get_or("run.x0", "zeros");
    if (cfg.x0_kind != "zeros" && cfg.x0_kind != "random")
      throw ConfigError("run.x0 must be zeros or random");
    cfg.x0_scale = kv.get_double_or("run.x0_scale", 1.0);
    if (!(cfg.x0_scale > 0.0))
      throw ConfigError("run.x0_scale must be positive");
    cfg.record_p = kv.get_bool_or("run.record_p", false);
    cfg.record_lyapunov = kv.get_bool_or("run.record_lyapunov", false);
    cfg.lyapunov_c = kv.get_double_or("run.lyapunov_c", 0.0);
    cfg.export_weights = kv.get_bool_or("run.export_weights", false);
    cfg.output_dir = kv.get_or("run.output_dir", "out");

    // algo.<k>.name / algo.<k>.stepsize [/ algo.<k>.decay]
    std::set<int> slots;
    for (const auto& key : kv.keys_with_prefix("algo.")) {
      const auto rest = key.substr(5);
      const auto dot = rest.find('.');
      if (dot == std::string::npos)
        throw ConfigError("malformed algo key: " + key);
      try {
        slots.insert(std::stoi(rest.substr(0, dot)));
      } catch (const std::exception&) {
        throw ConfigError("malformed algo key: " + key);
      }
    }
    for (int slot : slots) {
      const std::string prefix = "algo." + std::to_string(slot) + ".";
      AlgoSpec spec;
      spec.name = kv.get(prefix + "name");
      algorithm_from_string(spec.name);  // validates
      const double alpha = kv.get_double_or(prefix + "stepsize", 1e-2);
      if (!(alpha > 0.0))
        throw ConfigError(prefix + "stepsize must be positive");
      if (kv.has(prefix + "decay"))
        spec.schedule = StepSchedule::diminishing(
            alpha, kv.get_double(prefix + "decay"));
      else
        spec.schedule = StepSchedule::constant(alpha);
      cfg.algos.push_back(std::move(spec));
    }

    cfg.sweep.threshold = kv.get_double_or("sweep.threshold", 1e-6);
    if (!(cfg.sweep.threshold > 0.0) || !std::isfinite(cfg.sweep.threshold))
      throw ConfigError("sweep.threshold must be finite and positive");
    cfg.sweep.max_iterations = kv.get_int_or("sweep.max_iterations", 2000);
    if (cfg.sweep.max_iterations < 1)
      throw ConfigError("sweep.max_iterations must be >= 1");
    if (kv.has("sweep.seeds")) {
      cfg.sweep.seeds.clear();
      std::istringstream is(kv.get("sweep.seeds"));
      std::string tok;
      while (std::getline(is, tok, ',')) {
        tok = trim(tok);
        if (tok.empty()) continue;
        try {
          cfg.sweep.seeds.push_back(std::stoull(tok));
        } catch (const std::exception&) {
          throw ConfigError("sweep.seeds must be a comma-separated list");
        }
      }
      if (cfg.sweep.seeds.empty())
        throw ConfigError("sweep.seeds must name at least one seed");
    }
  } catch (const InvalidParam& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

KeyValueConfig ExperimentConfig::to_kv() const {
  KeyValueConfig kv;
  kv.set("problem.kind", problem.kind);
  if (problem.kind == "logistic") {
    kv.set("problem.total_samples",
           std::to_string(problem.logistic.total_samples));
    kv.set("problem.dim", std::to_string(problem.logistic.dim));
    kv.set("problem.lambda", format_double(problem.logistic.lambda));
    kv.set("problem.mean", format_double(problem.logistic.mean));
    kv.set("problem.std_plus", format_double(problem.logistic.std_plus));
    kv.set("problem.std_minus", format_double(problem.logistic.std_minus));
    kv.set("problem.seed", std::to_string(problem.logistic.seed));
  } else {
    kv.set("problem.q_per_node", std::to_string(problem.quad_q_per_node));
    kv.set("problem.dim", std::to_string(problem.quad_dim));
    kv.set("problem.seed", std::to_string(problem.quad_seed));
  }
  kv.set("graph.kind", to_string(graph.kind));
  kv.set("graph.n_nodes", std::to_string(graph.n_nodes));
  kv.set("graph.p_c", format_double(graph.p_c));
  kv.set("graph.tau_factor", format_double(graph.tau_factor));
  kv.set("graph.seed", std::to_string(graph.seed));
  kv.set("run.iterations", std::to_string(iterations));
  kv.set("run.seed", std::to_string(run_seed));
  kv.set("run.x0", x0_kind);
  kv.set("run.x0_scale", format_double(x0_scale));
  kv.set("run.record_p", record_p ? "true" : "false");
  kv.set("run.record_lyapunov", record_lyapunov ? "true" : "false");
  kv.set("run.lyapunov_c", format_double(lyapunov_c));
  kv.set("run.export_weights", export_weights ? "true" : "false");
  kv.set("run.output_dir", output_dir);
  for (std::size_t k = 0; k < algos.size(); ++k) {
    const std::string prefix = "algo." + std::to_string(k + 1) + ".";
    kv.set(prefix + "name", algos[k].name);
    kv.set(prefix + "stepsize", format_double(algos[k].schedule.alpha0()));
    if (!algos[k].schedule.is_constant())
      kv.set(prefix + "decay", format_double(algos[k].schedule.decay()));
  }
  kv.set("sweep.threshold", format_double(sweep.threshold));
  kv.set("sweep.max_iterations", std::to_string(sweep.max_iterations));
  std::string seeds;
  for (std::size_t i = 0; i < sweep.seeds.size(); ++i)
    seeds += (i ? "," : "") + std::to_string(sweep.seeds[i]);
  kv.set("sweep.seeds", seeds);
  return kv;
}

}  // namespace dsa
