#include "dsa/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "dsa/errors.hpp"
#include "dsa/rng.hpp"
#include "dsa/version.hpp"

namespace dsa {

namespace fs = std::filesystem;

std::shared_ptr<ProblemInstance> build_problem(
    const ProblemSpec& spec, int n_nodes,
    std::optional<LogisticDataset>* dataset_out) {
  if (spec.kind == "logistic") {
    LogisticParams params = spec.logistic;
    params.n_nodes = n_nodes;
    auto [dataset, problem] = generate_logistic(params);
    if (dataset_out) *dataset_out = std::move(dataset);
    return problem;
  }
  if (spec.kind == "quadratic") {
    if (dataset_out) dataset_out->reset();
    return generate_quadratic(n_nodes, spec.quad_q_per_node, spec.quad_dim,
                              spec.quad_seed);
  }
  throw ConfigError("unknown problem kind: " + spec.kind);
}

StackedVector make_initial_iterate(const std::string& kind, double scale,
                                   int n_nodes, int dim, std::uint64_t seed) {
  if (kind == "zeros") return StackedVector::Zero(n_nodes, dim);
  if (kind != "random") throw ConfigError("unknown initial iterate: " + kind);
  std::mt19937_64 rng(mix64(seed ^ 0xF00DULL));
  std::normal_distribution<double> normal(0.0, scale);
  StackedVector x0(n_nodes, dim);
  for (int n = 0; n < n_nodes; ++n)
    for (int j = 0; j < dim; ++j) x0(n, j) = normal(rng);
  return x0;
}

BuiltExperiment build_experiment(const ExperimentConfig& cfg) {
  std::optional<LogisticDataset> dataset;
  auto problem = build_problem(cfg.problem, cfg.graph.n_nodes, &dataset);
  Graph graph = generate_graph(cfg.graph.kind, cfg.graph.n_nodes,
                               cfg.graph.seed, cfg.graph.p_c);
  WeightPair weights = build_weight_pair(graph, cfg.graph.tau_factor);
  ReferenceSolution reference = solve_reference(*problem);
  return BuiltExperiment{std::move(problem), std::move(dataset),
                         std::move(graph), std::move(weights),
                         std::move(reference)};
}

std::vector<RunOutput> run_all(const ExperimentConfig& cfg,
                               const BuiltExperiment& built) {
  std::vector<RunOutput> outputs;
  for (const auto& algo : cfg.algos) {
    const Algorithm alg = algorithm_from_string(algo.name);
    RunOptions options;
    options.x_star = built.reference.x_star_single;
    options.x0 = make_initial_iterate(cfg.x0_kind, cfg.x0_scale,
                                      built.problem->n_nodes(),
                                      built.problem->dim(), cfg.run_seed);

    auto bregman = std::make_shared<BregmanReference>(
        *built.problem, built.reference.x_star_single);
    if (cfg.record_p && uses_gradient_table(alg))
      options.p_hook = [bregman](const SolverState& s) {
        return bregman->p_sequence(s.table);
      };
    if (cfg.record_lyapunov) {
      auto ref = std::make_shared<ReferenceSolution>(built.reference);
      attach_dual_optimum(*ref, built.weights, algo.schedule.alpha0());
      const Matrix w_tilde = built.weights.w_tilde();
      const double c = cfg.lyapunov_c;
      options.track_dual = !is_saddle_form(alg);
      options.lyapunov_hook = [ref, w_tilde, c, bregman](const SolverState& s) {
        if (!s.v) throw MissingDual("lyapunov hook needs a dual iterate");
        double value = weighted_norm_sq(s.x - ref->x_star_stacked, w_tilde) +
                       (*s.v - *ref->v_star).squaredNorm();
        if (c != 0.0 && s.table.initialized())
          value += c * bregman->p_sequence(s.table);
        return value;
      };
    }

    const auto start = std::chrono::steady_clock::now();
    RunRecord record = run(alg, *built.problem, built.weights, algo.schedule,
                           cfg.iterations, cfg.run_seed, options);
    const auto stop = std::chrono::steady_clock::now();
    const double ms =
        std::chrono::duration<double, std::milli>(stop - start).count();
    outputs.push_back({algo, std::move(record), ms});
  }
  return outputs;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);  // LF endings everywhere
  if (!out) throw Error("cannot write file: " + path);
  out << content;
}

namespace {

void write_manifest(const std::string& dir, const std::string& command,
                    const ExperimentConfig& cfg,
                    const std::vector<std::string>& outputs,
                    const std::vector<std::pair<std::string, double>>& timings,
                    RunArtifacts* artifacts) {
  nlohmann::json manifest;
  manifest["version"] = kVersion;
  manifest["command"] = command;
  manifest["config_text"] = cfg.to_kv().to_string();
  manifest["outputs"] = outputs;
  nlohmann::json times = nlohmann::json::object();
  for (const auto& [label, ms] : timings) times[label] = ms;
  manifest["wall_clock_ms"] = times;

  artifacts->manifest_path = (fs::path(dir) / "manifest.json").string();
  write_text_file(artifacts->manifest_path, manifest.dump(2) + "\n");
  artifacts->resolved_config_path =
      (fs::path(dir) / "resolved_config.cfg").string();
  write_text_file(artifacts->resolved_config_path, cfg.to_kv().to_string());
}

}  // namespace

RunArtifacts execute_run(const ExperimentConfig& cfg) {
  BuiltExperiment built = build_experiment(cfg);
  std::vector<RunOutput> outputs = run_all(cfg, built);

  fs::create_directories(cfg.output_dir);
  RunArtifacts artifacts;
  std::vector<std::string> names;
  std::vector<std::pair<std::string, double>> timings;
  for (const auto& out : outputs) {
    const std::string name = out.algo.label() + ".csv";
    const std::string path = (fs::path(cfg.output_dir) / name).string();
    write_text_file(path, out.record.to_csv());
    artifacts.csv_paths.push_back(path);
    names.push_back(name);
    timings.emplace_back(out.algo.label(), out.wall_ms);
  }
  if (cfg.export_weights) {
    write_text_file((fs::path(cfg.output_dir) / "w.csv").string(),
                    built.weights.to_csv(false));
    write_text_file((fs::path(cfg.output_dir) / "w_tilde.csv").string(),
                    built.weights.to_csv(true));
    write_text_file((fs::path(cfg.output_dir) / "graph_edges.txt").string(),
                    built.graph.to_edge_list());
  }
  if (built.dataset)
    write_text_file((fs::path(cfg.output_dir) / "dataset.csv").string(),
                    built.dataset->to_csv());
  write_manifest(cfg.output_dir, "run", cfg, names, timings, &artifacts);
  return artifacts;
}

std::int64_t first_hit_iteration(const RunRecord& record, double threshold) {
  for (const auto& row : record.rows)
    if (row.error <= threshold) return row.iteration;
  return -1;
}

std::vector<SweepResult> topology_sweep(const ExperimentConfig& cfg) {
  struct Topo {
    GraphKind kind;
    double p_c;
  };
  const std::vector<Topo> topologies = {
      {GraphKind::complete, 0.0}, {GraphKind::random, 0.3},
      {GraphKind::random, 0.2},   {GraphKind::cycle, 0.0},
      {GraphKind::line, 0.0},     {GraphKind::star, 0.0}};

  AlgoSpec algo;
  if (!cfg.algos.empty()) {
    algo = cfg.algos.front();
  } else {
    algo.name = "dsa";
    algo.schedule = StepSchedule::constant(5e-3);
  }
  const Algorithm alg = algorithm_from_string(algo.name);

  std::vector<SweepResult> results;
  for (std::uint64_t seed : cfg.sweep.seeds) {
    ProblemSpec pspec = cfg.problem;
    if (pspec.kind == "logistic") pspec.logistic.seed = seed;
    else pspec.quad_seed = seed;
    auto problem = build_problem(pspec, cfg.graph.n_nodes);
    const ReferenceSolution reference = solve_reference(*problem);
    // one shared initial iterate per seed keeps the topology comparison fair
    const StackedVector x0 =
        make_initial_iterate(cfg.x0_kind, cfg.x0_scale, problem->n_nodes(),
                             problem->dim(), seed);

    for (std::size_t k = 0; k < topologies.size(); ++k) {
      const auto& topo = topologies[k];
      const std::uint64_t graph_seed = mix64(seed ^ mix64(1000 + k));
      Graph graph = generate_graph(topo.kind, cfg.graph.n_nodes, graph_seed,
                                   topo.p_c);
      WeightPair weights = build_weight_pair(graph, cfg.graph.tau_factor);

      RunOptions options;
      options.x_star = reference.x_star_single;
      options.x0 = x0;
      RunRecord record =
          run(alg, *problem, weights, algo.schedule, cfg.sweep.max_iterations,
              mix64(seed ^ 0x5EEDBA5EULL), options);

      SweepResult r;
      if (topo.kind == GraphKind::random) {
        char label[32];
        std::snprintf(label, sizeof(label), "random_p%g", topo.p_c);
        r.topology = label;
      } else {
        r.topology = to_string(topo.kind);
      }
      r.p_c = topo.p_c;
      r.seed = seed;
      r.hit_iteration = first_hit_iteration(record, cfg.sweep.threshold);
      r.final_error = record.rows.back().error;
      results.push_back(std::move(r));
    }
  }
  return results;
}

std::string sweep_to_csv(const std::vector<SweepResult>& results) {
  std::ostringstream os;
  os << "topology,p_c,seed,hit_iteration,final_error\n";
  char buf[32];
  for (const auto& r : results) {
    os << r.topology << ",";
    std::snprintf(buf, sizeof(buf), "%g", r.p_c);
    os << buf << "," << r.seed << ",";
    if (r.hit_iteration >= 0)
      os << r.hit_iteration;
    else
      os << "not_reached";
    std::snprintf(buf, sizeof(buf), "%.17g", r.final_error);
    os << "," << buf << "\n";
  }
  return os.str();
}

RunArtifacts execute_topology_sweep(const ExperimentConfig& cfg) {
  const auto results = topology_sweep(cfg);
  fs::create_directories(cfg.output_dir);
  RunArtifacts artifacts;
  const std::string path =
      (fs::path(cfg.output_dir) / "topology_sweep.csv").string();
  write_text_file(path, sweep_to_csv(results));
  artifacts.csv_paths.push_back(path);
  write_manifest(cfg.output_dir, "topology-sweep", cfg,
                 {"topology_sweep.csv"}, {}, &artifacts);
  return artifacts;
}

// ---------------------------------------------------------------------------
// diagnostics

double max_unbiasedness_deviation(const ProblemInstance& pi,
                                  const WeightPair& wp, int n_states,
                                  std::uint64_t seed) {
  const StepSchedule schedule = StepSchedule::constant(
      0.5 * wp.spectral().gamma / std::max(1.0, pi.lip()));
  std::mt19937_64 rng(mix64(seed));
  std::normal_distribution<double> normal(0.0, 1.0);
  double worst = 0.0;
  for (int s = 0; s < n_states; ++s) {
    SolverState state;
    StackedVector x0(pi.n_nodes(), pi.dim());
    for (int n = 0; n < x0.rows(); ++n)
      for (int j = 0; j < x0.cols(); ++j) x0(n, j) = normal(rng);
    state.x = x0;
    state.stream = IndexStream(mix64(seed ^ (s + 1)));
    state.table.initialize(pi, x0);
    const int steps = static_cast<int>(mix64(seed + 7 * s) % 20);
    for (int t = 0; t < steps; ++t) dsa_step(state, pi, wp, schedule);

    for (int n = 0; n < pi.n_nodes(); ++n) {
      const Vector x_n = state.x.row(n).transpose();
      Vector mean = Vector::Zero(pi.dim());
      for (int i = 0; i < pi.q(n); ++i)
        mean += pi.grad(n, i, x_n) - state.table.stored_grad(n, i) +
                state.table.running_sum(n) / pi.q(n);
      mean /= pi.q(n);
      const double dev =
          (mean - pi.local_grad(n, x_n)).cwiseAbs().maxCoeff();
      worst = std::max(worst, dev);
    }
  }
  return worst;
}

double max_trajectory_deviation(Algorithm a, Algorithm b,
                                const ProblemInstance& pi,
                                const WeightPair& wp,
                                const StepSchedule& schedule,
                                std::int64_t iterations, std::uint64_t seed,
                                const Vector& x_star) {
  std::vector<StackedVector> traj_a;
  RunOptions opt_a;
  opt_a.x_star = x_star;
  opt_a.on_iterate = [&traj_a](std::int64_t, const SolverState& s) {
    traj_a.push_back(s.x);
  };
  run(a, pi, wp, schedule, iterations, seed, opt_a);

  double worst = 0.0;
  std::size_t t = 0;
  RunOptions opt_b;
  opt_b.x_star = x_star;
  opt_b.on_iterate = [&](std::int64_t, const SolverState& s) {
    worst = std::max(worst, (s.x - traj_a.at(t)).norm());
    ++t;
  };
  run(b, pi, wp, schedule, iterations, seed, opt_b);
  return worst;
}

double min_expectation_bound_slack(const ProblemInstance& pi,
                                   const WeightPair& wp, int n_states,
                                   std::uint64_t seed,
                                   TheoryParams* params_out) {
  const TheoryInputs inputs = TheoryInputs::from(pi, wp);
  const TheoryParams params = corollary_params(inputs);
  if (params_out) *params_out = params;

  ReferenceSolution ref = solve_reference(pi);
  attach_dual_optimum(ref, wp, params.alpha);
  const StepSchedule schedule = StepSchedule::constant(params.alpha);

  double min_slack = std::numeric_limits<double>::infinity();
  for (int s = 0; s < n_states; ++s) {
    const int steps = static_cast<int>(mix64(seed + 31 * s) % 30);
    const SaddleSnapshot snap =
        random_reachable_state(pi, wp, schedule, steps, mix64(seed ^ (s + 1)));
    const BoundReport report =
        check_expectation_bounds(pi, wp, ref, params, snap);
    min_slack = std::min(min_slack, report.min_slack());
  }
  return min_slack;
}

double max_fd_gradient_error(const ProblemInstance& pi,
                             int points_per_function, std::uint64_t seed,
                             int max_functions) {
  std::mt19937_64 rng(mix64(seed));
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const double h = 1e-5;
  double worst = 0.0;
  int used = 0;
  for (int n = 0; n < pi.n_nodes() && used < max_functions; ++n) {
    for (int i = 0; i < pi.q(n) && used < max_functions; ++i, ++used) {
      for (int k = 0; k < points_per_function; ++k) {
        Vector x(pi.dim());
        for (int j = 0; j < pi.dim(); ++j) x[j] = 10.0 * unif(rng);
        const Vector g = pi.grad(n, i, x);
        Vector fd(pi.dim());
        for (int j = 0; j < pi.dim(); ++j) {
          Vector xp = x, xm = x;
          xp[j] += h;
          xm[j] -= h;
          fd[j] = (pi.eval(n, i, xp) - pi.eval(n, i, xm)) / (2.0 * h);
        }
        const double rel =
            (fd - g).norm() / std::max(1.0, g.norm());
        worst = std::max(worst, rel);
      }
    }
  }
  return worst;
}

double running_sum_drift(const ProblemInstance& pi, int updates,
                         std::uint64_t seed) {
  std::mt19937_64 rng(mix64(seed));
  std::normal_distribution<double> normal(0.0, 1.0);
  GradientTable table;
  table.initialize(pi, StackedVector::Zero(pi.n_nodes(), pi.dim()));
  std::uniform_int_distribution<int> node_pick(0, pi.n_nodes() - 1);
  for (int k = 0; k < updates; ++k) {
    const int n = node_pick(rng);
    std::uniform_int_distribution<int> idx_pick(0, pi.q(n) - 1);
    const int i = idx_pick(rng);
    Vector point(pi.dim());
    for (int j = 0; j < pi.dim(); ++j) point[j] = normal(rng);
    table.replace(n, i, point, pi.grad(n, i, point));
  }
  double worst = 0.0;
  for (int n = 0; n < pi.n_nodes(); ++n)
    worst = std::max(worst, (table.running_sum(n) - table.recompute_sum(n))
                                .cwiseAbs()
                                .maxCoeff());
  return worst;
}

ValidationReport run_validation_suite(ValidateLevel level,
                                      bool corrupt_wtilde) {
  ValidationReport report;
  auto add = [&](const std::string& name, double residual, bool pass) {
    report.checks.push_back({name, pass, residual});
  };

  const bool full = level == ValidateLevel::full;
  const double tol = 1e-9;

  // mixing-matrix admissibility across topologies
  std::vector<int> sizes = full ? std::vector<int>{5, 20, 100}
                                : std::vector<int>{5, 20};
  const GraphKind kinds[] = {GraphKind::complete, GraphKind::random,
                             GraphKind::cycle, GraphKind::line,
                             GraphKind::star};
  bool corrupted_once = !corrupt_wtilde;
  for (int n : sizes) {
    for (GraphKind kind : kinds) {
      const Graph g = generate_graph(kind, n, 11, 0.3);
      const WeightPair wp = build_weight_pair(g);
      Matrix wt = wp.w_tilde();
      if (!corrupted_once) {
        wt(0, 1) += 1e-3;  // asymmetric fault, must be caught
        corrupted_once = true;
      }
      const ValidationReport sub = validate_assumption1(wp.w(), wt, tol);
      // summarize with the near-zero residuals (symmetry and 1-vector
      // conditions); the spectral conditions report eigenvalues, not errors
      double worst = 0.0;
      for (const auto& c : sub.checks)
        if (c.name.find("symmetric") != std::string::npos ||
            c.name.rfind("ones_in_null", 0) == 0)
          worst = std::max(worst, c.residual);
      const std::string name = std::string("mixing_admissibility_") +
                               to_string(kind) + "_n" + std::to_string(n);
      if (sub.all_pass()) {
        add(name, worst, true);
      } else {
        add(name + "_failed[" + sub.failures() + "]", worst, false);
      }
    }
  }

  {
    auto quad = generate_quadratic(3, 3, 2, 5);
    const Graph g = generate_graph(GraphKind::complete, 3, 1);
    const WeightPair wp = build_weight_pair(g);
    const double dev =
        max_unbiasedness_deviation(*quad, wp, full ? 100 : 10, 21);
    add("averaging_gradient_unbiased", dev, dev <= 1e-12);
  }

  {
    LogisticParams params;
    params.n_nodes = 5;
    params.total_samples = 25;
    params.dim = 2;
    params.seed = 3;
    auto [dataset, problem] = generate_logistic(params);
    const Graph g = generate_graph(GraphKind::random, 5, 13, 0.6);
    const WeightPair wp = build_weight_pair(g);
    const ReferenceSolution ref = solve_reference(*problem);
    const double dev = max_trajectory_deviation(
        Algorithm::dsa, Algorithm::dsa_saddle, *problem, wp,
        StepSchedule::constant(5e-3), full ? 200 : 60, 9,
        ref.x_star_single);
    add("recursion_saddle_equivalence", dev, dev <= 1e-9);
  }

  {
    auto quad = generate_quadratic(2, 2, 1, 17);
    const Graph g = generate_graph(GraphKind::line, 2, 1);
    const WeightPair wp = build_weight_pair(g);
    TheoryParams params;
    const double slack = min_expectation_bound_slack(*quad, wp, full ? 50 : 10,
                                                     33, &params);
    add("expectation_bounds_slack", slack, slack >= -1e-9);
    add("contraction_constant_in_range", params.delta,
        params.delta > 0.0 && params.delta <= 0.5);
  }

  {
    LogisticParams params;
    params.n_nodes = 4;
    params.total_samples = 20;
    params.dim = 3;
    params.seed = 29;
    auto [dataset, problem] = generate_logistic(params);
    const double err = max_fd_gradient_error(*problem, full ? 10 : 3, 41);
    add("logistic_gradient_fd", err, err < 1e-6);
    auto quad = generate_quadratic(3, 2, 3, 43);
    const double err_q = max_fd_gradient_error(*quad, full ? 10 : 3, 47);
    add("quadratic_gradient_fd", err_q, err_q < 1e-6);
  }

  {
    auto quad = generate_quadratic(4, 25, 2, 51);
    const double drift = running_sum_drift(*quad, 1000, 53);
    add("running_sum_integrity", drift, drift <= 1e-9);
  }

  return report;
}

std::vector<double> read_error_column(const std::string& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw Error("cannot open trace: " + csv_path);
  std::string header;
  if (!std::getline(in, header)) throw Error("empty trace: " + csv_path);
  int column = -1, k = 0;
  std::istringstream hs(header);
  std::string cell;
  while (std::getline(hs, cell, ',')) {
    if (cell == "error_e_t") column = k;
    ++k;
  }
  if (column < 0) throw Error("trace has no error_e_t column");
  std::vector<double> errors;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    int j = 0;
    while (std::getline(ls, cell, ',')) {
      if (j == column) errors.push_back(std::stod(cell));
      ++j;
    }
  }
  return errors;
}

std::string theory_report(const ExperimentConfig& cfg,
                          const std::optional<std::string>& trace_csv) {
  BuiltExperiment built = build_experiment(cfg);
  const TheoryInputs inputs = TheoryInputs::from(*built.problem, built.weights);
  const TheoryParams params = corollary_params(inputs);
  const double kappa_f = function_condition_number(*built.problem);
  const double kappa_g = graph_condition_number(built.weights.spectral());
  const SimplifiedDelta simple =
      simplified_delta(kappa_f, kappa_g, inputs.q_max);

  std::ostringstream os;
  char buf[128];
  auto line = [&](const char* name, double value) {
    std::snprintf(buf, sizeof(buf), "  %-24s %.12g\n", name, value);
    os << buf;
  };
  os << "objective\n";
  line("mu", inputs.mu);
  line("L", inputs.lip);
  line("kappa_f", kappa_f);
  os << "graph\n";
  line("gamma", inputs.gamma);
  line("Gamma", inputs.gamma_cap);
  line("gamma_prime", inputs.gamma_prime);
  line("Gamma_prime", inputs.gamma_cap_prime);
  line("kappa_g", kappa_g);
  os << "closed-form parameters\n";
  line("eta", params.eta);
  line("alpha", params.alpha);
  line("c", params.c);
  line("delta", params.delta);
  os << "  (eta lower bound: statement form " << params.eta_lower_statement
     << ", alternate form " << params.eta_lower_alternate << ")\n";
  os << "simplified delta regimes (gamma/gamma' = 1)\n";
  line("graph_term", simple.graph_term);
  line("sample_term", simple.sample_term);
  line("function_term", simple.function_term);
  line("delta_simplified", simple.value());
  const char* regime =
      simple.graph_term <= simple.sample_term
          ? (simple.graph_term <= simple.function_term ? "graph" : "function")
          : (simple.sample_term <= simple.function_term ? "sample"
                                                        : "function");
  os << "  dominant regime: " << regime << "\n";

  // per-bound slacks by exact enumeration, when the joint index space is
  // small enough to enumerate
  std::int64_t joint = 1;
  for (int n = 0; n < built.problem->n_nodes() && joint <= 4096; ++n)
    joint *= built.problem->q(n);
  if (joint <= 4096) {
    ReferenceSolution ref = built.reference;
    attach_dual_optimum(ref, built.weights, params.alpha);
    const StepSchedule sched = StepSchedule::constant(params.alpha);
    BoundReport worst;
    worst.slack_gradient_noise = worst.slack_gap_decrement =
        worst.slack_table_decrement = worst.slack_contraction =
            worst.slack_dual_distance = std::numeric_limits<double>::infinity();
    for (int s = 0; s < 10; ++s) {
      const SaddleSnapshot snap = random_reachable_state(
          *built.problem, built.weights, sched, 2 * s, 1000 + s);
      const BoundReport r = check_expectation_bounds(
          *built.problem, built.weights, ref, params, snap);
      worst.slack_gradient_noise =
          std::min(worst.slack_gradient_noise, r.slack_gradient_noise);
      worst.slack_gap_decrement =
          std::min(worst.slack_gap_decrement, r.slack_gap_decrement);
      worst.slack_table_decrement =
          std::min(worst.slack_table_decrement, r.slack_table_decrement);
      worst.slack_contraction =
          std::min(worst.slack_contraction, r.slack_contraction);
      worst.slack_dual_distance =
          std::min(worst.slack_dual_distance, r.slack_dual_distance);
    }
    os << "expectation-bound slacks (min over 10 reachable states)\n";
    line("gradient_noise", worst.slack_gradient_noise);
    line("gap_decrement", worst.slack_gap_decrement);
    line("table_decrement", worst.slack_table_decrement);
    line("contraction", worst.slack_contraction);
    line("dual_distance", worst.slack_dual_distance);
  } else {
    os << "  (joint index space too large for exact enumeration; bound "
          "slacks are covered by `validate`)\n";
  }

  if (trace_csv) {
    const std::vector<double> errors = read_error_column(*trace_csv);
    const auto [begin, end] = decay_window(errors);
    const RateFit fit = fit_linear_rate(errors, begin, end);
    os << "empirical trace\n";
    line("fitted_rate", fit.rate);
    line("r_squared", fit.r_squared);
    line("one_minus_delta", 1.0 - params.delta);
    os << "  (the contraction bound holds in expectation; single runs may "
          "fit faster or slower)\n";
  }
  return os.str();
}

}  // namespace dsa
