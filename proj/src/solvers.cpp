#include "dsa/solvers.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "dsa/errors.hpp"

namespace dsa {

const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::dgd: return "dgd";
    case Algorithm::extra: return "extra";
    case Algorithm::stochastic_extra: return "stochastic_extra";
    case Algorithm::dec_saga: return "dec_saga";
    case Algorithm::dsa: return "dsa";
    case Algorithm::dsa_saddle: return "dsa_saddle";
  }
  return "?";
}

Algorithm algorithm_from_string(const std::string& name) {
  if (name == "dgd") return Algorithm::dgd;
  if (name == "extra") return Algorithm::extra;
  if (name == "stochastic_extra") return Algorithm::stochastic_extra;
  if (name == "dec_saga") return Algorithm::dec_saga;
  if (name == "dsa") return Algorithm::dsa;
  if (name == "dsa_saddle") return Algorithm::dsa_saddle;
  throw InvalidParam("unknown algorithm: " + name);
}

bool uses_gradient_table(Algorithm a) {
  return a == Algorithm::dsa || a == Algorithm::dsa_saddle ||
         a == Algorithm::dec_saga;
}

bool is_saddle_form(Algorithm a) { return a == Algorithm::dsa_saddle; }

std::string StepSchedule::describe() const {
  char buf[64];
  if (is_constant()) {
    std::snprintf(buf, sizeof(buf), "alpha=%g", alpha0_);
  } else {
    std::snprintf(buf, sizeof(buf), "alpha0=%g,decay=%g", alpha0_, decay_);
  }
  return buf;
}

Vector stochastic_averaging_gradient(const ProblemInstance& pi,
                                     GradientTable& table, int node, int i,
                                     const Vector& x_node) {
  if (!table.initialized())
    throw TableUninitialized("gradient table not initialized");
  const Vector fresh = pi.grad(node, i, x_node);
  Vector ghat =
      fresh - table.stored_grad(node, i) + table.running_sum(node) / pi.q(node);
  table.replace(node, i, x_node, fresh);
  return ghat;
}

namespace {

void check_dims(const SolverState& s, const ProblemInstance& pi,
                const WeightPair& wp) {
  check_stacked_dims(s.x, pi.n_nodes(), pi.dim());
  if (wp.n_nodes() != pi.n_nodes())
    throw DimensionMismatch("weight pair size does not match problem");
}

// Draws one index per node and assembles the averaging-gradient stack for
// the current iterate, mutating the table. Exactly N evaluations.
StackedVector averaging_gradient_stack(SolverState& s,
                                       const ProblemInstance& pi) {
  StackedVector ghat(pi.n_nodes(), pi.dim());
  for (int n = 0; n < pi.n_nodes(); ++n) {
    const int i = s.stream.draw(n, s.t, pi.q(n));
    ghat.row(n) =
        stochastic_averaging_gradient(pi, s.table, n, i, s.x.row(n).transpose())
            .transpose();
  }
  s.counters.grad_evals += pi.n_nodes();
  return ghat;
}

StackedVector plain_stochastic_gradient(SolverState& s,
                                        const ProblemInstance& pi) {
  StackedVector g(pi.n_nodes(), pi.dim());
  for (int n = 0; n < pi.n_nodes(); ++n) {
    const int i = s.stream.draw(n, s.t, pi.q(n));
    g.row(n) = pi.grad(n, i, s.x.row(n).transpose()).transpose();
  }
  s.counters.grad_evals += pi.n_nodes();
  return g;
}

void advance(SolverState& s, StackedVector x_next) {
  s.x_prev = std::move(s.x);
  s.x = std::move(x_next);
  s.t += 1;
  s.counters.comms += 1;
}

}  // namespace

void dgd_step(SolverState& s, const ProblemInstance& pi, const WeightPair& wp,
              const StepSchedule& schedule) {
  check_dims(s, pi, wp);
  const double alpha = schedule.at(s.t);
  StackedVector g = aggregate_gradient(pi, s.x);
  s.counters.grad_evals += pi.total_samples();
  advance(s, wp.w() * s.x - alpha * g);
}

void extra_step(SolverState& s, const ProblemInstance& pi,
                const WeightPair& wp, const StepSchedule& schedule) {
  check_dims(s, pi, wp);
  const double alpha = schedule.at(s.t);
  StackedVector g = aggregate_gradient(pi, s.x);
  s.counters.grad_evals += pi.total_samples();
  if (s.t == 0) {
    StackedVector x_next = wp.w() * s.x - alpha * g;
    s.full_grad_prev = std::move(g);
    advance(s, std::move(x_next));
    return;
  }
  if (s.x_prev.size() == 0 || s.full_grad_prev.size() == 0)
    throw MissingHistory("extra step at t >= 1 needs the previous iterate");
  StackedVector x_next = s.x + wp.w() * s.x - wp.w_tilde() * s.x_prev -
                         alpha * (g - s.full_grad_prev);
  s.full_grad_prev = std::move(g);
  advance(s, std::move(x_next));
}

void stochastic_extra_step(SolverState& s, const ProblemInstance& pi,
                           const WeightPair& wp, const StepSchedule& schedule) {
  check_dims(s, pi, wp);
  const double alpha = schedule.at(s.t);
  StackedVector g = plain_stochastic_gradient(s, pi);
  if (s.t == 0) {
    StackedVector x_next = wp.w() * s.x - alpha * g;
    s.sgrad_prev = std::move(g);
    advance(s, std::move(x_next));
    return;
  }
  if (s.x_prev.size() == 0 || s.sgrad_prev.size() == 0)
    throw MissingHistory("stochastic extra step at t >= 1 needs history");
  StackedVector x_next =
      s.x + wp.w() * s.x - wp.w_tilde() * s.x_prev - alpha * (g - s.sgrad_prev);
  s.sgrad_prev = std::move(g);
  advance(s, std::move(x_next));
}

void dec_saga_step(SolverState& s, const ProblemInstance& pi,
                   const WeightPair& wp, const StepSchedule& schedule) {
  check_dims(s, pi, wp);
  const double alpha = schedule.at(s.t);
  StackedVector ghat = averaging_gradient_stack(s, pi);
  advance(s, wp.w() * s.x - alpha * ghat);
}

void dsa_step(SolverState& s, const ProblemInstance& pi, const WeightPair& wp,
              const StepSchedule& schedule) {
  check_dims(s, pi, wp);
  const double alpha = schedule.at(s.t);
  StackedVector ghat = averaging_gradient_stack(s, pi);
  if (s.t == 0) {
    StackedVector x_next = wp.w() * s.x - alpha * ghat;
    s.ghat_prev = std::move(ghat);
    advance(s, std::move(x_next));
    return;
  }
  if (s.x_prev.size() == 0 || s.ghat_prev.size() == 0)
    throw MissingHistory("dsa step at t >= 1 needs the previous iterate and "
                         "stored averaging gradient");
  // ghat^{t-1} comes from state; recomputing it is impossible since the
  // table has mutated.
  StackedVector x_next = s.x + wp.w() * s.x - wp.w_tilde() * s.x_prev -
                         alpha * (ghat - s.ghat_prev);
  s.ghat_prev = std::move(ghat);
  advance(s, std::move(x_next));
}

void dsa_saddle_step(SolverState& s, const ProblemInstance& pi,
                     const WeightPair& wp, const StepSchedule& schedule) {
  check_dims(s, pi, wp);
  if (!s.v) throw MissingDual("saddle step needs v (initialize v^0 = U x^0)");
  const double alpha = schedule.at(s.t);
  StackedVector ghat = averaging_gradient_stack(s, pi);
  // x^{t+1} = x^t - alpha ghat - (I - W~) x^t - U v^t
  StackedVector x_next = wp.w_tilde() * s.x - alpha * ghat - wp.u() * *s.v;
  *s.v += wp.u() * x_next;
  s.ghat_prev = std::move(ghat);
  advance(s, std::move(x_next));
}

namespace {

using StepFn = void (*)(SolverState&, const ProblemInstance&,
                        const WeightPair&, const StepSchedule&);

StepFn step_function(Algorithm a) {
  switch (a) {
    case Algorithm::dgd: return &dgd_step;
    case Algorithm::extra: return &extra_step;
    case Algorithm::stochastic_extra: return &stochastic_extra_step;
    case Algorithm::dec_saga: return &dec_saga_step;
    case Algorithm::dsa: return &dsa_step;
    case Algorithm::dsa_saddle: return &dsa_saddle_step;
  }
  throw InvalidParam("unknown algorithm");
}

double error_against(const StackedVector& x, const Vector& x_star) {
  double e = 0.0;
  for (int n = 0; n < x.rows(); ++n)
    e += (x.row(n).transpose() - x_star).squaredNorm();
  return e;
}

}  // namespace

RunRecord run(Algorithm algorithm, const ProblemInstance& pi,
              const WeightPair& wp, const StepSchedule& schedule,
              std::int64_t iterations, std::uint64_t seed,
              const RunOptions& options) {
  if (iterations < 0) throw InvalidParam("iterations must be >= 0");
  if (options.x_star.size() != pi.dim())
    throw DimensionMismatch("x_star dimension does not match problem");

  SolverState s;
  s.x = options.x0 ? *options.x0
                   : StackedVector::Zero(pi.n_nodes(), pi.dim());
  check_stacked_dims(s.x, pi.n_nodes(), pi.dim());
  if (wp.n_nodes() != pi.n_nodes())
    throw DimensionMismatch("weight pair size does not match problem");
  s.stream = IndexStream(seed);

  if (uses_gradient_table(algorithm)) {
    s.table.initialize(pi, s.x);
    s.counters.grad_evals += pi.total_samples();
  }
  const bool needs_dual = is_saddle_form(algorithm) || options.track_dual;
  if (needs_dual) s.v = StackedVector(wp.u() * s.x);

  RunRecord record;
  record.algorithm = to_string(algorithm);
  record.schedule = schedule.describe();
  record.has_p = static_cast<bool>(options.p_hook);
  record.has_lyapunov = static_cast<bool>(options.lyapunov_hook);
  record.rows.reserve(iterations + 1);

  const StepFn step = step_function(algorithm);
  auto emit = [&]() {
    RunRecord::Row row;
    row.iteration = s.t;
    row.error = error_against(s.x, options.x_star);
    if (options.p_hook) row.p = options.p_hook(s);
    if (options.lyapunov_hook) row.lyapunov = options.lyapunov_hook(s);
    row.grad_evals_cum = s.counters.grad_evals;
    row.comms_cum = s.counters.comms;
    record.rows.push_back(row);
    if (options.on_iterate) options.on_iterate(s.t, s);
  };

  emit();
  for (std::int64_t t = 0; t < iterations; ++t) {
    step(s, pi, wp, schedule);
    if (!s.x.allFinite())
      throw NonFinite("iterate became non-finite at t=" + std::to_string(s.t) +
                      " (" + record.algorithm + ", " + record.schedule + ")");
    if (options.track_dual && !is_saddle_form(algorithm))
      *s.v += wp.u() * s.x;
    emit();
  }
  return record;
}

std::string RunRecord::to_csv() const {
  std::ostringstream os;
  os << "iteration,error_e_t";
  if (has_p) os << ",p_t";
  if (has_lyapunov) os << ",lyapunov";
  os << ",grad_evals_cum,comms_cum\n";
  char buf[32];
  for (const auto& row : rows) {
    os << row.iteration;
    std::snprintf(buf, sizeof(buf), "%.17g", row.error);
    os << "," << buf;
    if (has_p) {
      std::snprintf(buf, sizeof(buf), "%.17g", row.p);
      os << "," << buf;
    }
    if (has_lyapunov) {
      std::snprintf(buf, sizeof(buf), "%.17g", row.lyapunov);
      os << "," << buf;
    }
    os << "," << row.grad_evals_cum << "," << row.comms_cum << "\n";
  }
  return os.str();
}

}  // namespace dsa
