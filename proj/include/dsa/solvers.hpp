#ifndef DSA_SOLVERS_HPP
#define DSA_SOLVERS_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dsa/problem.hpp"
#include "dsa/rng.hpp"
#include "dsa/schedule.hpp"
#include "dsa/stacked.hpp"
#include "dsa/table.hpp"
#include "dsa/weights.hpp"

namespace dsa {

enum class Algorithm { dgd, extra, stochastic_extra, dec_saga, dsa, dsa_saddle };

const char* to_string(Algorithm a);
Algorithm algorithm_from_string(const std::string& name);
bool uses_gradient_table(Algorithm a);
bool is_saddle_form(Algorithm a);

struct Counters {
  std::int64_t grad_evals = 0;  // instantaneous-gradient evaluations, network total
  std::int64_t comms = 0;       // synchronous communication rounds
};

/// Mutable state of one run. A single run owns its state and is
/// single-threaded; distinct runs share nothing mutable.
struct SolverState {
  StackedVector x;
  StackedVector x_prev;        // x^{t-1}; populated from t >= 1
  StackedVector ghat_prev;     // stored averaging gradient (dsa / dsa_saddle)
  StackedVector full_grad_prev;  // cached full gradient (extra)
  StackedVector sgrad_prev;      // cached stochastic gradient (stochastic_extra)
  std::optional<StackedVector> v;  // dual iterate (saddle form or tracked)
  GradientTable table;
  std::int64_t t = 0;
  IndexStream stream;
  Counters counters;
};

/// SAGA-style estimator at node `node` with fresh index `i`:
///   ghat = grad f_{n,i}(x_n) - stored(n,i) + running_sum(n)/q_n
/// evaluated against the pre-update table; the fresh gradient then replaces
/// entry (n, i). Exactly one new instantaneous-gradient evaluation.
Vector stochastic_averaging_gradient(const ProblemInstance& pi,
                                     GradientTable& table, int node, int i,
                                     const Vector& x_node);

/// One synchronous round of each scheme. All steps advance state.t, update
/// x / x_prev and the counters; dimension mismatches throw.
void dgd_step(SolverState& s, const ProblemInstance& pi, const WeightPair& wp,
              const StepSchedule& schedule);
void extra_step(SolverState& s, const ProblemInstance& pi,
                const WeightPair& wp, const StepSchedule& schedule);
void stochastic_extra_step(SolverState& s, const ProblemInstance& pi,
                           const WeightPair& wp, const StepSchedule& schedule);
void dec_saga_step(SolverState& s, const ProblemInstance& pi,
                   const WeightPair& wp, const StepSchedule& schedule);
void dsa_step(SolverState& s, const ProblemInstance& pi, const WeightPair& wp,
              const StepSchedule& schedule);
/// Primal-dual form: x^{t+1} = W~x^t - alpha ghat^t - U v^t, then
/// v^{t+1} = v^t + U x^{t+1}. Requires v^0 = U x^0; shares the index stream
/// with the recursion form so both produce identical draws.
void dsa_saddle_step(SolverState& s, const ProblemInstance& pi,
                     const WeightPair& wp, const StepSchedule& schedule);

struct RunRecord {
  struct Row {
    std::int64_t iteration = 0;
    double error = 0.0;      // e^t = sum_n |x_n - x*|^2
    double p = 0.0;          // Bregman table diagnostic (when recorded)
    double lyapunov = 0.0;   // G-weighted gap + c p (when recorded)
    std::int64_t grad_evals_cum = 0;
    std::int64_t comms_cum = 0;
  };
  std::string algorithm;
  std::string schedule;
  bool has_p = false;
  bool has_lyapunov = false;
  std::vector<Row> rows;

  std::string to_csv() const;
};

struct RunOptions {
  Vector x_star;                    // reference optimum (required)
  std::optional<StackedVector> x0;  // defaults to zeros
  /// Maintain the dual running sum v^t = sum_{s<=t} U x^s for recursion-form
  /// algorithms (the saddle form keeps v as part of its own update).
  bool track_dual = false;
  /// Optional metric hooks; must be pure with respect to solver state. Their
  /// values land in the p_t / lyapunov CSV columns.
  std::function<double(const SolverState&)> p_hook;
  std::function<double(const SolverState&)> lyapunov_hook;
  /// Pure observation hook, called at t = 0 and after every step.
  std::function<void(std::int64_t t, const SolverState&)> on_iterate;
};

/// Runs `iterations` synchronous rounds and records metrics for every
/// iteration including t = 0. Deterministic given (algorithm, seed, config).
/// Throws NonFinite as soon as an iterate stops being finite.
RunRecord run(Algorithm algorithm, const ProblemInstance& pi,
              const WeightPair& wp, const StepSchedule& schedule,
              std::int64_t iterations, std::uint64_t seed,
              const RunOptions& options);

}  // namespace dsa

#endif  // DSA_SOLVERS_HPP
