#ifndef DSA_ANALYSIS_HPP
#define DSA_ANALYSIS_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "dsa/problem.hpp"
#include "dsa/solvers.hpp"
#include "dsa/stacked.hpp"
#include "dsa/table.hpp"
#include "dsa/weights.hpp"

namespace dsa {

/// Centralized optimum of sum_n f_n plus derived quantities. The dual
/// optimum v* depends on the stepsize and is attached separately.
struct ReferenceSolution {
  Vector x_star_single;
  StackedVector x_star_stacked;
  std::optional<StackedVector> v_star;
  double f_star = 0.0;
  StackedVector grad_at_star;  // row n holds grad f_n(x*)
};

/// Deterministic full-gradient descent with Armijo backtracking, or the
/// closed form when the problem supplies one. Stops when the summed local
/// gradient norm drops below tol; throws NoConvergence past the iteration
/// cap.
ReferenceSolution solve_reference(const ProblemInstance& pi, double tol = 1e-12,
                                  std::int64_t max_iters = 1000000);

/// Always runs the gradient-descent path, even when a closed form exists;
/// keeps an independent route for cross-checking closed-form optima.
ReferenceSolution solve_reference_iterative(const ProblemInstance& pi,
                                            double tol = 1e-12,
                                            std::int64_t max_iters = 1000000);

/// v* = -alpha U^+ grad f(x*), the minimum-norm dual optimum in the column
/// space of U.
void attach_dual_optimum(ReferenceSolution& ref, const WeightPair& wp,
                         double alpha);

/// e^t = sum_n |x_n - x*|^2.
double error_metric(const StackedVector& x, const ReferenceSolution& ref);

/// Summed Bregman divergence of the table's stored points from the optimum:
///   p = sum_n (1/q_n) sum_i [f_{n,i}(y_{n,i}) - f_{n,i}(x*)
///                            - grad f_{n,i}(x*)' (y_{n,i} - x*)].
/// Caches the instantaneous values/gradients at x* so per-iteration
/// evaluation only recomputes the y terms.
class BregmanReference {
 public:
  BregmanReference(const ProblemInstance& pi, Vector x_star);

  double term(int node, int i, const Vector& y) const;
  double p_sequence(const GradientTable& table) const;

 private:
  const ProblemInstance* pi_;
  Vector x_star_;
  std::vector<std::vector<double>> f_star_;
  std::vector<std::vector<Vector>> g_star_;
};

/// One-shot form of the above.
double p_sequence(const ProblemInstance& pi, const GradientTable& table,
                  const ReferenceSolution& ref);

/// |x - x*|^2_{W~} + |v - v*|^2 + c p(table). Requires an attached v*.
double lyapunov(const StackedVector& x, const StackedVector& v,
                const GradientTable& table, const ReferenceSolution& ref,
                const WeightPair& wp, double c, const ProblemInstance& pi);

/// f(x) - f(x*) - grad f(x*)' (x - x*), the aggregate Bregman gap.
double aggregate_gap(const ProblemInstance& pi, const ReferenceSolution& ref,
                     const StackedVector& x);

/// Constants feeding the contraction analysis.
struct TheoryInputs {
  double mu = 0.0;
  double lip = 0.0;
  int q_min = 1;
  int q_max = 1;
  double gamma = 0.0;
  double gamma_cap = 0.0;
  double gamma_prime = 0.0;
  double gamma_cap_prime = 0.0;
  double lambda_max_penalty = 0.0;  // lambda_max(I + W - 2 W~)

  static TheoryInputs from(const ProblemInstance& pi, const WeightPair& wp);
};

struct TheoryParams {
  double eta = 0.0;
  double alpha = 0.0;
  double c = 0.0;
  double delta = 0.0;
  /// The five candidate terms whose minimum is delta (may contain +inf).
  std::vector<double> delta_terms;
  /// Lower interval endpoint for eta in both published forms; the
  /// statement form is the one enforced.
  double eta_lower_statement = 0.0;
  double eta_lower_alternate = 0.0;
};

/// Validates (eta, alpha, c) against their required intervals (throws
/// ParamOutOfRange naming the violated parameter) and evaluates the
/// contraction constant delta as the minimum of its five terms.
TheoryParams compute_delta(const TheoryInputs& in, double eta, double alpha,
                           double c);

/// The closed-form parameter choice eta = 2L^2/mu, alpha = gamma mu / (8L^2),
/// c = (q gamma mu^2 / 4L^3)(1 + mu/4L); requires q_min = q_max.
TheoryParams corollary_params(const TheoryInputs& in);

struct SimplifiedDelta {
  double graph_term = 0.0;     // 1 / (16 kappa_g^2)
  double sample_term = 0.0;    // 1 / (q [1 + 4 kappa_f (1 + ratio)])
  double function_term = 0.0;  // 1 / (4 ratio kappa_f + 32 kappa_g kappa_f^4)
  double value() const;
};

/// Closed-form delta in terms of the two condition numbers, the per-node
/// sample count and the ratio gamma/gamma'. ratio = 1 gives the simplified
/// three-regime form.
SimplifiedDelta simplified_delta(double kappa_f, double kappa_g, int q,
                                 double gamma_ratio = 1.0);

/// Exact conditional expectation: evaluates `quantity` for every joint index
/// assignment (i_1, ..., i_N) and returns the uniform average. Throws
/// TooLarge when prod_n q_n exceeds 4096.
double enumerate_conditional_expectation(
    const ProblemInstance& pi,
    const std::function<double(const std::vector<int>&)>& quantity);

void for_each_joint_assignment(
    const ProblemInstance& pi,
    const std::function<void(const std::vector<int>&)>& fn);

/// Snapshot of a saddle-form state (x^t, v^t, table) from which one-step
/// expectations can be enumerated.
struct SaddleSnapshot {
  StackedVector x;
  StackedVector v;
  GradientTable table;
};

/// Runs the saddle form for `steps` iterations from a seeded random start
/// and returns the resulting state.
SaddleSnapshot random_reachable_state(const ProblemInstance& pi,
                                      const WeightPair& wp,
                                      const StepSchedule& schedule, int steps,
                                      std::uint64_t seed);

/// Slacks (bound minus attained value; negative means violated) of the
/// one-step expectation bounds behind the linear convergence proof,
/// evaluated by exact enumeration at a given state.
struct BoundReport {
  double slack_gradient_noise = 0.0;   // E|ghat - grad f(x*)|^2 bound
  double slack_gap_decrement = 0.0;    // E|u^{t+1} - u*|_G^2 decrement bound
  double slack_table_decrement = 0.0;  // E p^{t+1} bound
  double slack_contraction = 0.0;      // Lyapunov contraction by 1 - delta
  double slack_dual_distance = 0.0;    // |v^t - v*|^2 bound
  double lyapunov_value = 0.0;
  double min_slack() const;
};

BoundReport check_expectation_bounds(const ProblemInstance& pi,
                                     const WeightPair& wp,
                                     const ReferenceSolution& ref,
                                     const TheoryParams& params,
                                     const SaddleSnapshot& snap);

struct RateFit {
  double rate = 1.0;  // exp(slope) of the log-linear fit of e^t
  double r_squared = 0.0;
  double slope = 0.0;
};

/// Least-squares line through (t, log e^t) over rows [begin, end).
/// Throws EmptyWindow for a degenerate window and NonPositiveError when the
/// window contains a non-positive error value.
RateFit fit_linear_rate(const std::vector<double>& errors, std::size_t begin,
                        std::size_t end);
RateFit fit_linear_rate(const RunRecord& record, std::size_t begin,
                        std::size_t end);

/// Window [begin, end) covering the decay before the error floor: ends at
/// the first row within floor_multiplier of the trace minimum.
std::pair<std::size_t, std::size_t> decay_window(
    const std::vector<double>& errors, double floor_multiplier = 10.0);

}  // namespace dsa

#endif  // DSA_ANALYSIS_HPP
