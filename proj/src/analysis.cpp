#include "dsa/analysis.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "dsa/errors.hpp"
#include "dsa/rng.hpp"

namespace dsa {

namespace {

ReferenceSolution finalize_reference(const ProblemInstance& pi, Vector x) {
  ReferenceSolution ref;
  ref.x_star_single = std::move(x);
  ref.x_star_stacked = replicate(ref.x_star_single, pi.n_nodes());
  ref.f_star = aggregate_value(pi, ref.x_star_stacked);
  ref.grad_at_star = aggregate_gradient(pi, ref.x_star_stacked);
  return ref;
}

}  // namespace

ReferenceSolution solve_reference_iterative(const ProblemInstance& pi,
                                            double tol,
                                            std::int64_t max_iters) {
  if (pi.mu() <= 0.0)
    throw ZeroStrongConvexity(
        "reference solve needs a strongly convex objective");
  Vector x = Vector::Zero(pi.dim());
  double fx = pi.centralized_value(x);
  double step = 1.0;
  double step_accepted = 0.0;
  const double eps = std::numeric_limits<double>::epsilon();
  std::int64_t iter = 0;

  // Armijo backtracking while objective decreases are resolvable above the
  // rounding noise of f.
  bool resolvable = true;
  while (resolvable && iter < max_iters) {
    const Vector g = pi.centralized_gradient(x);
    const double gsq = g.squaredNorm();
    if (std::sqrt(gsq) <= tol) return finalize_reference(pi, std::move(x));
    double s = step;
    for (;; ++iter) {
      const Vector x_next = x - s * g;
      const double f_next = pi.centralized_value(x_next);
      if (f_next <= fx - 1e-4 * s * gsq) {
        x = x_next;
        fx = f_next;
        step_accepted = s;
        break;
      }
      s *= 0.5;
      if (1e-4 * s * gsq < 64.0 * eps * std::abs(fx)) {
        // required decrease is below f's noise floor; line search is blind
        resolvable = false;
        break;
      }
    }
    step = 2.0 * s;
    ++iter;
  }

  // Endgame: fixed-step descent with the last validated step (halved for
  // headroom). The line search certified descent at this scale, so the step
  // is stable and the gradient contracts linearly to the arithmetic floor.
  double s2 = step_accepted > 0.0 ? 0.5 * step_accepted : step;
  int growth_streak = 0;
  double prev_norm = std::numeric_limits<double>::infinity();
  for (; iter < max_iters; ++iter) {
    const Vector g = pi.centralized_gradient(x);
    const double gnorm = g.norm();
    if (gnorm <= tol) return finalize_reference(pi, std::move(x));
    if (gnorm > prev_norm) {
      if (++growth_streak >= 3) {
        s2 *= 0.5;
        growth_streak = 0;
        if (s2 < 1e-30)
          throw NoConvergence("descent stalled at gradient norm " +
                              std::to_string(gnorm));
      }
    } else {
      growth_streak = 0;
    }
    prev_norm = gnorm;
    x -= s2 * g;
  }
  throw NoConvergence("reference solve hit the iteration cap");
}

ReferenceSolution solve_reference(const ProblemInstance& pi, double tol,
                                  std::int64_t max_iters) {
  if (const auto* quad = dynamic_cast<const QuadraticProblem*>(&pi))
    return finalize_reference(pi, quad->closed_form_optimum());
  return solve_reference_iterative(pi, tol, max_iters);
}

void attach_dual_optimum(ReferenceSolution& ref, const WeightPair& wp,
                         double alpha) {
  ref.v_star = StackedVector(-alpha * (wp.u_pinv() * ref.grad_at_star));
}

double error_metric(const StackedVector& x, const ReferenceSolution& ref) {
  if (x.rows() != ref.x_star_stacked.rows() ||
      x.cols() != ref.x_star_stacked.cols())
    throw DimensionMismatch("iterate does not match reference dimensions");
  return (x - ref.x_star_stacked).squaredNorm();
}

BregmanReference::BregmanReference(const ProblemInstance& pi, Vector x_star)
    : pi_(&pi), x_star_(std::move(x_star)) {
  f_star_.resize(pi.n_nodes());
  g_star_.resize(pi.n_nodes());
  for (int n = 0; n < pi.n_nodes(); ++n) {
    for (int i = 0; i < pi.q(n); ++i) {
      f_star_[n].push_back(pi.eval(n, i, x_star_));
      g_star_[n].push_back(pi.grad(n, i, x_star_));
    }
  }
}

double BregmanReference::term(int node, int i, const Vector& y) const {
  return pi_->eval(node, i, y) - f_star_[node][i] -
         g_star_[node][i].dot(y - x_star_);
}

double BregmanReference::p_sequence(const GradientTable& table) const {
  double p = 0.0;
  for (int n = 0; n < pi_->n_nodes(); ++n) {
    double node_sum = 0.0;
    for (int i = 0; i < pi_->q(n); ++i)
      node_sum += term(n, i, table.stored_point(n, i));
    p += node_sum / pi_->q(n);
  }
  return p;
}

double p_sequence(const ProblemInstance& pi, const GradientTable& table,
                  const ReferenceSolution& ref) {
  return BregmanReference(pi, ref.x_star_single).p_sequence(table);
}

double aggregate_gap(const ProblemInstance& pi, const ReferenceSolution& ref,
                     const StackedVector& x) {
  const StackedVector d = x - ref.x_star_stacked;
  return aggregate_value(pi, x) - ref.f_star -
         d.cwiseProduct(ref.grad_at_star).sum();
}

double lyapunov(const StackedVector& x, const StackedVector& v,
                const GradientTable& table, const ReferenceSolution& ref,
                const WeightPair& wp, double c, const ProblemInstance& pi) {
  if (!ref.v_star)
    throw MissingDual("lyapunov needs the dual optimum; attach it first");
  const double gap = weighted_norm_sq(x - ref.x_star_stacked, wp.w_tilde()) +
                     (v - *ref.v_star).squaredNorm();
  if (c == 0.0) return gap;
  return gap + c * p_sequence(pi, table, ref);
}

TheoryInputs TheoryInputs::from(const ProblemInstance& pi,
                                const WeightPair& wp) {
  TheoryInputs in;
  in.mu = pi.mu();
  in.lip = pi.lip();
  in.q_min = pi.q_min();
  in.q_max = pi.q_max();
  const SpectralSummary& s = wp.spectral();
  in.gamma = s.gamma;
  in.gamma_cap = s.gamma_cap;
  in.gamma_prime = s.gamma_prime;
  in.gamma_cap_prime = s.gamma_cap_prime;
  const int n = wp.n_nodes();
  const Matrix penalty =
      Matrix::Identity(n, n) + wp.w() - 2.0 * wp.w_tilde();
  Eigen::SelfAdjointEigenSolver<Matrix> es(penalty, Eigen::EigenvaluesOnly);
  in.lambda_max_penalty = es.eigenvalues().maxCoeff();
  return in;
}

TheoryParams compute_delta(const TheoryInputs& in, double eta, double alpha,
                           double c) {
  if (in.mu <= 0.0)
    throw ZeroStrongConvexity("contraction constants need mu > 0");
  const double mu = in.mu, L = in.lip;
  const double qmin = in.q_min, qmax = in.q_max;

  TheoryParams out;
  out.eta_lower_statement = L * L * qmax / (mu * qmin) + L * L / mu - L;
  out.eta_lower_alternate = L * L * qmax / (mu * qmin) + L * L / mu - L / 2.0;
  if (!(eta > out.eta_lower_statement))
    throw ParamOutOfRange(
        "eta", "eta must exceed L^2 q_max/(mu q_min) + L^2/mu - L = " +
                   std::to_string(out.eta_lower_statement));
  if (!(alpha > 0.0 && alpha < in.gamma / (2.0 * eta)))
    throw ParamOutOfRange("alpha",
                          "alpha must lie in (0, gamma/(2 eta)) = (0, " +
                              std::to_string(in.gamma / (2.0 * eta)) + ")");
  const double c_lo = 4.0 * alpha * L * qmax / eta;
  const double c_hi = 4.0 * alpha * mu * qmin / L -
                      2.0 * alpha * qmin * (2.0 * L - mu) / eta;
  if (!(c > c_lo && c < c_hi))
    throw ParamOutOfRange("c", "c must lie in (" + std::to_string(c_lo) +
                                   ", " + std::to_string(c_hi) + ")");

  const double gp = in.gamma_prime;
  const double inf = std::numeric_limits<double>::infinity();
  const double d1 = (in.gamma - 2.0 * alpha * eta) * gp /
                    (8.0 * in.gamma_cap * in.gamma_cap);
  const double lam_pen = in.lambda_max_penalty;
  const double d2 = lam_pen > 1e-13 ? gp / (4.0 * lam_pen) : inf;
  const double d3 = gp / (2.0 * in.gamma_cap_prime);
  const double d4 = gp * (c * eta - 4.0 * alpha * L * qmax) /
                    (eta * qmax * (c * gp + 16.0 * alpha * alpha * L));
  const double d5 =
      (4.0 * alpha * mu / L - 2.0 * alpha * (2.0 * L - mu) / eta - c / qmin) /
      (8.0 * alpha * alpha * (2.0 * L - mu) / gp + 2.0 * in.gamma_cap / mu);

  out.eta = eta;
  out.alpha = alpha;
  out.c = c;
  out.delta_terms = {d1, d2, d3, d4, d5};
  out.delta = *std::min_element(out.delta_terms.begin(),
                                out.delta_terms.end());
  return out;
}

TheoryParams corollary_params(const TheoryInputs& in) {
  if (in.q_min != in.q_max)
    throw InvalidParam("closed-form constants assume equal per-node counts");
  const double mu = in.mu, L = in.lip, gamma = in.gamma;
  const double q = in.q_max;
  const double eta = 2.0 * L * L / mu;
  const double alpha = gamma * mu / (8.0 * L * L);
  const double c =
      (q * gamma * mu * mu / (4.0 * L * L * L)) * (1.0 + mu / (4.0 * L));
  return compute_delta(in, eta, alpha, c);
}

double SimplifiedDelta::value() const {
  return std::min({graph_term, sample_term, function_term});
}

SimplifiedDelta simplified_delta(double kappa_f, double kappa_g, int q,
                                 double gamma_ratio) {
  SimplifiedDelta d;
  d.graph_term = 1.0 / (16.0 * kappa_g * kappa_g);
  d.sample_term = 1.0 / (q * (1.0 + 4.0 * kappa_f * (1.0 + gamma_ratio)));
  d.function_term =
      1.0 / (4.0 * gamma_ratio * kappa_f +
             32.0 * kappa_g * kappa_f * kappa_f * kappa_f * kappa_f);
  return d;
}

void for_each_joint_assignment(
    const ProblemInstance& pi,
    const std::function<void(const std::vector<int>&)>& fn) {
  const int n_nodes = pi.n_nodes();
  std::int64_t total = 1;
  for (int n = 0; n < n_nodes; ++n) {
    total *= pi.q(n);
    if (total > 4096)
      throw TooLarge("joint index space exceeds 4096 assignments");
  }
  std::vector<int> idx(n_nodes, 0);
  for (std::int64_t k = 0; k < total; ++k) {
    fn(idx);
    for (int n = 0; n < n_nodes; ++n) {
      if (++idx[n] < pi.q(n)) break;
      idx[n] = 0;
    }
  }
}

double enumerate_conditional_expectation(
    const ProblemInstance& pi,
    const std::function<double(const std::vector<int>&)>& quantity) {
  double sum = 0.0;
  std::int64_t count = 0;
  for_each_joint_assignment(pi, [&](const std::vector<int>& idx) {
    sum += quantity(idx);
    ++count;
  });
  return sum / static_cast<double>(count);
}

SaddleSnapshot random_reachable_state(const ProblemInstance& pi,
                                      const WeightPair& wp,
                                      const StepSchedule& schedule, int steps,
                                      std::uint64_t seed) {
  std::mt19937_64 rng(mix64(seed));
  std::normal_distribution<double> normal(0.0, 1.0);
  StackedVector x0(pi.n_nodes(), pi.dim());
  for (int n = 0; n < x0.rows(); ++n)
    for (int j = 0; j < x0.cols(); ++j) x0(n, j) = normal(rng);

  SolverState s;
  s.x = x0;
  s.v = StackedVector(wp.u() * x0);
  s.stream = IndexStream(mix64(seed ^ 0xABCDEF1234567890ULL));
  s.table.initialize(pi, x0);
  for (int t = 0; t < steps; ++t) dsa_saddle_step(s, pi, wp, schedule);
  return SaddleSnapshot{s.x, *s.v, s.table};
}

double BoundReport::min_slack() const {
  return std::min({slack_gradient_noise, slack_gap_decrement,
                   slack_table_decrement, slack_contraction,
                   slack_dual_distance});
}

BoundReport check_expectation_bounds(const ProblemInstance& pi,
                                     const WeightPair& wp,
                                     const ReferenceSolution& ref,
                                     const TheoryParams& params,
                                     const SaddleSnapshot& snap) {
  if (!ref.v_star) throw MissingDual("bound checks need the dual optimum");
  const double mu = pi.mu(), L = pi.lip();
  const double alpha = params.alpha, eta = params.eta, c = params.c;
  const double qmin = pi.q_min(), qmax = pi.q_max();
  const SpectralSummary& sp = wp.spectral();
  const int n_nodes = pi.n_nodes();

  const Matrix eye = Matrix::Identity(n_nodes, n_nodes);
  const Matrix penalty = eye + wp.w() - 2.0 * wp.w_tilde();
  const Matrix penalty_sq = penalty * penalty;
  const Matrix wt_sq = wp.w_tilde() * wp.w_tilde();
  const Matrix wt_damped = wp.w_tilde() - 2.0 * alpha * eta * eye;

  const BregmanReference bregman(pi, ref.x_star_single);
  const double p_t = bregman.p_sequence(snap.table);
  const double gap_f = aggregate_gap(pi, ref, snap.x);
  const double xv_gap =
      weighted_norm_sq(snap.x - ref.x_star_stacked, wp.w_tilde()) +
      (snap.v - *ref.v_star).squaredNorm();
  const double lyap_t = xv_gap + c * p_t;
  const double v_gap = (snap.v - *ref.v_star).squaredNorm();

  double e_gnoise = 0.0, e_unext = 0.0, e_xnext_pen = 0.0, e_xnext_pen2 = 0.0;
  double e_xdiff_damped = 0.0, e_xdiff_wt2 = 0.0, e_vdiff = 0.0, e_pnext = 0.0;
  std::int64_t count = 0;

  for_each_joint_assignment(pi, [&](const std::vector<int>& idx) {
    StackedVector ghat(n_nodes, pi.dim());
    double p_next = p_t;
    for (int n = 0; n < n_nodes; ++n) {
      const Vector x_n = snap.x.row(n).transpose();
      const int i = idx[n];
      const Vector fresh = pi.grad(n, i, x_n);
      ghat.row(n) = (fresh - snap.table.stored_grad(n, i) +
                     snap.table.running_sum(n) / pi.q(n))
                        .transpose();
      p_next += (bregman.term(n, i, x_n) -
                 bregman.term(n, i, snap.table.stored_point(n, i))) /
                pi.q(n);
    }
    const StackedVector x_next =
        wp.w_tilde() * snap.x - alpha * ghat - wp.u() * snap.v;
    const StackedVector v_next = snap.v + wp.u() * x_next;

    const StackedVector dx_opt = x_next - ref.x_star_stacked;
    const StackedVector dx = x_next - snap.x;
    e_gnoise += (ghat - ref.grad_at_star).squaredNorm();
    e_unext += weighted_norm_sq(dx_opt, wp.w_tilde()) +
               (v_next - *ref.v_star).squaredNorm();
    e_xnext_pen += weighted_norm_sq(dx_opt, penalty);
    e_xnext_pen2 += weighted_norm_sq(dx_opt, penalty_sq);
    e_xdiff_damped += weighted_norm_sq(dx, wt_damped);
    e_xdiff_wt2 += weighted_norm_sq(dx, wt_sq);
    e_vdiff += (v_next - snap.v).squaredNorm();
    e_pnext += p_next;
    ++count;
  });

  const double inv = 1.0 / static_cast<double>(count);
  e_gnoise *= inv;
  e_unext *= inv;
  e_xnext_pen *= inv;
  e_xnext_pen2 *= inv;
  e_xdiff_damped *= inv;
  e_xdiff_wt2 *= inv;
  e_vdiff *= inv;
  e_pnext *= inv;

  BoundReport report;
  report.lyapunov_value = lyap_t;

  report.slack_gradient_noise =
      4.0 * L * p_t + 2.0 * (2.0 * L - mu) * gap_f - e_gnoise;

  const double gap_rhs = xv_gap - 2.0 * e_xnext_pen +
                         (4.0 * alpha * L / eta) * p_t - e_xdiff_damped -
                         e_vdiff -
                         (4.0 * alpha * mu / L -
                          2.0 * alpha * (2.0 * L - mu) / eta) *
                             gap_f;
  report.slack_gap_decrement = gap_rhs - e_unext;

  report.slack_table_decrement =
      (1.0 - 1.0 / qmax) * p_t + gap_f / qmin - e_pnext;

  report.slack_contraction =
      (1.0 - params.delta) * lyap_t - (e_unext + c * e_pnext);

  const double gp = sp.gamma_prime;
  report.slack_dual_distance =
      (8.0 / gp) * e_xnext_pen2 + (8.0 / gp) * e_xdiff_wt2 +
      (16.0 * alpha * alpha * L / gp) * p_t +
      (2.0 * sp.gamma_cap_prime / gp) * e_vdiff +
      (8.0 * alpha * alpha * (2.0 * L - mu) / gp) * gap_f - v_gap;

  return report;
}

RateFit fit_linear_rate(const std::vector<double>& errors, std::size_t begin,
                        std::size_t end) {
  if (end > errors.size() || begin + 2 > end)
    throw EmptyWindow("rate fit needs at least two rows inside the trace");
  const std::size_t m = end - begin;
  double mean_t = 0.0, mean_y = 0.0;
  for (std::size_t i = begin; i < end; ++i) {
    if (!(errors[i] > 0.0))
      throw NonPositiveError("rate fit window contains e <= 0 at row " +
                             std::to_string(i));
    mean_t += static_cast<double>(i);
    mean_y += std::log(errors[i]);
  }
  mean_t /= m;
  mean_y /= m;
  double stt = 0.0, sty = 0.0, syy = 0.0;
  for (std::size_t i = begin; i < end; ++i) {
    const double dt = static_cast<double>(i) - mean_t;
    const double dy = std::log(errors[i]) - mean_y;
    stt += dt * dt;
    sty += dt * dy;
    syy += dy * dy;
  }
  RateFit fit;
  fit.slope = sty / stt;
  fit.rate = std::exp(fit.slope);
  // a numerically constant log-trace is a perfect fit with zero slope
  fit.r_squared = syy > 1e-20 * m ? (sty * sty) / (stt * syy) : 1.0;
  return fit;
}

RateFit fit_linear_rate(const RunRecord& record, std::size_t begin,
                        std::size_t end) {
  std::vector<double> errors;
  errors.reserve(record.rows.size());
  for (const auto& row : record.rows) errors.push_back(row.error);
  return fit_linear_rate(errors, begin, end);
}

std::pair<std::size_t, std::size_t> decay_window(
    const std::vector<double>& errors, double floor_multiplier) {
  double floor = std::numeric_limits<double>::infinity();
  for (double e : errors)
    if (e > 0.0) floor = std::min(floor, e);
  std::size_t end = errors.size();
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!(errors[i] > 0.0) || errors[i] <= floor_multiplier * floor) {
      end = i + 1;
      break;
    }
  }
  return {0, std::max<std::size_t>(end, 2)};
}

}  // namespace dsa
