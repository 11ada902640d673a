#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "dsa/analysis.hpp"
#include "dsa/errors.hpp"
#include "dsa/experiment.hpp"
#include "testutil.hpp"

using namespace dsa;

namespace {

std::shared_ptr<QuadraticProblem> two_node_quadratic() {
  return std::make_shared<QuadraticProblem>(
      2, 1, 1,
      std::vector<std::vector<Vector>>{{Vector::Constant(1, 0.0)},
                                       {Vector::Constant(1, 2.0)}});
}

WeightPair two_node_pair() {
  return build_weight_pair(generate_graph(GraphKind::line, 2, 0));
}

std::pair<LogisticDataset, std::shared_ptr<ProblemInstance>> small_logistic() {
  LogisticParams p;
  p.n_nodes = 5;
  p.total_samples = 25;
  p.dim = 2;
  p.seed = 3;
  return generate_logistic(p);
}

// node-major flattening matching the stacked row layout
Vector flatten(const StackedVector& x) {
  Vector out(x.size());
  for (int n = 0; n < x.rows(); ++n)
    out.segment(n * x.cols(), x.cols()) = x.row(n).transpose();
  return out;
}

Matrix kron_identity(const Matrix& a, int p) {
  const int n = static_cast<int>(a.rows());
  Matrix out = Matrix::Zero(n * p, n * p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      out.block(i * p, j * p, p, p) = a(i, j) * Matrix::Identity(p, p);
  return out;
}

}  // namespace

TEST_CASE("reference solution on the closed-form quadratic") {
  auto quad = two_node_quadratic();
  const ReferenceSolution ref = solve_reference(*quad);
  CHECK(ref.x_star_single[0] == doctest::Approx(1.0));
  CHECK(ref.f_star == doctest::Approx(1.0));  // 1/2 + 1/2
  CHECK(ref.grad_at_star.colwise().sum().norm() < 1e-12);
}

TEST_CASE("reference solution satisfies the first-order condition on logistic") {
  auto [data, prob] = small_logistic();
  const ReferenceSolution ref = solve_reference(*prob);
  CHECK(prob->centralized_gradient(ref.x_star_single).norm() <= 1e-12);
  // sum of local gradients vanishes in the stacked picture too
  CHECK(ref.grad_at_star.colwise().sum().norm() <= 1e-9);
  CHECK_THROWS_AS(solve_reference_iterative(*prob, 1e-12, 3), NoConvergence);
}

TEST_CASE("dual optimum solves the stationarity condition in col(U)") {
  auto [data, prob] = small_logistic();
  const WeightPair wp =
      build_weight_pair(generate_graph(GraphKind::random, 5, 13, 0.6));
  ReferenceSolution ref = solve_reference(*prob);
  const double alpha = 5e-3;
  attach_dual_optimum(ref, wp, alpha);
  CHECK((alpha * ref.grad_at_star + wp.u() * *ref.v_star).norm() <= 1e-8);
  const Matrix projector = Matrix::Identity(5, 5) - wp.u() * wp.u_pinv();
  CHECK((projector * *ref.v_star).norm() <= 1e-8);
}

TEST_CASE("error metric") {
  auto quad = two_node_quadratic();
  const ReferenceSolution ref = solve_reference(*quad);
  CHECK(error_metric(ref.x_star_stacked, ref) == 0.0);

  StackedVector bumped = ref.x_star_stacked;
  bumped(1, 0) += 1.0;
  CHECK(error_metric(bumped, ref) == doctest::Approx(1.0));

  std::mt19937_64 rng(5);
  StackedVector x(2, 1);
  x << rng() % 7 * 0.3, rng() % 11 * -0.2;
  double naive = 0.0;
  for (int n = 0; n < 2; ++n)
    naive += (x.row(n).transpose() - ref.x_star_single).squaredNorm();
  CHECK(error_metric(x, ref) == doctest::Approx(naive).epsilon(1e-12));

  CHECK_THROWS_AS(error_metric(StackedVector::Zero(3, 1), ref),
                  DimensionMismatch);
}

TEST_CASE("table divergence diagnostic") {
  auto quad = generate_quadratic(2, 3, 2, 41);
  const ReferenceSolution ref = solve_reference(*quad);

  SUBCASE("zero at the optimum") {
    GradientTable table;
    table.initialize(*quad, ref.x_star_stacked);
    CHECK(p_sequence(*quad, table, ref) == doctest::Approx(0.0));
  }

  SUBCASE("quadratic identity: p equals the mean squared table distance") {
    GradientTable table;
    StackedVector x0 = StackedVector::Random(2, 2);
    table.initialize(*quad, x0);
    std::mt19937_64 rng(9);
    for (int rep = 0; rep < 10; ++rep) {
      const int n = int(rng() % 2), i = int(rng() % 3);
      const Vector y = testutil::random_point(rng, 2, 3.0);
      table.replace(n, i, y, quad->grad(n, i, y));
    }
    double expected = 0.0;
    for (int n = 0; n < 2; ++n) {
      double node = 0.0;
      for (int i = 0; i < 3; ++i)
        node += 0.5 *
                (table.stored_point(n, i) - ref.x_star_single).squaredNorm();
      expected += node / 3.0;
    }
    CHECK(p_sequence(*quad, table, ref) ==
          doctest::Approx(expected).epsilon(1e-12));
  }

  SUBCASE("nonnegative at random tables") {
    auto [data, prob] = small_logistic();
    const ReferenceSolution lref = solve_reference(*prob);
    std::mt19937_64 rng(13);
    for (int rep = 0; rep < 20; ++rep) {
      GradientTable table;
      StackedVector x0(5, 2);
      for (int n = 0; n < 5; ++n)
        x0.row(n) = testutil::random_point(rng, 2, 5.0).transpose();
      table.initialize(*prob, x0);
      CHECK(p_sequence(*prob, table, lref) >= 0.0);
    }
  }

  SUBCASE("strictly positive once any stored point leaves the optimum") {
    GradientTable table;
    table.initialize(*quad, ref.x_star_stacked);
    const Vector off = ref.x_star_single + Vector::Constant(2, 1e-3);
    table.replace(1, 0, off, quad->grad(1, 0, off));
    // strong convexity: the displaced entry contributes (mu/2)|off - x*|^2/q
    const double lower = 0.5 * (off - ref.x_star_single).squaredNorm() / 3.0;
    CHECK(p_sequence(*quad, table, ref) >= lower - 1e-15);
  }
}

TEST_CASE("lyapunov function") {
  auto quad = generate_quadratic(3, 2, 2, 61);
  const Graph g = generate_graph(GraphKind::complete, 3, 1);
  const WeightPair wp = build_weight_pair(g);
  ReferenceSolution ref = solve_reference(*quad);
  const double alpha = 0.05;
  attach_dual_optimum(ref, wp, alpha);

  GradientTable at_opt;
  at_opt.initialize(*quad, ref.x_star_stacked);
  CHECK(lyapunov(ref.x_star_stacked, *ref.v_star, at_opt, ref, wp, 0.3,
                 *quad) == doctest::Approx(0.0));

  SUBCASE("c = 0 reduces to the weighted primal gap and dominates gamma e^t") {
    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 10; ++rep) {
      StackedVector x(3, 2);
      for (int n = 0; n < 3; ++n)
        x.row(n) = testutil::random_point(rng, 2, 4.0).transpose();
      const double value =
          lyapunov(x, *ref.v_star, at_opt, ref, wp, 0.0, *quad);
      CHECK(value ==
            doctest::Approx(weighted_norm_sq(x - ref.x_star_stacked,
                                             wp.w_tilde()))
                .epsilon(1e-12));
      CHECK(value >= wp.spectral().gamma * error_metric(x, ref) - 1e-9);
    }
  }

  SUBCASE("matches a dense Kronecker-product evaluation") {
    std::mt19937_64 rng(7);
    const double c = 0.7;
    const SaddleSnapshot snap = random_reachable_state(
        *quad, wp, StepSchedule::constant(alpha), 12, 99);
    const double value = lyapunov(snap.x, snap.v, snap.table, ref, wp, c, *quad);

    const int p = 2, n = 3;
    Matrix big_g = Matrix::Zero(2 * n * p, 2 * n * p);
    big_g.topLeftCorner(n * p, n * p) = kron_identity(wp.w_tilde(), p);
    big_g.bottomRightCorner(n * p, n * p) = Matrix::Identity(n * p, n * p);
    Vector du(2 * n * p);
    du << flatten(snap.x) - flatten(ref.x_star_stacked),
        flatten(snap.v) - flatten(*ref.v_star);
    const double dense =
        du.dot(big_g * du) + c * p_sequence(*quad, snap.table, ref);
    CHECK(value == doctest::Approx(dense).epsilon(1e-10));
  }

  SUBCASE("missing dual is an error") {
    ReferenceSolution no_dual = solve_reference(*quad);
    CHECK_THROWS_AS(lyapunov(ref.x_star_stacked, *ref.v_star, at_opt, no_dual,
                             wp, 0.0, *quad),
                    MissingDual);
  }
}

TEST_CASE("contraction constant: closed forms and intervals") {
  SUBCASE("unit condition numbers give delta = 1/36") {
    const SimplifiedDelta d = simplified_delta(1.0, 1.0, 1);
    CHECK(d.graph_term == doctest::Approx(1.0 / 16));
    CHECK(d.sample_term == doctest::Approx(1.0 / 9));
    CHECK(d.function_term == doctest::Approx(1.0 / 36));
    CHECK(d.value() == doctest::Approx(1.0 / 36));
  }

  SUBCASE("two-node quadratic closed-form parameters, frozen by hand") {
    auto quad = generate_quadratic(2, 2, 1, 17);
    const WeightPair wp = two_node_pair();
    const TheoryInputs in = TheoryInputs::from(*quad, wp);
    const TheoryParams params = corollary_params(in);
    // gamma = 1/4, gamma' = Gamma' = 3/4, Gamma = 1, mu = L = 1, q = 2:
    // eta = 2, alpha = 1/32, c = 5/32, and the five terms are
    // {3/256, inf, 1/2, 3/34, 3/386}; the minimum is 3/386.
    CHECK(params.eta == doctest::Approx(2.0));
    CHECK(params.alpha == doctest::Approx(1.0 / 32));
    CHECK(params.c == doctest::Approx(5.0 / 32));
    CHECK(params.delta_terms[0] == doctest::Approx(3.0 / 256).epsilon(1e-9));
    CHECK(std::isinf(params.delta_terms[1]));
    CHECK(params.delta_terms[2] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(params.delta_terms[3] == doctest::Approx(3.0 / 34).epsilon(1e-9));
    CHECK(params.delta_terms[4] == doctest::Approx(3.0 / 386).epsilon(1e-9));
    CHECK(params.delta == doctest::Approx(3.0 / 386).epsilon(1e-9));
    CHECK(params.delta > 0.0);
    CHECK(params.delta <= 0.5);
  }

  SUBCASE("interval violations name the offending parameter") {
    auto quad = generate_quadratic(2, 2, 1, 17);
    const WeightPair wp = two_node_pair();
    const TheoryInputs in = TheoryInputs::from(*quad, wp);
    // eta lower bound is q_max L^2/(mu q_min) + L^2/mu - L = 1 here
    try {
      compute_delta(in, 0.5, 1e-3, 1e-3);
      FAIL("expected ParamOutOfRange");
    } catch (const ParamOutOfRange& e) {
      CHECK(e.param == "eta");
    }
    try {
      compute_delta(in, 2.0, in.gamma / 4.0 + 0.1, 1e-3);
      FAIL("expected ParamOutOfRange");
    } catch (const ParamOutOfRange& e) {
      CHECK(e.param == "alpha");
    }
    try {
      compute_delta(in, 2.0, 1.0 / 32, 1e-9);
      FAIL("expected ParamOutOfRange");
    } catch (const ParamOutOfRange& e) {
      CHECK(e.param == "c");
    }
  }

  SUBCASE("delta never exceeds 1/2 and shrinks with worse conditioning") {
    for (double kf : {1.0, 2.0, 5.0})
      for (double kg : {1.0, 3.0, 10.0})
        for (int q : {1, 4, 16}) {
          const double base = simplified_delta(kf, kg, q).value();
          CHECK(base <= 0.5 + 1e-15);
          CHECK(base > 0.0);
          CHECK(simplified_delta(kf * 2, kg, q).value() <= base);
          CHECK(simplified_delta(kf, kg * 2, q).value() <= base);
          CHECK(simplified_delta(kf, kg, q * 2).value() <= base);
        }
  }
}

TEST_CASE("exact conditional expectation by enumeration") {
  auto quad = generate_quadratic(2, 2, 2, 23);

  SUBCASE("constant quantity") {
    CHECK(enumerate_conditional_expectation(
              *quad, [](const std::vector<int>&) { return 1.0; }) == 1.0);
  }

  SUBCASE("assignment count is the product of per-node counts") {
    int count = 0;
    for_each_joint_assignment(*quad,
                              [&](const std::vector<int>&) { ++count; });
    CHECK(count == 4);
  }

  SUBCASE("averaging-gradient stack averages to the aggregate gradient") {
    GradientTable table;
    StackedVector x0 = StackedVector::Random(2, 2);
    table.initialize(*quad, x0);
    std::mt19937_64 rng(3);
    StackedVector x(2, 2);
    for (int n = 0; n < 2; ++n)
      x.row(n) = testutil::random_point(rng, 2, 3.0).transpose();

    StackedVector mean = StackedVector::Zero(2, 2);
    int count = 0;
    for_each_joint_assignment(*quad, [&](const std::vector<int>& idx) {
      for (int n = 0; n < 2; ++n)
        mean.row(n) += (quad->grad(n, idx[n], x.row(n).transpose()) -
                        table.stored_grad(n, idx[n]) +
                        table.running_sum(n) / quad->q(n))
                           .transpose();
      ++count;
    });
    mean /= count;
    CHECK((mean - aggregate_gradient(*quad, x)).cwiseAbs().maxCoeff() <=
          1e-12);
  }

  SUBCASE("oversized joint spaces are rejected") {
    auto big = generate_quadratic(2, 100, 1, 1);
    CHECK_THROWS_AS(enumerate_conditional_expectation(
                        *big, [](const std::vector<int>&) { return 0.0; }),
                    TooLarge);
  }
}

TEST_CASE("expectation bounds hold at the optimum and at reachable states") {
  auto quad = generate_quadratic(2, 2, 1, 17);
  const WeightPair wp = two_node_pair();
  const TheoryInputs in = TheoryInputs::from(*quad, wp);
  const TheoryParams params = corollary_params(in);
  ReferenceSolution ref = solve_reference(*quad);
  attach_dual_optimum(ref, wp, params.alpha);

  SUBCASE("all slacks vanish or stay nonnegative at the optimum") {
    GradientTable table;
    table.initialize(*quad, ref.x_star_stacked);
    const SaddleSnapshot snap{ref.x_star_stacked, *ref.v_star, table};
    const BoundReport report =
        check_expectation_bounds(*quad, wp, ref, params, snap);
    CHECK(report.lyapunov_value == doctest::Approx(0.0));
    CHECK(report.min_slack() >= -1e-12);
  }

  SUBCASE("random reachable states keep every slack above -1e-9") {
    TheoryParams out;
    const double slack = min_expectation_bound_slack(*quad, wp, 50, 33, &out);
    CHECK(slack >= -1e-9);
    CHECK(out.delta > 0.0);
    CHECK(out.delta <= 0.5);
  }

  SUBCASE("contraction claim holds state by state") {
    const StepSchedule sched = StepSchedule::constant(params.alpha);
    for (int s = 0; s < 10; ++s) {
      const SaddleSnapshot snap =
          random_reachable_state(*quad, wp, sched, 3 + s, 100 + s);
      const BoundReport report =
          check_expectation_bounds(*quad, wp, ref, params, snap);
      CHECK(report.slack_contraction >= -1e-9);
      CHECK(report.lyapunov_value >= 0.0);
    }
  }
}

TEST_CASE("log-linear rate fitting") {
  SUBCASE("exact geometric sequence") {
    std::vector<double> errors;
    for (int t = 0; t < 60; ++t) errors.push_back(std::pow(0.9, t));
    const RateFit fit = fit_linear_rate(errors, 0, errors.size());
    CHECK(fit.rate == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("constant sequence has rate one") {
    std::vector<double> errors(25, 0.42);
    const RateFit fit = fit_linear_rate(errors, 0, errors.size());
    CHECK(fit.rate == doctest::Approx(1.0));
    CHECK(fit.r_squared == doctest::Approx(1.0));
  }

  SUBCASE("window errors") {
    std::vector<double> errors = {1.0, 0.5, 0.25};
    CHECK_THROWS_AS(fit_linear_rate(errors, 2, 2), EmptyWindow);
    CHECK_THROWS_AS(fit_linear_rate(errors, 0, 9), EmptyWindow);
    errors[1] = 0.0;
    CHECK_THROWS_AS(fit_linear_rate(errors, 0, 3), NonPositiveError);
  }

  SUBCASE("decay window ends at the floor") {
    std::vector<double> errors;
    for (int t = 0; t < 40; ++t) errors.push_back(std::pow(0.5, t) + 1e-9);
    const auto [begin, end] = decay_window(errors, 10.0);
    CHECK(begin == 0);
    CHECK(end > 10);
    CHECK(end <= errors.size());
    const RateFit fit = fit_linear_rate(errors, begin, end);
    CHECK(fit.rate < 1.0);
    CHECK(fit.r_squared > 0.95);
  }
}
