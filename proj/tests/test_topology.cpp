#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <random>

#include "dsa/errors.hpp"
#include "dsa/graph.hpp"
#include "dsa/weights.hpp"
#include "testutil.hpp"

using namespace dsa;

TEST_CASE("complete and cycle graphs have the expected edge sets") {
  const Graph g3 = generate_graph(GraphKind::complete, 3, 0);
  CHECK(g3.edges() == std::vector<std::pair<int, int>>{{0, 1}, {0, 2}, {1, 2}});

  const Graph c4 = generate_graph(GraphKind::cycle, 4, 0);
  CHECK(c4.edges() ==
        std::vector<std::pair<int, int>>{{0, 1}, {0, 3}, {1, 2}, {2, 3}});

  const Graph line = generate_graph(GraphKind::line, 4, 0);
  CHECK(line.edges() ==
        std::vector<std::pair<int, int>>{{0, 1}, {1, 2}, {2, 3}});

  const Graph star = generate_graph(GraphKind::star, 4, 0);
  CHECK(star.edges() ==
        std::vector<std::pair<int, int>>{{0, 1}, {0, 2}, {0, 3}});
}

TEST_CASE("random graphs come out connected (independent reachability check)") {
  const Graph g = generate_graph(GraphKind::random, 20, 7, 0.3);
  CHECK(testutil::bfs_connected(g.edges(), 20));
  // deterministic for a fixed seed
  const Graph g2 = generate_graph(GraphKind::random, 20, 7, 0.3);
  CHECK(g.edges() == g2.edges());
}

TEST_CASE("graph construction rejects bad input") {
  CHECK_THROWS_AS(generate_graph(GraphKind::complete, 1, 0), InvalidParam);
  CHECK_THROWS_AS(generate_graph(GraphKind::random, 5, 0, 0.0), InvalidParam);
  CHECK_THROWS_AS(generate_graph(GraphKind::random, 5, 0, 1.5), InvalidParam);
  // disconnected edge list
  CHECK_THROWS_AS(Graph(4, {{0, 1}, {2, 3}}), ConnectivityFailure);
  CHECK_THROWS_AS(Graph(3, {{0, 0}, {0, 1}, {1, 2}}), InvalidParam);
  // vanishing edge probability cannot produce a connected draw
  CHECK_THROWS_AS(generate_graph(GraphKind::random, 30, 3, 1e-12),
                  ConnectivityFailure);
}

TEST_CASE("laplacian matches hand values and is PSD with a spectral gap") {
  const Graph path = generate_graph(GraphKind::line, 2, 0);
  Matrix expected(2, 2);
  expected << 1, -1, -1, 1;
  CHECK((laplacian(path) - expected).cwiseAbs().maxCoeff() == 0.0);

  const Graph k3 = generate_graph(GraphKind::complete, 3, 0);
  Matrix expected3(3, 3);
  expected3 << 2, -1, -1, -1, 2, -1, -1, -1, 2;
  CHECK((laplacian(k3) - expected3).cwiseAbs().maxCoeff() == 0.0);

  for (GraphKind kind : {GraphKind::random, GraphKind::cycle, GraphKind::star}) {
    const Graph g = generate_graph(kind, 8, 5, 0.4);
    const Matrix l = laplacian(g);
    CHECK((l - l.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((l * Vector::Ones(8)).cwiseAbs().maxCoeff() == 0.0);
    Eigen::SelfAdjointEigenSolver<Matrix> es(l, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues()[0] > -1e-12);
    CHECK(es.eigenvalues()[1] > 1e-9);  // connected: rank N-1
  }
}

TEST_CASE("two-node path weight pair matches hand computation") {
  const Graph path = generate_graph(GraphKind::line, 2, 0);
  const WeightPair wp = build_weight_pair(path);  // tau = (2/3)*2 = 4/3

  Matrix w_expected(2, 2), wt_expected(2, 2);
  w_expected << 0.25, 0.75, 0.75, 0.25;
  wt_expected << 0.625, 0.375, 0.375, 0.625;
  CHECK((wp.w() - w_expected).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((wp.w_tilde() - wt_expected).cwiseAbs().maxCoeff() < 1e-15);

  const SpectralSummary& s = wp.spectral();
  CHECK(s.gamma == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(s.gamma_cap == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.gamma_prime == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(s.gamma_cap_prime == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(s.lambda_max_laplacian == doctest::Approx(2.0).epsilon(1e-12));

  // U has eigenvalues {0, sqrt(3/4)} on the consensus / disagreement axes
  const double root = std::sqrt(0.75);
  Matrix u_expected(2, 2);
  u_expected << root / 2, -root / 2, -root / 2, root / 2;
  CHECK((wp.u() - u_expected).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((wp.u() * wp.u() - (wp.w_tilde() - wp.w())).cwiseAbs().maxCoeff() <
        1e-12);

  CHECK(graph_condition_number(s) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("graph condition number from spectral summaries") {
  SpectralSummary flat{1.0, 1.0, 1.0, 1.0, 0.0};
  CHECK(graph_condition_number(flat) == doctest::Approx(1.0));

  const Graph k3 = generate_graph(GraphKind::complete, 3, 0);
  const WeightPair wp = build_weight_pair(k3);
  // eigenvalues: W~ in {1, 1/4}, W~-W in {0, 3/4}
  CHECK(graph_condition_number(wp.spectral()) ==
        doctest::Approx(4.0).epsilon(1e-9));
}

TEST_CASE("admissibility validation accepts built pairs and names failures") {
  const Graph g = generate_graph(GraphKind::random, 10, 3, 0.4);
  const WeightPair wp = build_weight_pair(g);
  CHECK(validate_assumption1(wp, 1e-9).all_pass());

  // identity mixing: null(I - W) is everything, not span(1)
  const Matrix eye = Matrix::Identity(4, 4);
  const ValidationReport bad = validate_assumption1(eye, eye, 1e-9);
  CHECK_FALSE(bad.all_pass());
  CHECK(bad.failures().find("null_i_minus_w_is_span_ones") !=
        std::string::npos);

  // asymmetric perturbation trips the symmetry check at tol 1e-6
  Matrix w = wp.w();
  w(0, 1) += 1e-3;
  const ValidationReport asym = validate_assumption1(w, wp.w_tilde(), 1e-6);
  CHECK_FALSE(asym.all_pass());
  CHECK(asym.failures().find("w_symmetric") != std::string::npos);
}

TEST_CASE("weight pairs satisfy every admissibility condition across "
          "topologies and tau factors") {
  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> tau(0.501, 1.0);
  for (GraphKind kind : {GraphKind::random, GraphKind::complete,
                         GraphKind::cycle, GraphKind::line, GraphKind::star}) {
    for (int n : {5, 12}) {
      const Graph g = generate_graph(kind, n, 17, 0.4);
      for (int rep = 0; rep < 3; ++rep) {
        const WeightPair wp = build_weight_pair(g, tau(rng));
        CHECK(validate_assumption1(wp, 1e-9).all_pass());

        // U is the PSD square root of W~ - W
        Eigen::SelfAdjointEigenSolver<Matrix> es(wp.u(),
                                                 Eigen::EigenvaluesOnly);
        CHECK(es.eigenvalues()[0] > -1e-12);
        CHECK((wp.u() * wp.u() - (wp.w_tilde() - wp.w()))
                  .cwiseAbs()
                  .maxCoeff() < 1e-10);

        // U annihilates consensus and u_pinv inverts it off the null space
        const Vector ones = Vector::Ones(n);
        CHECK((wp.u() * ones).cwiseAbs().maxCoeff() < 1e-9);
        Vector v = testutil::random_point(rng, n, 1.0);
        v -= (v.dot(ones) / n) * ones;
        CHECK((wp.u_pinv() * (wp.u() * v) - v).cwiseAbs().maxCoeff() < 1e-9);

        // row sums 1: mixing preserves consensus
        CHECK((wp.w() * ones - ones).cwiseAbs().maxCoeff() < 1e-10);
        const Vector consensus = 3.25 * ones;
        CHECK((wp.w() * consensus - consensus).cwiseAbs().maxCoeff() < 1e-9);
      }
    }
  }
}

TEST_CASE("build_weight_pair rejects tau factors at or below one half") {
  const Graph g = generate_graph(GraphKind::cycle, 5, 0);
  CHECK_THROWS_AS(build_weight_pair(g, 0.5), InvalidParam);
  CHECK_THROWS_AS(build_weight_pair(g, 0.1), InvalidParam);
}

TEST_CASE("direct weight pair constructor validates external matrices") {
  Matrix w(2, 2), wt(2, 2);
  w << 0.5, 0.5, 0.5, 0.5;
  wt << 0.75, 0.25, 0.25, 0.75;
  const WeightPair wp(w, wt);
  CHECK(wp.spectral().gamma == doctest::Approx(0.5));

  Matrix bad = wt;
  bad(0, 0) = 2.0;  // breaks row sums and the spectral ordering
  CHECK_THROWS_AS(WeightPair(w, bad), AssumptionViolation);
}

TEST_CASE("edge list serialization round-trips") {
  const Graph g = generate_graph(GraphKind::random, 9, 29, 0.5);
  const Graph back = Graph::from_edge_list(g.to_edge_list());
  CHECK(back.n_nodes() == g.n_nodes());
  CHECK(back.edges() == g.edges());
}

TEST_CASE("weight matrix CSV export holds full precision") {
  const Graph g = generate_graph(GraphKind::line, 3, 0);
  const WeightPair wp = build_weight_pair(g);
  const std::string csv = wp.to_csv();
  CHECK(csv.find('\n') != std::string::npos);
  // first entry of W for the 3-line: 1 - 1/tau with tau = 2, i.e. 0.5
  CHECK(std::stod(csv.substr(0, csv.find(','))) ==
        doctest::Approx(0.5).epsilon(1e-12));
  // full precision round trip of the first cell
  CHECK(std::stod(csv.substr(0, csv.find(','))) == wp.w()(0, 0));
}
