#ifndef DSA_TESTS_TESTUTIL_HPP
#define DSA_TESTS_TESTUTIL_HPP

#include <queue>
#include <random>
#include <vector>

#include "dsa/problem.hpp"
#include "dsa/stacked.hpp"

namespace dsa::testutil {

// Independent reachability oracle (the Graph class has its own check; tests
// must not rely on it).
inline bool bfs_connected(const std::vector<std::pair<int, int>>& edges,
                          int n_nodes) {
  std::vector<std::vector<int>> adj(n_nodes);
  for (const auto& [u, v] : edges) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  std::vector<bool> seen(n_nodes, false);
  std::queue<int> q;
  q.push(0);
  seen[0] = true;
  int count = 1;
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    for (int v : adj[u])
      if (!seen[v]) {
        seen[v] = true;
        ++count;
        q.push(v);
      }
  }
  return count == n_nodes;
}

inline Vector random_point(std::mt19937_64& rng, int dim, double radius) {
  std::uniform_real_distribution<double> unif(-radius, radius);
  Vector x(dim);
  for (int j = 0; j < dim; ++j) x[j] = unif(rng);
  return x;
}

// Central-difference gradient of one instantaneous function.
inline Vector fd_gradient(const ProblemInstance& pi, int node, int i,
                          const Vector& x, double h = 1e-5) {
  Vector g(pi.dim());
  for (int j = 0; j < pi.dim(); ++j) {
    Vector xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    g[j] = (pi.eval(node, i, xp) - pi.eval(node, i, xm)) / (2.0 * h);
  }
  return g;
}

}  // namespace dsa::testutil

#endif  // DSA_TESTS_TESTUTIL_HPP
