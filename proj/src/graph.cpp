#include "dsa/graph.hpp"

#include <algorithm>
#include <queue>
#include <random>
#include <sstream>

#include "dsa/errors.hpp"
#include "dsa/rng.hpp"

namespace dsa {

const char* to_string(GraphKind kind) {
  switch (kind) {
    case GraphKind::random: return "random";
    case GraphKind::complete: return "complete";
    case GraphKind::cycle: return "cycle";
    case GraphKind::line: return "line";
    case GraphKind::star: return "star";
  }
  return "?";
}

GraphKind graph_kind_from_string(const std::string& name) {
  if (name == "random") return GraphKind::random;
  if (name == "complete") return GraphKind::complete;
  if (name == "cycle") return GraphKind::cycle;
  if (name == "line") return GraphKind::line;
  if (name == "star") return GraphKind::star;
  throw InvalidParam("unknown graph kind: " + name);
}

Graph::Graph(int n_nodes, std::vector<std::pair<int, int>> edges)
    : n_nodes_(n_nodes) {
  if (n_nodes < 2) throw InvalidParam("graph needs at least 2 nodes");
  adjacency_ = Matrix::Zero(n_nodes, n_nodes);
  for (auto& [u, v] : edges) {
    if (u > v) std::swap(u, v);
    if (u < 0 || v >= n_nodes) throw InvalidParam("edge endpoint out of range");
    if (u == v) throw InvalidParam("self-loop not allowed");
    adjacency_(u, v) = 1.0;
    adjacency_(v, u) = 1.0;
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  edges_ = std::move(edges);
  if (!is_connected(adjacency_))
    throw ConnectivityFailure("graph is not connected");
}

int Graph::degree(int node) const {
  return static_cast<int>(adjacency_.row(node).sum());
}

std::string Graph::to_edge_list() const {
  std::ostringstream os;
  for (const auto& [u, v] : edges_) os << u << " " << v << "\n";
  return os.str();
}

Graph Graph::from_edge_list(const std::string& text) {
  std::istringstream is(text);
  std::vector<std::pair<int, int>> edges;
  int u, v, max_node = -1;
  while (is >> u >> v) {
    edges.emplace_back(u, v);
    max_node = std::max({max_node, u, v});
  }
  return Graph(max_node + 1, std::move(edges));
}

bool is_connected(const Matrix& adjacency) {
  const int n = static_cast<int>(adjacency.rows());
  if (n == 0) return false;
  std::vector<bool> seen(n, false);
  std::queue<int> frontier;
  frontier.push(0);
  seen[0] = true;
  int count = 1;
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop();
    for (int v = 0; v < n; ++v) {
      if (adjacency(u, v) != 0.0 && !seen[v]) {
        seen[v] = true;
        ++count;
        frontier.push(v);
      }
    }
  }
  return count == n;
}

namespace {

std::vector<std::pair<int, int>> random_edges(int n, double p_c,
                                              std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<std::pair<int, int>> edges;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (unif(rng) < p_c) edges.emplace_back(u, v);
  return edges;
}

}  // namespace

Graph generate_graph(GraphKind kind, int n_nodes, std::uint64_t seed,
                     double p_c) {
  if (n_nodes < 2) throw InvalidParam("n_nodes must be >= 2");
  std::vector<std::pair<int, int>> edges;
  switch (kind) {
    case GraphKind::complete:
      for (int u = 0; u < n_nodes; ++u)
        for (int v = u + 1; v < n_nodes; ++v) edges.emplace_back(u, v);
      return Graph(n_nodes, std::move(edges));
    case GraphKind::cycle:
      for (int u = 0; u + 1 < n_nodes; ++u) edges.emplace_back(u, u + 1);
      edges.emplace_back(n_nodes - 1, 0);
      return Graph(n_nodes, std::move(edges));
    case GraphKind::line:
      for (int u = 0; u + 1 < n_nodes; ++u) edges.emplace_back(u, u + 1);
      return Graph(n_nodes, std::move(edges));
    case GraphKind::star:
      for (int v = 1; v < n_nodes; ++v) edges.emplace_back(0, v);
      return Graph(n_nodes, std::move(edges));
    case GraphKind::random: {
      if (!(p_c > 0.0 && p_c <= 1.0))
        throw InvalidParam("edge probability must be in (0, 1]");
      constexpr int kMaxAttempts = 100;
      for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        auto candidate = random_edges(n_nodes, p_c,
                                      mix64(seed ^ mix64(attempt + 1)));
        Matrix adj = Matrix::Zero(n_nodes, n_nodes);
        for (const auto& [u, v] : candidate) {
          adj(u, v) = 1.0;
          adj(v, u) = 1.0;
        }
        if (is_connected(adj)) return Graph(n_nodes, std::move(candidate));
      }
      throw ConnectivityFailure(
          "no connected random graph after 100 attempts (n=" +
          std::to_string(n_nodes) + ", p_c=" + std::to_string(p_c) + ")");
    }
  }
  throw InvalidParam("unknown graph kind");
}

Matrix laplacian(const Graph& g) {
  const Matrix& a = g.adjacency();
  Matrix l = -a;
  l.diagonal() = a.rowwise().sum();
  return l;
}

}  // namespace dsa
