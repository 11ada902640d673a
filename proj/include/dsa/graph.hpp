#ifndef DSA_GRAPH_HPP
#define DSA_GRAPH_HPP

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "dsa/stacked.hpp"

namespace dsa {

enum class GraphKind { random, complete, cycle, line, star };

const char* to_string(GraphKind kind);
GraphKind graph_kind_from_string(const std::string& name);

/// Undirected connected graph on nodes 0..N-1. Edges are stored as sorted
/// (u, v) pairs with u < v; the adjacency matrix is symmetric with zero
/// diagonal. Connectivity is enforced at construction.
class Graph {
 public:
  Graph(int n_nodes, std::vector<std::pair<int, int>> edges);

  int n_nodes() const { return n_nodes_; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  const Matrix& adjacency() const { return adjacency_; }
  int degree(int node) const;

  /// One "u v" pair per line, 0-indexed.
  std::string to_edge_list() const;
  static Graph from_edge_list(const std::string& text);

 private:
  int n_nodes_;
  std::vector<std::pair<int, int>> edges_;
  Matrix adjacency_;
};

bool is_connected(const Matrix& adjacency);

/// Builds one of the five supported topologies. Random graphs include each
/// edge independently with probability p_c and are re-drawn (fresh derived
/// seed, at most 100 attempts) until connected.
Graph generate_graph(GraphKind kind, int n_nodes, std::uint64_t seed,
                     double p_c = 0.0);

/// L = D - A. Symmetric PSD, zero row sums, rank N-1 for connected graphs.
Matrix laplacian(const Graph& g);

}  // namespace dsa

#endif  // DSA_GRAPH_HPP
