#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hypembed/matrix.hpp"

namespace hypembed {

inline constexpr std::size_t kNoNode = std::numeric_limits<std::size_t>::max();

struct Edge {
  std::size_t u;
  std::size_t v;
  double weight;
};

// Undirected graph with positive edge weights and string labels. Node indices
// follow first appearance; adjacency lists follow edge insertion order.
class Graph {
 public:
  std::size_t add_node(const std::string& label);
  // Throws InputError on self-loops, duplicate edges and nonpositive weights.
  void add_edge(std::size_t u, std::size_t v, double weight = 1.0);

  std::size_t size() const noexcept { return labels_.size(); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  // (neighbor, edge index) pairs.
  const std::vector<std::pair<std::size_t, std::size_t>>& neighbors(std::size_t i) const { return adj_[i]; }
  std::size_t degree(std::size_t i) const { return adj_[i].size(); }
  std::size_t max_degree() const;
  const std::string& label(std::size_t i) const { return labels_[i]; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  // kNoNode if absent.
  std::size_t index_of(std::string_view label) const;
  bool has_edge(std::size_t u, std::size_t v) const;
  bool unit_weights() const;
  bool connected() const;
  bool is_tree() const { return connected() && edges_.size() + 1 == size(); }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj_;
};

// Lines "u<TAB>v" or "u<TAB>v<TAB>w"; '#' starts a comment; blank lines are
// skipped. Errors carry the line number.
Graph load_edge_list(std::string_view text);
std::string to_edge_list(const Graph& g);

// A rooted spanning tree. `graph` holds only the tree edges, on the same node
// set and labels as the source graph.
struct WeightedTree {
  Graph graph;
  std::size_t root = 0;
  std::vector<std::size_t> parent;       // kNoNode for the root
  std::vector<double> parent_weight;     // 0 for the root
  std::vector<std::vector<std::size_t>> children;
  std::vector<std::size_t> depth;
  std::vector<std::size_t> order;        // BFS order from the root
};

// BFS spanning tree; neighbor order is edge insertion order. Throws
// InputError if g is disconnected or root is out of range.
WeightedTree bfs_tree(const Graph& g, std::size_t root = 0);

// Reweights every edge from a depth-s node to its child to base^s.
WeightedTree closure_weights(const WeightedTree& t, double base = 2.0);

// Weighted diameter: the longest path between any two nodes.
double weighted_longest_path(const WeightedTree& t);

template <Real R>
struct DistanceMatrix {
  std::vector<std::string> labels;
  Matrix<R> d;
  std::vector<std::uint8_t> mask;  // n*n, 1 = observed; empty means fully observed

  std::size_t size() const noexcept { return labels.size(); }
  bool observed(std::size_t i, std::size_t j) const { return mask.empty() || mask[i * size() + j] != 0; }
  bool fully_observed() const;
  std::size_t observed_pairs() const;  // unordered pairs i < j
};

template <Real To, Real From>
DistanceMatrix<To> convert_distances(const DistanceMatrix<From>& d) {
  return {d.labels, convert_matrix<To>(d.d), d.mask};
}

// Exact graph metric (BFS for unit weights, Dijkstra otherwise). Throws
// InputError naming a disconnected pair.
template <Real R>
DistanceMatrix<R> shortest_path_matrix(const Graph& g);

// Observes every edge pair plus min(floor(ratio*|E|), #non-edges) non-edge
// pairs drawn with the given seed.
template <Real R>
DistanceMatrix<R> sample_matrix(const DistanceMatrix<R>& d, const Graph& g, double ratio, std::uint64_t seed);

// Fills unobserved entries with shortest paths through observed entries.
// Observed entries are kept as they are.
template <Real R>
DistanceMatrix<R> complete_matrix(const DistanceMatrix<R>& d);

// Fixture generators. Labels are decimal node indices (the Steiner center is
// the last node).
Graph balanced_tree(int branching, int depth);
Graph chain_star(int deg_max, int chain_length);
Graph path_graph(int n);
Graph star_graph(int leaves);
Graph clique(int n);
Graph steiner_star(int leaves);  // star with edge weights 1/2
Graph cycle_graph(int n);
// kind in {balanced_tree, chain_star, path, star, clique, steiner_star, cycle}.
Graph gen_fixture(std::string_view kind, const std::vector<int>& params);

}  // namespace hypembed
