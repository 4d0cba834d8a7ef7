#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace cat0 {

/// Finite simple graph. Edge k is stored as (u, v) and, when the graph is
/// oriented, points from u to v. Labels are signed generator indices
/// (+i for s_i, -i for its inverse), one per edge, or empty.
class LabeledGraph {
 public:
  using Edge = std::pair<int, int>;

  LabeledGraph() = default;
  /// Throws InvalidArgument on self-loops, duplicates or out-of-range vertices.
  LabeledGraph(std::size_t num_vertices, std::vector<Edge> edges);

  static LabeledGraph cycle(std::size_t n);
  static LabeledGraph path(std::size_t n);
  static LabeledGraph complete(std::size_t n);
  static LabeledGraph star(std::size_t leaves);
  static LabeledGraph petersen();
  static LabeledGraph heawood();
  /// 3-dimensional hypercube and friends.
  static LabeledGraph hypercube(int dim);

  std::size_t num_vertices() const { return n_; }
  std::size_t num_edges() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<int>& neighbors(int v) const { return adj_[static_cast<std::size_t>(v)]; }
  int degree(int v) const { return static_cast<int>(adj_[static_cast<std::size_t>(v)].size()); }
  std::vector<int> degrees() const;
  int max_degree() const;
  int min_degree() const;
  bool is_connected() const;
  Eigen::MatrixXd adjacency() const;
  /// BFS distances from `source`; -1 for unreachable vertices.
  std::vector<int> bfs(int source) const;

  bool oriented() const { return oriented_; }
  int num_generators() const { return generators_; }
  const std::vector<int>& labels() const { return labels_; }
  /// Sets orientation flags and labels; `labels` must be empty or one per edge with 1 <= |label| <= k.
  void set_labels(int num_generators, std::vector<int> labels);
  /// Reverses the stored direction of edge k.
  void flip(std::size_t k);

 private:
  std::size_t n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> adj_;
  bool oriented_ = false;
  int generators_ = 0;
  std::vector<int> labels_;
};

}  // namespace cat0
