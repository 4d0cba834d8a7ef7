#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace cat0 {

/// A finite metric space given by its distance matrix.
///
/// Construction validates zero diagonal, symmetry, finiteness, non-negativity
/// and the triangle inequality (tolerance 1e-12, scaled by the largest entry).
class FiniteMetricSpace {
 public:
  FiniteMetricSpace() = default;
  explicit FiniteMetricSpace(Eigen::MatrixXd dist, double tol = 1e-12);

  static FiniteMetricSpace uniform(std::size_t n, double d);
  /// Shortest-path metric of an unweighted graph, each edge of length `edge_length`.
  static FiniteMetricSpace graph_metric(std::size_t n,
                                        const std::vector<std::pair<int, int>>& edges,
                                        double edge_length);

  std::size_t size() const { return static_cast<std::size_t>(dist_.rows()); }
  double operator()(std::size_t i, std::size_t j) const { return dist_(i, j); }
  const Eigen::MatrixXd& matrix() const { return dist_; }
  double diameter() const;

  /// Induced metric on a subset of indices.
  FiniteMetricSpace subspace(const std::vector<std::size_t>& idx) const;

 private:
  Eigen::MatrixXd dist_;
};

}  // namespace cat0
