#include "cat0/metric.hpp"

#include <cmath>
#include <limits>
#include <queue>
#include <string>

#include "cat0/error.hpp"

namespace cat0 {

FiniteMetricSpace::FiniteMetricSpace(Eigen::MatrixXd dist, double tol) : dist_(std::move(dist)) {
  const auto n = dist_.rows();
  if (n == 0 || dist_.cols() != n) throw InvalidArgument("metric: distance matrix must be square and nonempty");
  double scale = 1.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const double d = dist_(i, j);
      if (!std::isfinite(d) || d < 0.0) throw InvalidArgument("metric: entries must be finite and nonnegative");
      scale = std::max(scale, d);
    }
  const double eps = tol * scale;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (dist_(i, i) > eps) throw InvalidArgument("metric: nonzero diagonal at " + std::to_string(i));
    dist_(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (std::abs(dist_(i, j) - dist_(j, i)) > eps)
        throw InvalidArgument("metric: asymmetric entry (" + std::to_string(i) + "," + std::to_string(j) + ")");
      dist_(j, i) = dist_(i, j);
    }
  }
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index k = 0; k < n; ++k)
        if (dist_(i, j) > dist_(i, k) + dist_(k, j) + eps)
          throw InvalidArgument("metric: triangle inequality fails at (" + std::to_string(i) + "," +
                                std::to_string(j) + "," + std::to_string(k) + ")");
}

FiniteMetricSpace FiniteMetricSpace::uniform(std::size_t n, double d) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n), d);
  m.diagonal().setZero();
  return FiniteMetricSpace(std::move(m));
}

FiniteMetricSpace FiniteMetricSpace::graph_metric(std::size_t n, const std::vector<std::pair<int, int>>& edges,
                                                  double edge_length) {
  std::vector<std::vector<int>> adj(n);
  for (auto [u, v] : edges) {
    if (u < 0 || v < 0 || static_cast<std::size_t>(u) >= n || static_cast<std::size_t>(v) >= n)
      throw InvalidArgument("graph_metric: edge endpoint out of range");
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  const auto N = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd m(N, N);
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<int> hops(n, -1);
    std::queue<int> q;
    hops[s] = 0;
    q.push(static_cast<int>(s));
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (int v : adj[u])
        if (hops[v] < 0) {
          hops[v] = hops[u] + 1;
          q.push(v);
        }
    }
    for (std::size_t t = 0; t < n; ++t) {
      if (hops[t] < 0) throw InvalidArgument("graph_metric: graph is disconnected");
      m(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t)) = hops[t] * edge_length;
    }
  }
  return FiniteMetricSpace(std::move(m));
}

double FiniteMetricSpace::diameter() const { return dist_.maxCoeff(); }

FiniteMetricSpace FiniteMetricSpace::subspace(const std::vector<std::size_t>& idx) const {
  const auto k = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd m(k, k);
  for (Eigen::Index a = 0; a < k; ++a)
    for (Eigen::Index b = 0; b < k; ++b) {
      if (idx[a] >= size() || idx[b] >= size()) throw InvalidArgument("subspace: index out of range");
      m(a, b) = dist_(static_cast<Eigen::Index>(idx[a]), static_cast<Eigen::Index>(idx[b]));
    }
  return FiniteMetricSpace(std::move(m));
}

}  // namespace cat0
