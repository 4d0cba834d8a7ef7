#include "cat0/graph.hpp"

#include <algorithm>
#include <queue>
#include <set>

#include "cat0/error.hpp"

namespace cat0 {

LabeledGraph::LabeledGraph(std::size_t n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)), adj_(n) {
  std::set<Edge> seen;
  for (const auto& [u, v] : edges_) {
    if (u < 0 || v < 0 || static_cast<std::size_t>(u) >= n || static_cast<std::size_t>(v) >= n)
      throw InvalidArgument("graph: vertex index out of range");
    if (u == v) throw InvalidArgument("graph: self-loop at vertex " + std::to_string(u));
    if (!seen.insert({std::min(u, v), std::max(u, v)}).second)
      throw InvalidArgument("graph: duplicate edge " + std::to_string(u) + "-" + std::to_string(v));
    adj_[static_cast<std::size_t>(u)].push_back(v);
    adj_[static_cast<std::size_t>(v)].push_back(u);
  }
}

LabeledGraph LabeledGraph::cycle(std::size_t n) {
  if (n < 3) throw InvalidArgument("cycle graph needs at least 3 vertices");
  std::vector<Edge> e;
  for (std::size_t i = 0; i < n; ++i) e.emplace_back(static_cast<int>(i), static_cast<int>((i + 1) % n));
  return {n, e};
}

LabeledGraph LabeledGraph::path(std::size_t n) {
  std::vector<Edge> e;
  for (std::size_t i = 0; i + 1 < n; ++i) e.emplace_back(static_cast<int>(i), static_cast<int>(i + 1));
  return {n, e};
}

LabeledGraph LabeledGraph::complete(std::size_t n) {
  std::vector<Edge> e;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) e.emplace_back(static_cast<int>(i), static_cast<int>(j));
  return {n, e};
}

LabeledGraph LabeledGraph::star(std::size_t leaves) {
  std::vector<Edge> e;
  for (std::size_t i = 1; i <= leaves; ++i) e.emplace_back(0, static_cast<int>(i));
  return {leaves + 1, e};
}

LabeledGraph LabeledGraph::petersen() {
  std::vector<Edge> e;
  for (int i = 0; i < 5; ++i) {
    e.emplace_back(i, (i + 1) % 5);
    e.emplace_back(i, i + 5);
    e.emplace_back(5 + i, 5 + (i + 2) % 5);
  }
  return {10, e};
}

LabeledGraph LabeledGraph::heawood() {
  // Incidence graph of the Fano plane: point i lies on lines i, i+1, i+3 (mod 7).
  std::vector<Edge> e;
  for (int i = 0; i < 7; ++i)
    for (int s : {0, 1, 3}) e.emplace_back(i, 7 + (i + s) % 7);
  return {14, e};
}

LabeledGraph LabeledGraph::hypercube(int dim) {
  if (dim < 1 || dim > 20) throw InvalidArgument("hypercube dimension out of range");
  const int n = 1 << dim;
  std::vector<Edge> e;
  for (int v = 0; v < n; ++v)
    for (int b = 0; b < dim; ++b)
      if (!(v & (1 << b))) e.emplace_back(v, v | (1 << b));
  return {static_cast<std::size_t>(n), e};
}

std::vector<int> LabeledGraph::degrees() const {
  std::vector<int> d(n_);
  for (std::size_t v = 0; v < n_; ++v) d[v] = static_cast<int>(adj_[v].size());
  return d;
}

int LabeledGraph::max_degree() const {
  int m = 0;
  for (const auto& a : adj_) m = std::max(m, static_cast<int>(a.size()));
  return m;
}

int LabeledGraph::min_degree() const {
  if (n_ == 0) return 0;
  int m = static_cast<int>(adj_[0].size());
  for (const auto& a : adj_) m = std::min(m, static_cast<int>(a.size()));
  return m;
}

std::vector<int> LabeledGraph::bfs(int source) const {
  std::vector<int> dist(n_, -1);
  std::queue<int> q;
  dist[static_cast<std::size_t>(source)] = 0;
  q.push(source);
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    for (int w : adj_[static_cast<std::size_t>(u)])
      if (dist[static_cast<std::size_t>(w)] < 0) {
        dist[static_cast<std::size_t>(w)] = dist[static_cast<std::size_t>(u)] + 1;
        q.push(w);
      }
  }
  return dist;
}

bool LabeledGraph::is_connected() const {
  if (n_ == 0) return false;
  const auto d = bfs(0);
  return std::none_of(d.begin(), d.end(), [](int x) { return x < 0; });
}

Eigen::MatrixXd LabeledGraph::adjacency() const {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
  for (const auto& [u, v] : edges_) {
    A(u, v) = 1.0;
    A(v, u) = 1.0;
  }
  return A;
}

void LabeledGraph::set_labels(int k, std::vector<int> labels) {
  if (k < 1) throw InvalidArgument("labels need at least one generator");
  if (!labels.empty() && labels.size() != edges_.size()) throw InvalidArgument("expected one label per edge");
  for (int l : labels)
    if (l == 0 || std::abs(l) > k) throw InvalidArgument("label out of range");
  oriented_ = true;
  generators_ = k;
  labels_ = std::move(labels);
}

void LabeledGraph::flip(std::size_t k) {
  if (k >= edges_.size()) throw InvalidArgument("edge index out of range");
  std::swap(edges_[k].first, edges_[k].second);
  oriented_ = true;
}

}  // namespace cat0
