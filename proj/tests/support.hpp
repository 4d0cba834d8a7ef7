#pragma once

#include <algorithm>
#include <numbers>
#include <vector>

#include "cat0/barycenter.hpp"
#include "cat0/graph.hpp"
#include "cat0/random.hpp"
#include "cat0/spaces.hpp"

namespace cat0::testing {

inline constexpr double kPi = std::numbers::pi;

inline ModelSpace tripod() { return MetricTree::star({1.0, 1.0, 1.0}); }

inline ModelSpace heawood_cone() {
  const LabeledGraph h = LabeledGraph::heawood();
  return EuclideanCone(FiniteMetricSpace::graph_metric(h.num_vertices(), h.edges(), kPi / 3));
}

inline Measure heawood_uniform() {
  std::vector<Point> support;
  for (int i = 0; i < 14; ++i) support.push_back(ConePoint::ray(i, 1.0));
  return uniform_measure(heawood_cone(), support);
}

inline std::vector<double> random_weights(Rng& rng, std::size_t m) {
  std::vector<double> w(m);
  double total = 0.0;
  for (auto& x : w) total += (x = uniform(rng, 0.1, 1.0));
  for (auto& x : w) x /= total;
  return w;
}

inline Measure random_measure(const ModelSpace& space, Rng& rng, std::size_t m, double scale = 1.0) {
  Measure mu{space, {}, random_weights(rng, m)};
  for (std::size_t i = 0; i < m; ++i) mu.support.push_back(sample_point(space, rng, scale));
  return mu;
}

inline ModelSpace random_tree(Rng& rng) { return MetricTree::random(3 + uniform_index(rng, 8), rng); }

inline ModelSpace random_tree_product(Rng& rng) {
  return ProductSpace({random_tree(rng), random_tree(rng)});
}

/// Connected graphs on at most 12 vertices: named families plus random ones.
inline std::vector<LabeledGraph> small_graphs(std::size_t count, std::uint64_t seed) {
  std::vector<LabeledGraph> out{LabeledGraph::complete(4), LabeledGraph::cycle(4),   LabeledGraph::cycle(7),
                                LabeledGraph::path(5),     LabeledGraph::star(4),    LabeledGraph::petersen(),
                                LabeledGraph::hypercube(3), LabeledGraph::complete(6)};
  Rng rng = make_rng(seed);
  while (out.size() < count) {
    const std::size_t n = 4 + uniform_index(rng, 9);
    std::vector<LabeledGraph::Edge> edges;
    for (std::size_t v = 1; v < n; ++v) edges.emplace_back(static_cast<int>(uniform_index(rng, v)), static_cast<int>(v));
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t v = u + 1; v < n; ++v)
        if (uniform(rng) < 0.2 &&
            std::find(edges.begin(), edges.end(), LabeledGraph::Edge(static_cast<int>(u), static_cast<int>(v))) ==
                edges.end())
          edges.emplace_back(static_cast<int>(u), static_cast<int>(v));
    out.emplace_back(n, edges);
  }
  out.resize(count);
  return out;
}

}  // namespace cat0::testing
