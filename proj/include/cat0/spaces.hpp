#pragma once

// CAT(0) model spaces: Euclidean spaces, metric trees, Euclidean cones over
// finite metric spaces, and finite l2-products of these.
//
// Space and point values are immutable once built; all operations are pure.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "cat0/metric.hpp"
#include "cat0/random.hpp"

namespace cat0 {

/// A location on a metric graph: either a vertex, or an interior point of an
/// edge at `offset` from the edge's first endpoint.
struct EdgePoint {
  int vertex = -1;
  int edge = -1;
  double offset = 0.0;

  static EdgePoint at_vertex(int v) { return {v, -1, 0.0}; }
  static EdgePoint on_edge(int e, double offset) { return {-1, e, offset}; }
  bool is_vertex() const { return vertex >= 0; }
};

using TreePoint = EdgePoint;

/// Finite graph with positive edge lengths, used as the skeleton of metric
/// trees and of cone bases. Vertex-to-vertex shortest paths are precomputed.
class MetricGraph {
 public:
  struct Edge {
    int u;
    int v;
    double length;
  };

  MetricGraph() = default;
  MetricGraph(std::size_t num_vertices, std::vector<Edge> edges);

  std::size_t num_vertices() const { return n_; }
  const std::vector<Edge>& edges() const { return edges_; }
  /// (neighbour, edge id) pairs.
  const std::vector<std::pair<int, int>>& incident(int v) const { return adj_[static_cast<std::size_t>(v)]; }
  /// Infinity when disconnected.
  double vertex_distance(int a, int b) const { return dist_(a, b); }
  std::vector<int> vertex_path(int a, int b) const;
  int edge_between(int a, int b) const;

  void validate(const EdgePoint& p) const;
  EdgePoint canonical(const EdgePoint& p) const;
  double distance(const EdgePoint& p, const EdgePoint& q) const;
  /// Point at arclength `s` along a shortest path from p to q.
  EdgePoint along(const EdgePoint& p, const EdgePoint& q, double s) const;
  /// First edge of a shortest path from p to q, with the endpoint it heads
  /// toward. Requires p != q.
  std::pair<int, int> first_step(const EdgePoint& p, const EdgePoint& q) const;
  /// Directions (edge id, vertex headed toward) available at p.
  std::vector<std::pair<int, int>> directions(const EdgePoint& p) const;
  /// Farthest point reachable from p by a shortest path leaving along `dir`,
  /// with its distance from p.
  std::pair<EdgePoint, double> farthest_along(const EdgePoint& p, std::pair<int, int> dir) const;
  EdgePoint random_point(Rng& rng) const;

 private:
  std::vector<EdgePoint> waypoints(const EdgePoint& p, const EdgePoint& q) const;
  double offset_on(int edge, const EdgePoint& p) const;

  std::size_t n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::pair<int, int>>> adj_;
  Eigen::MatrixXd dist_;
  Eigen::MatrixXi next_;
};

struct EuclideanSpace {
  std::size_t dimension = 1;
};

/// A finite metric tree: connected, acyclic, positive edge lengths.
class MetricTree {
 public:
  MetricTree(std::size_t num_vertices, std::vector<MetricGraph::Edge> edges);

  /// Star with one leg per entry of `legs`; the hub is vertex 0.
  static MetricTree star(const std::vector<double>& legs);
  /// Path 0-1-...-k with the given consecutive edge lengths.
  static MetricTree path(const std::vector<double>& lengths);
  static MetricTree random(std::size_t num_vertices, Rng& rng, double min_len = 0.2, double max_len = 2.0);

  const MetricGraph& graph() const { return graph_; }
  std::size_t num_vertices() const { return graph_.num_vertices(); }

 private:
  MetricGraph graph_;
};

/// Point of a Euclidean cone: a direction in the base and a radius.
/// All radius-zero points are the origin O.
struct ConePoint {
  EdgePoint direction = EdgePoint::at_vertex(0);
  double radius = 0.0;

  static ConePoint origin() { return {}; }
  static ConePoint ray(int base_point, double radius) { return {EdgePoint::at_vertex(base_point), radius}; }
  bool is_origin() const { return radius <= 0.0; }
};

/// Euclidean cone over a finite metric space X.
///
/// X is completed to a metric graph whose edges are the primitive pairs
/// (d < pi with no intermediate point z, d(x,z) + d(z,y) = d(x,y)); distances
/// between points of X are unchanged and cone geodesics unroll into flat
/// sectors along base paths.
class EuclideanCone {
 public:
  explicit EuclideanCone(FiniteMetricSpace base);

  const FiniteMetricSpace& base() const { return base_; }
  const MetricGraph& skeleton() const { return skeleton_; }
  /// min(pi, d) between two base directions.
  double angle(const EdgePoint& a, const EdgePoint& b) const;

 private:
  FiniteMetricSpace base_;
  MetricGraph skeleton_;
};

class ModelSpace;

class ProductSpace {
 public:
  explicit ProductSpace(std::vector<ModelSpace> factors);
  const std::vector<ModelSpace>& factors() const { return factors_; }

 private:
  std::vector<ModelSpace> factors_;
};

struct EuclideanPoint {
  Eigen::VectorXd x;
};

struct Point;

struct ProductPoint {
  std::vector<Point> factors;
};

struct Point {
  std::variant<EuclideanPoint, TreePoint, ConePoint, ProductPoint> value;

  Point() = default;
  Point(EuclideanPoint p) : value(std::move(p)) {}
  Point(TreePoint p) : value(p) {}
  Point(ConePoint p) : value(p) {}
  Point(ProductPoint p) : value(std::move(p)) {}

  static Point euclidean(std::initializer_list<double> xs);
  static Point euclidean(const Eigen::VectorXd& x) { return Point(EuclideanPoint{x}); }

  template <class T>
  const T& as() const { return std::get<T>(value); }
};

enum class SpaceKind { Euclidean, Tree, Cone, Product };

/// Tagged union of the model spaces. Copies share the immutable payload.
class ModelSpace {
 public:
  using Variant = std::variant<EuclideanSpace, MetricTree, EuclideanCone, ProductSpace>;

  ModelSpace(EuclideanSpace s);
  ModelSpace(MetricTree s);
  ModelSpace(EuclideanCone s);
  ModelSpace(ProductSpace s);

  SpaceKind kind() const;
  const Variant& variant() const { return *impl_; }
  template <class T>
  const T& as() const { return std::get<T>(*impl_); }

 private:
  std::shared_ptr<const Variant> impl_;
};

std::string to_string(SpaceKind k);

/// Throws InvalidArgument when p is not a point of the space.
void validate_point(const ModelSpace& space, const Point& p);
Point canonicalize(const ModelSpace& space, const Point& p);
bool same_point(const ModelSpace& space, const Point& p, const Point& q, double tol = 1e-12);

double distance(const ModelSpace& space, const Point& p, const Point& q);

/// Cone homothety (x, r) -> (x, c r). Throws on c <= 0.
ConePoint scale_cone_point(const EuclideanCone& cone, const ConePoint& v, double c);

/// Constant-speed geodesic between two points.
class GeodesicSegment {
 public:
  GeodesicSegment(ModelSpace space, Point p, Point q);

  Point eval(double t) const;
  double length() const { return length_; }
  const Point& start() const { return p_; }
  const Point& end() const { return q_; }

 private:
  ModelSpace space_;
  Point p_;
  Point q_;
  double length_;
};

GeodesicSegment geodesic(const ModelSpace& space, const Point& p, const Point& q);

/// Angle at p of the Euclidean comparison triangle of (p, q, r).
double comparison_angle(const ModelSpace& space, const Point& p, const Point& q, const Point& r);

struct AngleOptions {
  int shrink_steps = 40;
  double t0 = 1.0;
  double tol = 1e-7;
};

/// Alexandrov angle at p between the geodesics toward q and r. Exact for trees,
/// Euclidean spaces and cone origins; otherwise the limit of comparison angles
/// along t_k = t0 2^-k.
double alexandrov_angle(const ModelSpace& space, const Point& p, const Point& q, const Point& r,
                        const AngleOptions& opts = {});

/// Tangent cone of a metric tree at p: the cone over its directions (pairwise pi).
struct TreeTangentCone {
  MetricTree tree;
  TreePoint base;
  std::vector<std::pair<int, int>> directions;  // (edge, vertex headed toward)
  EuclideanCone cone;

  /// pi_p(q) = (direction of q, d(p, q)).
  ConePoint log_map(const TreePoint& q) const;
};

TreeTangentCone tree_tangent_cone(const MetricTree& tree, const TreePoint& p);

struct Cat0Violation {
  Point p, q, r;
  int side_a = 0;
  int side_b = 0;
  double s = 0.0;
  double t = 0.0;
  double actual = 0.0;
  double comparison = 0.0;
};

struct Cat0Report {
  std::size_t samples = 0;
  std::size_t violations = 0;
  double max_excess = 0.0;
  std::vector<Cat0Violation> examples;  // first few, for diagnosis
};

/// Samples geodesic triangles and checks d(gamma_i(s), gamma_j(t)) against the
/// Euclidean comparison triangle.
Cat0Report verify_cat0_sample(const ModelSpace& space, std::size_t num_samples, std::uint64_t seed,
                              double tol = 1e-9, double scale = 1.0);

/// Random point, roughly within `scale` of a base point of the space.
Point sample_point(const ModelSpace& space, Rng& rng, double scale = 1.0);

/// A point q' with p the midpoint of q and q', when the space offers one.
std::optional<Point> reflect_through(const ModelSpace& space, const Point& p, const Point& q, Rng& rng);

}  // namespace cat0
