#include "cat0/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <string>

#include "cat0/error.hpp"

namespace cat0 {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

double snap_tol(double len) { return 1e-12 * std::max(1.0, len); }

}  // namespace

// ---------------------------------------------------------------------------
// MetricGraph

MetricGraph::MetricGraph(std::size_t num_vertices, std::vector<Edge> edges)
    : n_(num_vertices), edges_(std::move(edges)), adj_(num_vertices) {
  if (n_ == 0) throw InvalidArgument("metric graph: no vertices");
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const auto& ed = edges_[e];
    if (ed.u < 0 || ed.v < 0 || static_cast<std::size_t>(ed.u) >= n_ || static_cast<std::size_t>(ed.v) >= n_)
      throw InvalidArgument("metric graph: edge " + std::to_string(e) + " endpoint out of range");
    if (ed.u == ed.v) throw InvalidArgument("metric graph: self-loop at edge " + std::to_string(e));
    if (!(ed.length > 0.0) || !std::isfinite(ed.length))
      throw InvalidArgument("metric graph: edge " + std::to_string(e) + " needs a positive finite length");
    adj_[static_cast<std::size_t>(ed.u)].emplace_back(ed.v, static_cast<int>(e));
    adj_[static_cast<std::size_t>(ed.v)].emplace_back(ed.u, static_cast<int>(e));
  }

  const auto N = static_cast<Eigen::Index>(n_);
  dist_ = Eigen::MatrixXd::Constant(N, N, kInf);
  next_ = Eigen::MatrixXi::Constant(N, N, -1);
  using Item = std::pair<double, int>;
  for (std::size_t target = 0; target < n_; ++target) {
    // Dijkstra from `target`; the predecessor of v is its next hop toward target.
    std::vector<double> d(n_, kInf);
    std::vector<int> pred(n_, -1);
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    d[target] = 0.0;
    pq.emplace(0.0, static_cast<int>(target));
    while (!pq.empty()) {
      auto [du, u] = pq.top();
      pq.pop();
      if (du > d[static_cast<std::size_t>(u)]) continue;
      for (auto [w, e] : adj_[static_cast<std::size_t>(u)]) {
        const double nd = du + edges_[static_cast<std::size_t>(e)].length;
        if (nd < d[static_cast<std::size_t>(w)]) {
          d[static_cast<std::size_t>(w)] = nd;
          pred[static_cast<std::size_t>(w)] = u;
          pq.emplace(nd, w);
        }
      }
    }
    for (std::size_t v = 0; v < n_; ++v) {
      dist_(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(target)) = d[v];
      next_(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(target)) = pred[v];
    }
  }
}

std::vector<int> MetricGraph::vertex_path(int a, int b) const {
  std::vector<int> path{a};
  if (!std::isfinite(dist_(a, b))) throw InvalidArgument("metric graph: vertices are disconnected");
  int cur = a;
  while (cur != b) {
    cur = next_(cur, b);
    path.push_back(cur);
  }
  return path;
}

int MetricGraph::edge_between(int a, int b) const {
  int best = -1;
  for (auto [w, e] : adj_[static_cast<std::size_t>(a)])
    if (w == b && (best < 0 || edges_[static_cast<std::size_t>(e)].length < edges_[static_cast<std::size_t>(best)].length))
      best = e;
  return best;
}

void MetricGraph::validate(const EdgePoint& p) const {
  if (p.is_vertex()) {
    if (static_cast<std::size_t>(p.vertex) >= n_) throw InvalidArgument("graph point: vertex out of range");
    return;
  }
  if (p.edge < 0 || static_cast<std::size_t>(p.edge) >= edges_.size())
    throw InvalidArgument("graph point: edge out of range");
  const double len = edges_[static_cast<std::size_t>(p.edge)].length;
  if (!std::isfinite(p.offset) || p.offset < -snap_tol(len) || p.offset > len + snap_tol(len))
    throw InvalidArgument("graph point: offset outside its edge");
}

EdgePoint MetricGraph::canonical(const EdgePoint& p) const {
  if (p.is_vertex()) return EdgePoint::at_vertex(p.vertex);
  const auto& ed = edges_[static_cast<std::size_t>(p.edge)];
  if (p.offset <= snap_tol(ed.length)) return EdgePoint::at_vertex(ed.u);
  if (p.offset >= ed.length - snap_tol(ed.length)) return EdgePoint::at_vertex(ed.v);
  return p;
}

double MetricGraph::offset_on(int edge, const EdgePoint& p) const {
  const auto& ed = edges_[static_cast<std::size_t>(edge)];
  if (p.is_vertex()) return p.vertex == ed.u ? 0.0 : ed.length;
  return p.offset;
}

namespace {

struct End {
  int vertex;
  double dist;
};

std::vector<End> ends_of(const MetricGraph& g, const EdgePoint& p) {
  if (p.is_vertex()) return {{p.vertex, 0.0}};
  const auto& ed = g.edges()[static_cast<std::size_t>(p.edge)];
  return {{ed.u, p.offset}, {ed.v, ed.length - p.offset}};
}

}  // namespace

double MetricGraph::distance(const EdgePoint& p0, const EdgePoint& q0) const {
  const EdgePoint p = canonical(p0);
  const EdgePoint q = canonical(q0);
  double best = kInf;
  if (!p.is_vertex() && !q.is_vertex() && p.edge == q.edge) best = std::abs(p.offset - q.offset);
  for (const End& a : ends_of(*this, p))
    for (const End& b : ends_of(*this, q)) best = std::min(best, a.dist + dist_(a.vertex, b.vertex) + b.dist);
  return best;
}

std::vector<EdgePoint> MetricGraph::waypoints(const EdgePoint& p0, const EdgePoint& q0) const {
  const EdgePoint p = canonical(p0);
  const EdgePoint q = canonical(q0);
  double best = kInf;
  bool direct = false;
  if (!p.is_vertex() && !q.is_vertex() && p.edge == q.edge) {
    best = std::abs(p.offset - q.offset);
    direct = true;
  }
  int ba = -1, bb = -1;
  for (const End& a : ends_of(*this, p))
    for (const End& b : ends_of(*this, q)) {
      const double d = a.dist + dist_(a.vertex, b.vertex) + b.dist;
      if (d < best - 1e-15) {
        best = d;
        ba = a.vertex;
        bb = b.vertex;
        direct = false;
      }
    }
  if (!std::isfinite(best)) throw InvalidArgument("metric graph: points are disconnected");
  std::vector<EdgePoint> out{p};
  if (!direct) {
    for (int v : vertex_path(ba, bb)) {
      if (out.back().is_vertex() && out.back().vertex == v) continue;
      out.push_back(EdgePoint::at_vertex(v));
    }
  }
  if (!(q.is_vertex() && out.back().is_vertex() && out.back().vertex == q.vertex)) out.push_back(q);
  return out;
}

namespace {

int common_edge(const MetricGraph& g, const EdgePoint& a, const EdgePoint& b) {
  if (!a.is_vertex()) return a.edge;
  if (!b.is_vertex()) return b.edge;
  return g.edge_between(a.vertex, b.vertex);
}

}  // namespace

EdgePoint MetricGraph::along(const EdgePoint& p, const EdgePoint& q, double s) const {
  const auto wp = waypoints(p, q);
  if (s <= 0.0) return wp.front();
  for (std::size_t k = 0; k + 1 < wp.size(); ++k) {
    const int e = common_edge(*this, wp[k], wp[k + 1]);
    const double o1 = offset_on(e, wp[k]);
    const double o2 = offset_on(e, wp[k + 1]);
    const double len = std::abs(o2 - o1);
    if (s <= len) {
      const double o = o1 + (o2 > o1 ? s : -s);
      return canonical(EdgePoint::on_edge(e, o));
    }
    s -= len;
  }
  return wp.back();
}

std::pair<int, int> MetricGraph::first_step(const EdgePoint& p, const EdgePoint& q) const {
  const auto wp = waypoints(p, q);
  if (wp.size() < 2) throw InvalidArgument("first_step: points coincide");
  const int e = common_edge(*this, wp[0], wp[1]);
  const auto& ed = edges_[static_cast<std::size_t>(e)];
  return {e, offset_on(e, wp[1]) > offset_on(e, wp[0]) ? ed.v : ed.u};
}

std::vector<std::pair<int, int>> MetricGraph::directions(const EdgePoint& p0) const {
  const EdgePoint p = canonical(p0);
  std::vector<std::pair<int, int>> out;
  if (p.is_vertex()) {
    for (auto [w, e] : adj_[static_cast<std::size_t>(p.vertex)]) out.emplace_back(e, w);
  } else {
    const auto& ed = edges_[static_cast<std::size_t>(p.edge)];
    out.emplace_back(p.edge, ed.u);
    out.emplace_back(p.edge, ed.v);
  }
  return out;
}

std::pair<EdgePoint, double> MetricGraph::farthest_along(const EdgePoint& p, std::pair<int, int> dir) const {
  EdgePoint best = EdgePoint::at_vertex(dir.second);
  double best_d = distance(p, best);
  for (std::size_t v = 0; v < n_; ++v) {
    const EdgePoint x = EdgePoint::at_vertex(static_cast<int>(v));
    const double d = distance(p, x);
    if (d <= best_d || d < 1e-15) continue;
    if (first_step(p, x) == dir) {
      best = x;
      best_d = d;
    }
  }
  return {best, best_d};
}

EdgePoint MetricGraph::random_point(Rng& rng) const {
  if (edges_.empty() || uniform(rng) < 0.25)
    return EdgePoint::at_vertex(static_cast<int>(uniform_index(rng, n_)));
  const int e = static_cast<int>(uniform_index(rng, edges_.size()));
  return canonical(EdgePoint::on_edge(e, uniform(rng, 0.0, edges_[static_cast<std::size_t>(e)].length)));
}

// ---------------------------------------------------------------------------
// MetricTree

MetricTree::MetricTree(std::size_t num_vertices, std::vector<MetricGraph::Edge> edges)
    : graph_(num_vertices, std::move(edges)) {
  if (graph_.edges().size() + 1 != num_vertices) throw InvalidArgument("metric tree: needs exactly n-1 edges");
  for (std::size_t v = 1; v < num_vertices; ++v)
    if (!std::isfinite(graph_.vertex_distance(0, static_cast<int>(v))))
      throw InvalidArgument("metric tree: graph is disconnected");
}

MetricTree MetricTree::star(const std::vector<double>& legs) {
  std::vector<MetricGraph::Edge> edges;
  for (std::size_t i = 0; i < legs.size(); ++i) edges.push_back({0, static_cast<int>(i + 1), legs[i]});
  return MetricTree(legs.size() + 1, std::move(edges));
}

MetricTree MetricTree::path(const std::vector<double>& lengths) {
  std::vector<MetricGraph::Edge> edges;
  for (std::size_t i = 0; i < lengths.size(); ++i)
    edges.push_back({static_cast<int>(i), static_cast<int>(i + 1), lengths[i]});
  return MetricTree(lengths.size() + 1, std::move(edges));
}

MetricTree MetricTree::random(std::size_t num_vertices, Rng& rng, double min_len, double max_len) {
  std::vector<MetricGraph::Edge> edges;
  for (std::size_t v = 1; v < num_vertices; ++v)
    edges.push_back({static_cast<int>(uniform_index(rng, v)), static_cast<int>(v), uniform(rng, min_len, max_len)});
  return MetricTree(num_vertices, std::move(edges));
}

// ---------------------------------------------------------------------------
// EuclideanCone

namespace {

MetricGraph cone_skeleton(const FiniteMetricSpace& X) {
  const std::size_t n = X.size();
  const double eps = 1e-9 * std::max(1.0, X.diameter());
  std::vector<MetricGraph::Edge> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = X(i, j);
      if (d <= eps) throw InvalidArgument("cone base: distinct base points at distance zero");
      if (d >= kPi - eps) continue;
      bool primitive = true;
      for (std::size_t z = 0; z < n && primitive; ++z) {
        if (z == i || z == j) continue;
        if (X(i, z) + X(z, j) <= d + eps) primitive = false;
      }
      if (primitive) edges.push_back({static_cast<int>(i), static_cast<int>(j), d});
    }
  return MetricGraph(n, std::move(edges));
}

}  // namespace

EuclideanCone::EuclideanCone(FiniteMetricSpace base) : base_(std::move(base)), skeleton_(cone_skeleton(base_)) {}

double EuclideanCone::angle(const EdgePoint& a, const EdgePoint& b) const {
  if (a.is_vertex() && b.is_vertex())
    return std::min(kPi, base_(static_cast<std::size_t>(a.vertex), static_cast<std::size_t>(b.vertex)));
  return std::min(kPi, skeleton_.distance(a, b));
}

// ---------------------------------------------------------------------------
// ModelSpace

ProductSpace::ProductSpace(std::vector<ModelSpace> factors) : factors_(std::move(factors)) {
  if (factors_.empty()) throw InvalidArgument("product space: needs at least one factor");
}

ModelSpace::ModelSpace(EuclideanSpace s) {
  if (s.dimension == 0) throw InvalidArgument("euclidean space: dimension must be positive");
  impl_ = std::make_shared<const Variant>(s);
}
ModelSpace::ModelSpace(MetricTree s) : impl_(std::make_shared<const Variant>(std::move(s))) {}
ModelSpace::ModelSpace(EuclideanCone s) : impl_(std::make_shared<const Variant>(std::move(s))) {}
ModelSpace::ModelSpace(ProductSpace s) : impl_(std::make_shared<const Variant>(std::move(s))) {}

SpaceKind ModelSpace::kind() const { return static_cast<SpaceKind>(impl_->index()); }

std::string to_string(SpaceKind k) {
  switch (k) {
    case SpaceKind::Euclidean: return "euclidean";
    case SpaceKind::Tree: return "tree";
    case SpaceKind::Cone: return "cone";
    case SpaceKind::Product: return "product";
  }
  return "unknown";
}

Point Point::euclidean(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return Point(EuclideanPoint{v});
}

namespace {

template <class T>
const T& expect(const Point& p, const char* what) {
  if (!std::holds_alternative<T>(p.value))
    throw InvalidArgument(std::string("point/space mismatch: expected a ") + what + " point");
  return std::get<T>(p.value);
}

}  // namespace

void validate_point(const ModelSpace& space, const Point& p) {
  switch (space.kind()) {
    case SpaceKind::Euclidean: {
      const auto& e = expect<EuclideanPoint>(p, "euclidean");
      if (static_cast<std::size_t>(e.x.size()) != space.as<EuclideanSpace>().dimension)
        throw InvalidArgument("point/space mismatch: wrong dimension");
      if (!e.x.allFinite()) throw InvalidArgument("euclidean point: non-finite coordinate");
      return;
    }
    case SpaceKind::Tree:
      space.as<MetricTree>().graph().validate(expect<TreePoint>(p, "tree"));
      return;
    case SpaceKind::Cone: {
      const auto& c = expect<ConePoint>(p, "cone");
      if (!std::isfinite(c.radius) || c.radius < 0.0) throw InvalidArgument("cone point: radius must be >= 0");
      space.as<EuclideanCone>().skeleton().validate(c.direction);
      return;
    }
    case SpaceKind::Product: {
      const auto& pp = expect<ProductPoint>(p, "product");
      const auto& f = space.as<ProductSpace>().factors();
      if (pp.factors.size() != f.size()) throw InvalidArgument("point/space mismatch: tuple arity differs");
      for (std::size_t k = 0; k < f.size(); ++k) validate_point(f[k], pp.factors[k]);
      return;
    }
  }
}

Point canonicalize(const ModelSpace& space, const Point& p) {
  validate_point(space, p);
  switch (space.kind()) {
    case SpaceKind::Euclidean: return p;
    case SpaceKind::Tree: return Point(space.as<MetricTree>().graph().canonical(p.as<TreePoint>()));
    case SpaceKind::Cone: {
      const auto& c = p.as<ConePoint>();
      if (c.radius <= 0.0) return Point(ConePoint::origin());
      return Point(ConePoint{space.as<EuclideanCone>().skeleton().canonical(c.direction), c.radius});
    }
    case SpaceKind::Product: {
      ProductPoint out;
      const auto& f = space.as<ProductSpace>().factors();
      for (std::size_t k = 0; k < f.size(); ++k) out.factors.push_back(canonicalize(f[k], p.as<ProductPoint>().factors[k]));
      return Point(std::move(out));
    }
  }
  return p;
}

bool same_point(const ModelSpace& space, const Point& p, const Point& q, double tol) {
  return distance(space, p, q) <= tol;
}

namespace {

double cone_distance(const EuclideanCone& cone, const ConePoint& a, const ConePoint& b) {
  if (a.radius <= 0.0) return b.radius;
  if (b.radius <= 0.0) return a.radius;
  const double theta = cone.angle(a.direction, b.direction);
  const double s = std::sin(0.5 * theta);
  const double dr = a.radius - b.radius;
  return std::sqrt(std::max(0.0, dr * dr + 4.0 * a.radius * b.radius * s * s));
}

double distance_impl(const ModelSpace& space, const Point& p, const Point& q) {
  switch (space.kind()) {
    case SpaceKind::Euclidean: return (p.as<EuclideanPoint>().x - q.as<EuclideanPoint>().x).norm();
    case SpaceKind::Tree: return space.as<MetricTree>().graph().distance(p.as<TreePoint>(), q.as<TreePoint>());
    case SpaceKind::Cone: return cone_distance(space.as<EuclideanCone>(), p.as<ConePoint>(), q.as<ConePoint>());
    case SpaceKind::Product: {
      const auto& f = space.as<ProductSpace>().factors();
      double s = 0.0;
      for (std::size_t k = 0; k < f.size(); ++k) {
        const double d = distance_impl(f[k], p.as<ProductPoint>().factors[k], q.as<ProductPoint>().factors[k]);
        s += d * d;
      }
      return std::sqrt(s);
    }
  }
  return 0.0;
}

}  // namespace

double distance(const ModelSpace& space, const Point& p, const Point& q) {
  validate_point(space, p);
  validate_point(space, q);
  return distance_impl(space, p, q);
}

ConePoint scale_cone_point(const EuclideanCone& cone, const ConePoint& v, double c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw InvalidArgument("scale_cone_point: factor must be positive");
  cone.skeleton().validate(v.direction);
  if (v.radius <= 0.0) return ConePoint::origin();
  return ConePoint{v.direction, c * v.radius};
}

// ---------------------------------------------------------------------------
// Geodesics

GeodesicSegment::GeodesicSegment(ModelSpace space, Point p, Point q)
    : space_(std::move(space)), p_(std::move(p)), q_(std::move(q)), length_(distance(space_, p_, q_)) {}

namespace {

Point eval_impl(const ModelSpace& space, const Point& p, const Point& q, double t) {
  switch (space.kind()) {
    case SpaceKind::Euclidean:
      return Point::euclidean((1.0 - t) * p.as<EuclideanPoint>().x + t * q.as<EuclideanPoint>().x);
    case SpaceKind::Tree: {
      const auto& g = space.as<MetricTree>().graph();
      const auto& a = p.as<TreePoint>();
      const auto& b = q.as<TreePoint>();
      return Point(g.along(a, b, t * g.distance(a, b)));
    }
    case SpaceKind::Cone: {
      const auto& cone = space.as<EuclideanCone>();
      const auto& a = p.as<ConePoint>();
      const auto& b = q.as<ConePoint>();
      if (a.radius <= 0.0 && b.radius <= 0.0) return Point(ConePoint::origin());
      if (a.radius <= 0.0) return Point(ConePoint{b.direction, t * b.radius});
      if (b.radius <= 0.0) return Point(ConePoint{a.direction, (1.0 - t) * a.radius});
      const double theta = cone.angle(a.direction, b.direction);
      if (theta >= kPi) {
        const double s = t * (a.radius + b.radius);
        if (s <= a.radius) return Point(ConePoint{a.direction, a.radius - s});
        return Point(ConePoint{b.direction, s - a.radius});
      }
      // Unroll the two rays into a flat sector of opening angle theta.
      const double x = (1.0 - t) * a.radius + t * b.radius * std::cos(theta);
      const double y = t * b.radius * std::sin(theta);
      const double rho = std::hypot(x, y);
      if (rho <= 0.0) return Point(ConePoint::origin());
      const double phi = std::clamp(std::atan2(y, x), 0.0, theta);
      return Point(ConePoint{cone.skeleton().along(a.direction, b.direction, phi), rho});
    }
    case SpaceKind::Product: {
      const auto& f = space.as<ProductSpace>().factors();
      ProductPoint out;
      for (std::size_t k = 0; k < f.size(); ++k)
        out.factors.push_back(eval_impl(f[k], p.as<ProductPoint>().factors[k], q.as<ProductPoint>().factors[k], t));
      return Point(std::move(out));
    }
  }
  return p;
}

}  // namespace

Point GeodesicSegment::eval(double t) const {
  t = std::clamp(t, 0.0, 1.0);
  if (t == 0.0) return p_;
  if (t == 1.0) return q_;
  return eval_impl(space_, p_, q_, t);
}

GeodesicSegment geodesic(const ModelSpace& space, const Point& p, const Point& q) {
  return GeodesicSegment(space, p, q);
}

// ---------------------------------------------------------------------------
// Angles

double comparison_angle(const ModelSpace& space, const Point& p, const Point& q, const Point& r) {
  const double a = distance(space, p, q);
  const double b = distance(space, p, r);
  const double c = distance(space, q, r);
  if (a <= 0.0 || b <= 0.0) throw InvalidArgument("comparison_angle: undefined for a degenerate triangle");
  const double cosine = std::clamp((a * a + b * b - c * c) / (2.0 * a * b), -1.0, 1.0);
  return std::acos(cosine);
}

double alexandrov_angle(const ModelSpace& space, const Point& p, const Point& q, const Point& r,
                        const AngleOptions& opts) {
  if (distance(space, p, q) <= 0.0 || distance(space, p, r) <= 0.0)
    throw InvalidArgument("alexandrov_angle: undefined for a degenerate triangle");
  switch (space.kind()) {
    case SpaceKind::Euclidean: return comparison_angle(space, p, q, r);
    case SpaceKind::Tree: {
      const auto& g = space.as<MetricTree>().graph();
      return g.first_step(p.as<TreePoint>(), q.as<TreePoint>()) == g.first_step(p.as<TreePoint>(), r.as<TreePoint>())
                 ? 0.0
                 : kPi;
    }
    case SpaceKind::Cone:
      if (p.as<ConePoint>().is_origin())
        return space.as<EuclideanCone>().angle(q.as<ConePoint>().direction, r.as<ConePoint>().direction);
      break;
    case SpaceKind::Product: break;
  }
  const GeodesicSegment g1(space, p, q);
  const GeodesicSegment g2(space, p, r);
  double prev = comparison_angle(space, p, g1.eval(opts.t0), g2.eval(opts.t0));
  double t = opts.t0;
  for (int k = 1; k <= opts.shrink_steps; ++k) {
    t *= 0.5;
    const double cur = comparison_angle(space, p, g1.eval(t), g2.eval(t));
    if (std::abs(cur - prev) < opts.tol) return cur;
    prev = cur;
  }
  return prev;
}

// ---------------------------------------------------------------------------
// Tree tangent cones

ConePoint TreeTangentCone::log_map(const TreePoint& q) const {
  const auto& g = tree.graph();
  g.validate(q);
  const double d = g.distance(base, q);
  if (d <= 0.0) return ConePoint::origin();
  const auto step = g.first_step(base, q);
  for (std::size_t i = 0; i < directions.size(); ++i)
    if (directions[i] == step) return ConePoint::ray(static_cast<int>(i), d);
  throw ComputationError("log_map: direction not found");
}

TreeTangentCone tree_tangent_cone(const MetricTree& tree, const TreePoint& p) {
  const auto& g = tree.graph();
  g.validate(p);
  const TreePoint base = g.canonical(p);
  auto dirs = g.directions(base);
  if (dirs.empty()) throw InvalidArgument("tree_tangent_cone: single-vertex tree has no directions");
  return TreeTangentCone{tree, base, dirs, EuclideanCone(FiniteMetricSpace::uniform(dirs.size(), kPi))};
}

// ---------------------------------------------------------------------------
// Sampling

Point sample_point(const ModelSpace& space, Rng& rng, double scale) {
  switch (space.kind()) {
    case SpaceKind::Euclidean: {
      const auto n = static_cast<Eigen::Index>(space.as<EuclideanSpace>().dimension);
      Eigen::VectorXd x(n);
      for (Eigen::Index i = 0; i < n; ++i) x(i) = scale * gaussian(rng);
      return Point::euclidean(x);
    }
    case SpaceKind::Tree: return Point(space.as<MetricTree>().graph().random_point(rng));
    case SpaceKind::Cone: {
      if (uniform(rng) < 0.05) return Point(ConePoint::origin());
      const auto& sk = space.as<EuclideanCone>().skeleton();
      EdgePoint dir = uniform(rng) < 0.5 ? EdgePoint::at_vertex(static_cast<int>(uniform_index(rng, sk.num_vertices())))
                                         : sk.random_point(rng);
      return Point(ConePoint{dir, uniform(rng, 0.0, scale)});
    }
    case SpaceKind::Product: {
      ProductPoint out;
      for (const auto& f : space.as<ProductSpace>().factors()) out.factors.push_back(sample_point(f, rng, scale));
      return Point(std::move(out));
    }
  }
  return {};
}

std::optional<Point> reflect_through(const ModelSpace& space, const Point& p, const Point& q, Rng& rng) {
  validate_point(space, p);
  validate_point(space, q);
  switch (space.kind()) {
    case SpaceKind::Euclidean:
      return Point::euclidean(2.0 * p.as<EuclideanPoint>().x - q.as<EuclideanPoint>().x);
    case SpaceKind::Tree: {
      const auto& g = space.as<MetricTree>().graph();
      const auto& a = p.as<TreePoint>();
      const double r = g.distance(a, q.as<TreePoint>());
      if (r <= 0.0) return p;
      const auto own = g.first_step(a, q.as<TreePoint>());
      std::vector<EdgePoint> far;
      for (const auto& dir : g.directions(a)) {
        if (dir == own) continue;
        auto [x, reach] = g.farthest_along(a, dir);
        if (reach >= r) far.push_back(x);
      }
      if (far.empty()) return std::nullopt;
      return Point(g.along(a, far[uniform_index(rng, far.size())], r));
    }
    case SpaceKind::Cone: {
      const auto& cone = space.as<EuclideanCone>();
      const auto& a = p.as<ConePoint>();
      const auto& b = q.as<ConePoint>();
      auto antipodes = [&](const EdgePoint& d) {
        std::vector<int> out;
        for (std::size_t y = 0; y < cone.base().size(); ++y)
          if (cone.angle(d, EdgePoint::at_vertex(static_cast<int>(y))) >= kPi) out.push_back(static_cast<int>(y));
        return out;
      };
      if (b.radius <= 0.0) return Point(ConePoint{a.direction, 2.0 * a.radius});
      if (a.radius <= 0.0) {
        auto ys = antipodes(b.direction);
        if (ys.empty()) return std::nullopt;
        return Point(ConePoint::ray(ys[uniform_index(rng, ys.size())], b.radius));
      }
      const double theta = cone.angle(a.direction, b.direction);
      if (theta >= kPi) return Point(ConePoint{a.direction, 2.0 * a.radius + b.radius});
      if (theta > 0.0) return std::nullopt;
      const double r = 2.0 * a.radius - b.radius;
      if (r >= 0.0) return Point(ConePoint{a.direction, r});
      auto ys = antipodes(a.direction);
      if (ys.empty()) return std::nullopt;
      return Point(ConePoint::ray(ys[uniform_index(rng, ys.size())], -r));
    }
    case SpaceKind::Product: {
      const auto& f = space.as<ProductSpace>().factors();
      ProductPoint out;
      for (std::size_t k = 0; k < f.size(); ++k) {
        auto r = reflect_through(f[k], p.as<ProductPoint>().factors[k], q.as<ProductPoint>().factors[k], rng);
        if (!r) return std::nullopt;
        out.factors.push_back(std::move(*r));
      }
      return Point(std::move(out));
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Sampled CAT(0) check

Cat0Report verify_cat0_sample(const ModelSpace& space, std::size_t num_samples, std::uint64_t seed, double tol,
                              double scale) {
  Rng rng = make_rng(seed, 0x7C47);
  Cat0Report report;
  const double slack = tol * std::max(1.0, scale);
  std::size_t triangles = 0;
  std::optional<Point> tri[3];
  std::optional<GeodesicSegment> side[3];
  Eigen::Vector2d corner[3];
  while (report.samples < num_samples) {
    if (report.samples % 8 == 0 || !side[0]) {
      // Fresh triangle every few parameter pairs.
      for (auto& v : tri) v = sample_point(space, rng, scale);
      for (int k = 0; k < 3; ++k) side[k].emplace(space, *tri[k], *tri[(k + 1) % 3]);
      const double a = side[0]->length(), b = side[1]->length(), c = side[2]->length();
      corner[0] = {0.0, 0.0};
      corner[1] = {a, 0.0};
      if (a > 0.0) {
        const double x = (a * a + c * c - b * b) / (2.0 * a);
        corner[2] = {x, std::sqrt(std::max(0.0, c * c - x * x))};
      } else {
        corner[2] = {c, 0.0};
      }
      ++triangles;
    }
    const int i = static_cast<int>(uniform_index(rng, 3));
    const int j = (i + 1 + static_cast<int>(uniform_index(rng, 2))) % 3;
    const double s = uniform(rng), t = uniform(rng);
    const double actual = distance(space, side[i]->eval(s), side[j]->eval(t));
    const Eigen::Vector2d ci = (1.0 - s) * corner[i] + s * corner[(i + 1) % 3];
    const Eigen::Vector2d cj = (1.0 - t) * corner[j] + t * corner[(j + 1) % 3];
    const double comparison = (ci - cj).norm();
    ++report.samples;
    const double excess = actual - comparison;
    if (excess > slack) {
      ++report.violations;
      report.max_excess = std::max(report.max_excess, excess);
      if (report.examples.size() < 8)
        report.examples.push_back({*tri[0], *tri[1], *tri[2], i, j, s, t, actual, comparison});
    }
  }
  return report;
}

}  // namespace cat0
