#include "cat0/spectral.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <tuple>
#include <cmath>
#include <limits>
#include <numeric>

#include "cat0/barycenter.hpp"
#include "cat0/error.hpp"
#include "cat0/random.hpp"

namespace cat0 {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr std::size_t kDenseLimit = 2500;

void require_connected(const LabeledGraph& g) {
  if (g.num_vertices() < 2) throw InvalidArgument("graph needs at least two vertices");
  if (!g.is_connected()) throw InvalidArgument("graph is disconnected");
}

double dirichlet_energy(const LabeledGraph& g, const VectorXd& f) {
  double e = 0.0;
  for (const auto& [u, v] : g.edges()) e += (f(u) - f(v)) * (f(u) - f(v));
  return e;
}

VectorXd sqrt_degrees(const LabeledGraph& g) {
  VectorXd s(static_cast<Eigen::Index>(g.num_vertices()));
  for (Eigen::Index v = 0; v < s.size(); ++v) s(v) = std::sqrt(static_cast<double>(g.degree(static_cast<int>(v))));
  return s;
}

// y = D^{-1/2} A D^{-1/2} x
VectorXd normalized_adjacency(const LabeledGraph& g, const VectorXd& sd, const VectorXd& x) {
  VectorXd y = VectorXd::Zero(x.size());
  for (const auto& [u, v] : g.edges()) {
    y(u) += x(v) / (sd(u) * sd(v));
    y(v) += x(u) / (sd(u) * sd(v));
  }
  return y;
}

// Largest eigenpair of the normalized adjacency restricted to the complement of sqrt(deg).
std::pair<double, VectorXd> lanczos_second(const LabeledGraph& g, const VectorXd& sd) {
  const Eigen::Index n = sd.size();
  const VectorXd top = sd.normalized();
  const int steps = static_cast<int>(std::min<Eigen::Index>(n - 1, 300));
  MatrixXd Q(n, steps + 1);
  VectorXd alpha(steps), beta(steps);
  Rng rng = make_rng(0x1a2c705, static_cast<std::uint64_t>(n));
  VectorXd q(n);
  for (Eigen::Index i = 0; i < n; ++i) q(i) = gaussian(rng);
  q -= top.dot(q) * top;
  q.normalize();
  Q.col(0) = q;
  int k = 0;
  for (; k < steps; ++k) {
    VectorXd w = normalized_adjacency(g, sd, Q.col(k));
    w -= top.dot(w) * top;
    alpha(k) = Q.col(k).dot(w);
    for (int pass = 0; pass < 2; ++pass) w -= Q.leftCols(k + 1) * (Q.leftCols(k + 1).transpose() * w);
    beta(k) = w.norm();
    if (beta(k) < 1e-12) {
      ++k;
      break;
    }
    Q.col(k + 1) = w / beta(k);
  }
  MatrixXd T = MatrixXd::Zero(k, k);
  for (int i = 0; i < k; ++i) {
    T(i, i) = alpha(i);
    if (i + 1 < k) T(i, i + 1) = T(i + 1, i) = beta(i);
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(T);
  const VectorXd v = Q.leftCols(k) * es.eigenvectors().col(k - 1);
  return {es.eigenvalues()(k - 1), v};
}

}  // namespace

SpectralGap laplacian_spectrum(const LabeledGraph& g) {
  require_connected(g);
  const std::size_t n = g.num_vertices();
  const VectorXd sd = sqrt_degrees(g);
  SpectralGap out;
  VectorXd gvec;
  if (n <= kDenseLimit) {
    MatrixXd N = g.adjacency();
    N = sd.cwiseInverse().asDiagonal() * N * sd.cwiseInverse().asDiagonal();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(MatrixXd::Identity(N.rows(), N.cols()) - N);
    out.lambda1 = es.eigenvalues()(1);
    gvec = es.eigenvectors().col(1);
  } else {
    auto [theta, v] = lanczos_second(g, sd);
    out.lambda1 = 1.0 - theta;
    gvec = v;
    out.iterative = true;
  }
  VectorXd f = gvec.cwiseQuotient(sd);
  const double mass = (sd.array().square() * f.array().square()).sum();
  f /= std::sqrt(mass);
  out.eigenfunction = f;
  out.variational_quotient = dirichlet_energy(g, f);
  if (std::abs(out.variational_quotient - out.lambda1) > 1e-9 * std::max(1.0, out.lambda1))
    throw ComputationError("laplacian eigenpair failed the variational cross-check");
  return out;
}

double laplacian_lambda1(const LabeledGraph& g) { return laplacian_spectrum(g).lambda1; }

// ---------------------------------------------------------------------------

namespace {

std::vector<double> degree_weights(const LabeledGraph& g) {
  const double total = 2.0 * static_cast<double>(g.num_edges());
  std::vector<double> w(g.num_vertices());
  for (std::size_t v = 0; v < w.size(); ++v) w[v] = g.degree(static_cast<int>(v)) / total;
  return w;
}

struct Quotient {
  double value = std::numeric_limits<double>::infinity();
  double energy = 0.0;
  double variance = 0.0;
  Point center;
};

Quotient evaluate(const LabeledGraph& g, const ModelSpace& space, const VertexMap& f, const std::vector<double>& w,
                  bool certify) {
  Quotient q;
  for (const auto& [u, v] : g.edges()) {
    const double d = distance(space, f[static_cast<std::size_t>(u)], f[static_cast<std::size_t>(v)]);
    q.energy += d * d;
  }
  Measure mu{space, f, w};
  BarycenterOptions bo;
  bo.certify = certify;
  q.center = barycenter(mu, bo);
  for (std::size_t v = 0; v < f.size(); ++v) {
    const double d = distance(space, f[v], q.center);
    q.variance += g.degree(static_cast<int>(v)) * d * d;
  }
  if (q.variance > 1e-300) q.value = q.energy / q.variance;
  return q;
}

void check_map(const LabeledGraph& g, const ModelSpace& space, const VertexMap& f) {
  if (f.size() != g.num_vertices()) throw InvalidArgument("vertex map must assign one point per vertex");
  if (g.num_edges() == 0) throw InvalidArgument("graph has no edges");
  for (const auto& p : f) validate_point(space, p);
}

// Euclidean targets: the quotient is a ratio of quadratics in each coordinate.
void euclidean_sweeps(const LabeledGraph& g, MatrixXd& X, const std::vector<double>& w, const WangOptions& opts,
                      Rng& rng) {
  const Eigen::Index n = X.rows(), dim = X.cols();
  const VectorXd deg = Eigen::Map<const VectorXd>(w.data(), n) * 2.0 * static_cast<double>(g.num_edges());
  auto parts = [&](const MatrixXd& Y) {
    double num = 0.0;
    for (const auto& [u, v] : g.edges()) num += (Y.row(u) - Y.row(v)).squaredNorm();
    const Eigen::RowVectorXd mean = (deg.transpose() * Y) / deg.sum();
    double den = 0.0;
    for (Eigen::Index v = 0; v < n; ++v) den += deg(v) * (Y.row(v) - mean).squaredNorm();
    return std::pair{num, den};
  };
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  auto [num0, den0] = parts(X);
  double best = num0 / den0;
  for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
    const double start = best;
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[uniform_index(rng, i)]);
    for (Eigen::Index v : order)
      for (Eigen::Index k = 0; k < dim; ++k) {
        const double x0 = X(v, k);
        std::array<double, 3> xs{x0 - 1.0, x0, x0 + 1.0}, N{}, D{};
        for (int s = 0; s < 3; ++s) {
          X(v, k) = xs[static_cast<std::size_t>(s)];
          std::tie(N[static_cast<std::size_t>(s)], D[static_cast<std::size_t>(s)]) = parts(X);
        }
        X(v, k) = x0;
        // N(x0 + h) = a h^2 + b h + c, likewise D with (d, e, f).
        const double a = 0.5 * (N[0] + N[2]) - N[1], b = 0.5 * (N[2] - N[0]), c = N[1];
        const double d = 0.5 * (D[0] + D[2]) - D[1], e = 0.5 * (D[2] - D[0]), f = D[1];
        const double A = a * e - b * d, B = 2.0 * (a * f - c * d), C = b * f - c * e;
        std::vector<double> roots;
        if (std::abs(A) > 1e-300) {
          const double disc = B * B - 4.0 * A * C;
          if (disc >= 0.0) {
            const double sq = std::sqrt(disc);
            roots = {(-B + sq) / (2.0 * A), (-B - sq) / (2.0 * A)};
          }
        } else if (std::abs(B) > 1e-300) {
          roots = {-C / B};
        }
        double best_h = 0.0, best_val = (f > 0.0) ? c / f : std::numeric_limits<double>::infinity();
        for (double h : roots) {
          const double den = d * h * h + e * h + f;
          if (!(den > 1e-14 * std::max(1.0, f)) || !std::isfinite(h)) continue;
          const double val = (a * h * h + b * h + c) / den;
          if (val < best_val - 1e-15 * std::abs(best_val)) {
            best_val = val;
            best_h = h;
          }
        }
        X(v, k) = x0 + best_h;
        best = std::min(best, best_val);
      }
    if (start - best <= opts.tol * std::max(1.0, best)) break;
  }
}

double golden_minimise(const std::function<double(double)>& phi, int iters, double* arg) {
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double lo = 0.0, hi = 1.0;
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double f1 = phi(x1), f2 = phi(x2);
  for (int i = 0; i < iters; ++i) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = phi(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = phi(x2);
    }
  }
  double best = f1 <= f2 ? f1 : f2;
  *arg = f1 <= f2 ? x1 : x2;
  const double fend = phi(1.0);
  if (fend < best) {
    best = fend;
    *arg = 1.0;
  }
  return best;
}

void geodesic_sweeps(const LabeledGraph& g, const ModelSpace& space, VertexMap& f, const std::vector<double>& w,
                     const WangOptions& opts, Rng& rng, double scale) {
  const std::size_t n = f.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  double best = evaluate(g, space, f, w, false).value;
  for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
    const double start = best;
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[uniform_index(rng, i)]);
    for (std::size_t v : order) {
      const Point center = evaluate(g, space, f, w, false).center;
      std::vector<Point> targets;
      for (int u : g.neighbors(static_cast<int>(v))) targets.push_back(f[static_cast<std::size_t>(u)]);
      targets.push_back(center);
      targets.push_back(sample_point(space, rng, scale));
      if (auto away = reflect_through(space, f[v], center, rng)) targets.push_back(*away);
      for (const Point& target : targets) {
        if (same_point(space, target, f[v])) continue;
        const GeodesicSegment seg(space, f[v], target);
        const Point keep = f[v];
        auto phi = [&](double s) {
          f[v] = seg.eval(s);
          return evaluate(g, space, f, w, false).value;
        };
        double arg = 0.0;
        const double val = golden_minimise(phi, opts.line_search_iters, &arg);
        if (val < best - 1e-15 * std::abs(best)) {
          best = val;
          f[v] = seg.eval(arg);
        } else {
          f[v] = keep;
        }
      }
    }
    if (start - best <= opts.tol * std::max(1.0, best)) break;
  }
}

VertexMap euclidean_map(const MatrixXd& X) {
  VertexMap f;
  for (Eigen::Index v = 0; v < X.rows(); ++v) f.push_back(Point::euclidean(VectorXd(X.row(v).transpose())));
  return f;
}

}  // namespace

double wang_quotient(const LabeledGraph& g, const ModelSpace& space, const VertexMap& f) {
  check_map(g, space, f);
  const Quotient q = evaluate(g, space, f, degree_weights(g), true);
  if (!std::isfinite(q.value)) throw InvalidArgument("constant map has no Wang quotient");
  return q.value;
}

WangResult wang_lambda1(const LabeledGraph& g, const ModelSpace& space, const WangOptions& opts) {
  require_connected(g);
  const std::size_t n = g.num_vertices();
  const std::vector<double> w = degree_weights(g);
  const SpectralGap gap = laplacian_spectrum(g);
  const VectorXd& fied = gap.eigenfunction;
  const double lo = fied.minCoeff(), hi = fied.maxCoeff();

  WangResult out;
  out.estimate = std::numeric_limits<double>::infinity();
  for (int r = 0; r < std::max(1, opts.restarts); ++r) {
    Rng rng = make_rng(opts.seed, static_cast<std::uint64_t>(r));
    VertexMap f;
    if (space.kind() == SpaceKind::Euclidean) {
      const auto dim = static_cast<Eigen::Index>(space.as<EuclideanSpace>().dimension);
      MatrixXd X = MatrixXd::Zero(static_cast<Eigen::Index>(n), dim);
      if (r == 0) {
        X.col(0) = fied;
      } else {
        for (Eigen::Index v = 0; v < X.rows(); ++v)
          for (Eigen::Index k = 0; k < dim; ++k) X(v, k) = gaussian(rng);
      }
      euclidean_sweeps(g, X, w, opts, rng);
      f = euclidean_map(X);
    } else {
      // Restart 0 lays the Fiedler vector along a geodesic segment, where the
      // quotient reduces to the real one.
      Point a = sample_point(space, rng, 1.0), b = sample_point(space, rng, 1.0);
      for (int tries = 0; tries < 16; ++tries) {
        const Point c = sample_point(space, rng, 1.0);
        if (distance(space, a, c) > distance(space, a, b)) b = c;
      }
      if (same_point(space, a, b)) continue;
      if (r == 0) {
        const GeodesicSegment seg(space, a, b);
        for (std::size_t v = 0; v < n; ++v)
          f.push_back(seg.eval(hi > lo ? (fied(static_cast<Eigen::Index>(v)) - lo) / (hi - lo) : 0.5));
      } else {
        for (std::size_t v = 0; v < n; ++v) f.push_back(sample_point(space, rng, 1.0));
      }
      if (!std::isfinite(evaluate(g, space, f, w, false).value)) continue;
      geodesic_sweeps(g, space, f, w, opts, rng, 1.0);
    }
    const double val = evaluate(g, space, f, w, false).value;
    out.restart_values.push_back(val);
    if (val < out.estimate) {
      out.estimate = val;
      out.witness = f;
    }
  }
  if (out.witness.empty()) throw ComputationError("no nonconstant map found in the target space");
  // The reported value uses a certified barycenter.
  out.estimate = evaluate(g, space, out.witness, w, true).value;
  return out;
}

SandwichReport sandwich_check(const LabeledGraph& g, const ModelSpace& space, double delta_bar,
                              const WangOptions& opts, double tol) {
  SandwichReport rep;
  rep.lambda1 = laplacian_lambda1(g);
  rep.wang = wang_lambda1(g, space, opts).estimate;
  rep.delta_bound = delta_bar;
  rep.lower = (1.0 - delta_bar) * rep.lambda1;
  rep.lower_margin = rep.wang - rep.lower;
  rep.upper_margin = rep.lambda1 - rep.wang;
  rep.passed = rep.lower_margin >= -tol && rep.upper_margin >= -tol;
  return rep;
}

// ---------------------------------------------------------------------------

LabeledGraph random_regular_graph(std::size_t n, int d, std::uint64_t seed) {
  if (d < 3) throw InvalidArgument("random regular graph: degree must be at least 3");
  if ((n * static_cast<std::size_t>(d)) % 2 != 0) throw InvalidArgument("random regular graph: n*d must be even");
  if (static_cast<std::size_t>(d) >= n) throw InvalidArgument("random regular graph: degree must be below n");
  Rng rng = make_rng(seed, 0x4e6);
  const std::size_t m = n * static_cast<std::size_t>(d);
  std::vector<int> stubs(m);
  for (std::size_t i = 0; i < m; ++i) stubs[i] = static_cast<int>(i / static_cast<std::size_t>(d));
  for (int attempt = 0; attempt < 10000; ++attempt) {
    for (std::size_t i = m; i > 1; --i) std::swap(stubs[i - 1], stubs[uniform_index(rng, i)]);
    std::vector<LabeledGraph::Edge> edges;
    edges.reserve(m / 2);
    bool ok = true;
    for (std::size_t i = 0; i < m && ok; i += 2) {
      const int u = std::min(stubs[i], stubs[i + 1]), v = std::max(stubs[i], stubs[i + 1]);
      ok = u != v;
      edges.emplace_back(u, v);
    }
    if (!ok) continue;
    std::vector<LabeledGraph::Edge> sorted = edges;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) continue;
    return {n, std::move(edges)};
  }
  throw ComputationError("random regular graph: rejection cap of 10^4 attempts exceeded");
}

ExpanderCertificate expander_certificate(const std::vector<LabeledGraph>& family, int d, double lambda) {
  ExpanderCertificate c;
  c.sizes_grow = family.size() >= 2;
  c.degree_bounded = true;
  c.gap_bounded = true;
  for (std::size_t i = 0; i < family.size(); ++i) {
    const auto& g = family[i];
    c.sizes.push_back(g.num_vertices());
    if (i > 0 && g.num_vertices() <= family[i - 1].num_vertices()) c.sizes_grow = false;
    if (g.max_degree() > d) {
      c.degree_bounded = false;
      c.failures.push_back("graph " + std::to_string(i) + ": degree exceeds " + std::to_string(d));
    }
    double l1 = 0.0;
    if (g.num_vertices() >= 2 && g.is_connected()) l1 = laplacian_lambda1(g);
    c.lambda1s.push_back(l1);
    if (l1 < lambda) {
      c.gap_bounded = false;
      c.failures.push_back("graph " + std::to_string(i) + ": lambda1 = " + std::to_string(l1) + " below " +
                           std::to_string(lambda));
    }
  }
  if (!c.sizes_grow) c.failures.push_back("vertex counts do not increase along the family");
  c.passed = c.sizes_grow && c.degree_bounded && c.gap_bounded;
  return c;
}

PoincareReport poincare_check(const LabeledGraph& g, const ModelSpace& space, const VertexMap& f,
                              double lambda_lower, double tol) {
  check_map(g, space, f);
  const Quotient q = evaluate(g, space, f, degree_weights(g), true);
  if (!std::isfinite(q.value)) throw InvalidArgument("poincare check: constant map");
  PoincareReport rep;
  rep.energy = q.energy;
  rep.variance = q.variance;
  rep.lambda_lower = lambda_lower;
  rep.slack = q.energy - lambda_lower * q.variance;
  rep.passed = rep.slack >= -tol * std::max(1.0, q.energy);
  return rep;
}

double rms_displacement(const LabeledGraph& g, const ModelSpace& space, const VertexMap& f) {
  check_map(g, space, f);
  const Quotient q = evaluate(g, space, f, degree_weights(g), true);
  return std::sqrt(q.variance / (2.0 * static_cast<double>(g.num_edges())));
}

int median_graph_distance(const LabeledGraph& g) {
  require_connected(g);
  const std::size_t n = g.num_vertices();
  std::vector<std::size_t> start(n + 1, 0);
  std::vector<int> adj;
  for (std::size_t v = 0; v < n; ++v) {
    for (int u : g.neighbors(static_cast<int>(v))) adj.push_back(u);
    start[v + 1] = adj.size();
  }
  // Breadth-first search from 64 sources at once; bit b of a word tracks source base + b.
  // Ordered pairs are counted, so every unordered pair appears twice.
  std::vector<std::uint64_t> hist{0};
  std::vector<std::uint64_t> seen(n), frontier(n), next(n);
  for (std::size_t base = 0; base < n; base += 64) {
    std::fill(seen.begin(), seen.end(), 0);
    std::fill(frontier.begin(), frontier.end(), 0);
    for (std::size_t b = 0; b < 64 && base + b < n; ++b) seen[base + b] = frontier[base + b] = std::uint64_t{1} << b;
    for (std::size_t level = 1;; ++level) {
      std::uint64_t reached = 0;
      for (std::size_t v = 0; v < n; ++v) {
        std::uint64_t w = 0;
        for (std::size_t k = start[v]; k < start[v + 1]; ++k) w |= frontier[static_cast<std::size_t>(adj[k])];
        next[v] = w & ~seen[v];
        seen[v] |= next[v];
        reached += static_cast<std::uint64_t>(std::popcount(next[v]));
      }
      if (reached == 0) break;
      if (level >= hist.size()) hist.resize(level + 1, 0);
      hist[level] += reached;
      frontier.swap(next);
    }
  }
  const std::uint64_t pairs = n * (n - 1) / 2;
  const std::uint64_t target = (pairs - 1) / 2;
  std::uint64_t count = 0;
  for (std::size_t k = 0; k < hist.size(); ++k) {
    count += hist[k] / 2;
    if (count > target) return static_cast<int>(k);
  }
  return static_cast<int>(hist.size()) - 1;
}

double displacement_bound(double lambda_lower, double lipschitz_bound) {
  if (!(lambda_lower > 0.0)) throw InvalidArgument("obstruction: lambda must be positive");
  if (!(lipschitz_bound > 0.0)) throw InvalidArgument("obstruction: Lipschitz bound must be positive");
  return lipschitz_bound / std::sqrt(2.0 * lambda_lower);
}

ObstructionReport embedding_obstruction(const LabeledGraph& g, double lambda_lower, double lipschitz_bound,
                                        const std::function<double(double)>& rho1) {
  ObstructionReport rep;
  rep.bound = displacement_bound(lambda_lower, lipschitz_bound);
  rep.vertices = g.num_vertices();
  rep.median_distance = median_graph_distance(g);
  if (rho1) {
    rep.rho1_at_median = rho1(static_cast<double>(rep.median_distance));
    rep.contradiction_flagged = rep.rho1_at_median > rep.bound;
    // At least half of all pairs sit at distance >= median, yet
    // sum_{u != v} d(fu, fv)^2 <= 4 (n - 1) sum_v d(fv, fbar)^2 <= 8 (n - 1) |E| B^2 / deg_min.
    const double n = static_cast<double>(g.num_vertices());
    const double edges = static_cast<double>(g.num_edges());
    const double rhs = 16.0 * edges * rep.bound * rep.bound / (n * g.min_degree());
    rep.rigorous_contradiction = rep.rho1_at_median * rep.rho1_at_median > rhs;
  }
  return rep;
}

}  // namespace cat0
