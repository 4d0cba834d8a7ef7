#include "cat0/barycenter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace cat0 {

namespace {
constexpr double kPi = std::numbers::pi;
}

void Measure::validate() const {
  if (support.empty()) throw InvalidArgument("measure: empty support");
  if (support.size() != weights.size()) throw InvalidArgument("measure: support and weights differ in length");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) throw InvalidArgument("measure: weights must be positive");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw InvalidArgument("measure: weights must sum to 1");
  for (const auto& p : support) validate_point(space, p);
}

std::size_t Measure::distinct_points(double tol) const {
  std::vector<std::size_t> reps;
  for (std::size_t i = 0; i < support.size(); ++i) {
    bool seen = false;
    for (std::size_t r : reps)
      if (distance(space, support[r], support[i]) <= tol) {
        seen = true;
        break;
      }
    if (!seen) reps.push_back(i);
  }
  return reps.size();
}

Measure uniform_measure(ModelSpace space, std::vector<Point> support) {
  const std::size_t m = support.size();
  return Measure{std::move(space), std::move(support), std::vector<double>(m, 1.0 / static_cast<double>(m))};
}

UncertifiedBarycenter::UncertifiedBarycenter(Point candidate, CertificationReport report)
    : ComputationError("uncertified barycenter: " + report.detail),
      candidate_(std::move(candidate)),
      report_(std::move(report)) {}

double frechet_objective(const Measure& mu, const Point& y) {
  double f = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const double d = distance(mu.space, y, mu.support[i]);
    f += mu.weights[i] * d * d;
  }
  return f;
}

double variance_gap(const Measure& mu, const Point& bar, const Point& y) {
  const double d = distance(mu.space, bar, y);
  return frechet_objective(mu, y) - frechet_objective(mu, bar) - d * d;
}

namespace {

// Minimises sum_i t_i (c_i + sigma_i s)^2 over s in [lo, hi].
struct Piece {
  double c;
  double sigma;
};

double minimise_pieces(const std::vector<Piece>& pieces, const std::vector<double>& weights, double lo, double hi,
                       double* value) {
  double a = 0.0, b = 0.0;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    a += weights[i] * pieces[i].sigma * pieces[i].sigma;
    b += weights[i] * pieces[i].c * pieces[i].sigma;
  }
  double s = a > 0.0 ? -b / a : lo;
  s = std::clamp(s, lo, hi);
  double f = 0.0;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const double r = pieces[i].c + pieces[i].sigma * s;
    f += weights[i] * r * r;
  }
  *value = f;
  return s;
}

// Exact minimiser of the Frechet objective restricted to one tree edge.
double minimise_on_edge(const MetricGraph& g, int e, const Measure& mu, double* value) {
  const auto& ed = g.edges()[static_cast<std::size_t>(e)];
  const EdgePoint u = EdgePoint::at_vertex(ed.u), v = EdgePoint::at_vertex(ed.v);
  std::vector<double> breaks{0.0, ed.length};
  struct Linear {
    bool on_edge;
    double offset;
    double c;
    double sigma;
  };
  std::vector<Linear> lin;
  for (const auto& p : mu.support) {
    const auto& tp = g.canonical(p.as<TreePoint>());
    if (!tp.is_vertex() && tp.edge == e) {
      lin.push_back({true, tp.offset, 0.0, 0.0});
      breaks.push_back(tp.offset);
      continue;
    }
    const double du = g.distance(u, tp), dv = g.distance(v, tp);
    if (du <= dv) lin.push_back({false, 0.0, du, 1.0});
    else lin.push_back({false, 0.0, dv + ed.length, -1.0});
  }
  std::sort(breaks.begin(), breaks.end());
  double best_s = 0.0, best_f = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    const double lo = breaks[k], hi = breaks[k + 1];
    const double mid = 0.5 * (lo + hi);
    std::vector<Piece> pieces;
    for (const auto& l : lin) {
      if (!l.on_edge) pieces.push_back({l.c, l.sigma});
      else if (mid >= l.offset) pieces.push_back({-l.offset, 1.0});
      else pieces.push_back({l.offset, -1.0});
    }
    double f = 0.0;
    const double s = minimise_pieces(pieces, mu.weights, lo, hi, &f);
    if (f < best_f) {
      best_f = f;
      best_s = s;
    }
  }
  *value = best_f;
  return best_s;
}

// Subgradient routing: walk from vertex to vertex along the unique descent
// direction, then solve exactly on the final edge.
Point tree_barycenter(const MetricTree& tree, const Measure& mu) {
  const auto& g = tree.graph();
  int w = 0;
  {
    // Start from the vertex nearest the first support point.
    const auto p0 = g.canonical(mu.support.front().as<TreePoint>());
    w = p0.is_vertex() ? p0.vertex : g.edges()[static_cast<std::size_t>(p0.edge)].u;
  }
  for (std::size_t guard = 0; guard <= g.num_vertices() + 1; ++guard) {
    const EdgePoint here = EdgePoint::at_vertex(w);
    int best_edge = -1, best_to = -1;
    double best_slope = 0.0;
    for (auto [nbr, e] : g.incident(w)) {
      double slope = 0.0;
      for (std::size_t i = 0; i < mu.size(); ++i) {
        const auto& p = mu.support[i].as<TreePoint>();
        const double d = g.distance(here, p);
        if (d <= 0.0) continue;
        const bool ahead = g.first_step(here, p) == std::pair<int, int>{e, nbr};
        slope += 2.0 * mu.weights[i] * d * (ahead ? -1.0 : 1.0);
      }
      if (slope < best_slope) {
        best_slope = slope;
        best_edge = e;
        best_to = nbr;
      }
    }
    if (best_edge < 0 || best_slope > -1e-14) return Point(here);
    double f = 0.0;
    const double s = minimise_on_edge(g, best_edge, mu, &f);
    const auto& ed = g.edges()[static_cast<std::size_t>(best_edge)];
    const double s_from_w = ed.u == w ? s : ed.length - s;
    if (s_from_w >= ed.length - 1e-13 * std::max(1.0, ed.length)) {
      w = best_to;
      continue;
    }
    return Point(g.canonical(EdgePoint::on_edge(best_edge, s)));
  }
  throw ComputationError("tree barycenter: routing did not terminate");
}

// c(x) = sum_i t_i r_i cos(angle(x, x_i)); F(x, r) = const - 2 r c(x) + r^2.
double cone_pull(const EuclideanCone& cone, const Measure& mu, const EdgePoint& dir) {
  double c = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const auto& p = mu.support[i].as<ConePoint>();
    if (p.radius <= 0.0) continue;
    c += mu.weights[i] * p.radius * std::cos(cone.angle(dir, p.direction));
  }
  return c;
}

Point cone_barycenter(const EuclideanCone& cone, const Measure& mu) {
  const auto& sk = cone.skeleton();
  EdgePoint best_dir = EdgePoint::at_vertex(0);
  double best_c = -std::numeric_limits<double>::infinity();
  for (std::size_t x = 0; x < sk.num_vertices(); ++x) {
    const EdgePoint d = EdgePoint::at_vertex(static_cast<int>(x));
    const double c = cone_pull(cone, mu, d);
    if (c > best_c) {
      best_c = c;
      best_dir = d;
    }
  }
  std::vector<std::vector<double>> to_vertex(mu.size(), std::vector<double>(sk.num_vertices()));
  for (std::size_t i = 0; i < mu.size(); ++i)
    for (std::size_t x = 0; x < sk.num_vertices(); ++x)
      to_vertex[i][x] = sk.distance(EdgePoint::at_vertex(static_cast<int>(x)), mu.support[i].as<ConePoint>().direction);
  for (std::size_t e = 0; e < sk.edges().size(); ++e) {
    const double len = sk.edges()[e].length;
    const auto& ed = sk.edges()[e];
    auto at = [&](double s) { return cone_pull(cone, mu, EdgePoint::on_edge(static_cast<int>(e), s)); };
    // Each angle is the minimum of a few linear forms in s capped at pi, so c(s)
    // is A cos s + B sin s + C between breakpoints.
    struct Form {
      double a;
      double sigma;
    };
    std::vector<double> du(mu.size()), dv(mu.size());
    double bound = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
      const auto& p = mu.support[i].as<ConePoint>();
      du[i] = to_vertex[i][static_cast<std::size_t>(ed.u)];
      dv[i] = to_vertex[i][static_cast<std::size_t>(ed.v)];
      const double nearest = std::max(0.0, std::min(du[i], dv[i]) - 0.5 * len);
      bound += mu.weights[i] * p.radius * std::cos(std::min(kPi, nearest));
    }
    if (bound <= best_c) continue;
    std::vector<std::vector<Form>> forms;
    std::vector<double> cuts{0.0, len};
    for (std::size_t i = 0; i < mu.size(); ++i) {
      const auto& p = mu.support[i].as<ConePoint>();
      std::vector<Form> f{{kPi, 0.0}, {du[i], 1.0}, {dv[i] + len, -1.0}};
      const EdgePoint q = sk.canonical(p.direction);
      if (!q.is_vertex() && q.edge == static_cast<int>(e)) {
        f.push_back({-q.offset, 1.0});
        f.push_back({q.offset, -1.0});
      }
      for (std::size_t x = 0; x < f.size(); ++x)
        for (std::size_t y = x + 1; y < f.size(); ++y)
          if (f[x].sigma != f[y].sigma) {
            const double s = (f[y].a - f[x].a) / (f[x].sigma - f[y].sigma);
            if (s > 0.0 && s < len) cuts.push_back(s);
          }
      forms.push_back(std::move(f));
    }
    std::sort(cuts.begin(), cuts.end());
    std::vector<double> candidates = cuts;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      const double lo = cuts[k], hi = cuts[k + 1];
      if (hi - lo <= 0.0) continue;
      const double mid = 0.5 * (lo + hi);
      double A = 0.0, B = 0.0;
      for (std::size_t i = 0; i < mu.size(); ++i) {
        const double w = mu.weights[i] * mu.support[i].as<ConePoint>().radius;
        const Form* best = &forms[i][0];
        for (const auto& f : forms[i])
          if (f.a + f.sigma * mid < best->a + best->sigma * mid) best = &f;
        if (best->sigma == 0.0) continue;
        // cos(a + sigma s) = cos a cos s - sigma sin a sin s
        A += w * std::cos(best->a);
        B -= w * best->sigma * std::sin(best->a);
      }
      const double s0 = std::atan2(B, A);
      for (int k2 = -2; k2 <= 2; ++k2) {
        const double s = s0 + 2.0 * kPi * k2;
        if (s > lo && s < hi) candidates.push_back(s);
      }
    }
    auto pull = [&](double x) {
      double total = 0.0;
      for (std::size_t i = 0; i < mu.size(); ++i) {
        double ang = kPi;
        for (const auto& f : forms[i]) ang = std::min(ang, f.a + f.sigma * x);
        total += mu.weights[i] * mu.support[i].as<ConePoint>().radius * std::cos(ang);
      }
      return total;
    };
    double s = 0.0, c = -std::numeric_limits<double>::infinity();
    for (double x : candidates) {
      const double cx = pull(x);
      if (cx > c) {
        c = cx;
        s = x;
      }
    }
    c = at(s);

    if (c > best_c + 1e-15) {
      best_c = c;
      best_dir = sk.canonical(EdgePoint::on_edge(static_cast<int>(e), s));
    }
  }
  if (best_c <= 0.0) return Point(ConePoint::origin());
  return Point(ConePoint{best_dir, best_c});
}

Point barycenter_impl(const Measure& mu) {
  const auto& space = mu.space;
  switch (space.kind()) {
    case SpaceKind::Euclidean: {
      Eigen::VectorXd m = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space.as<EuclideanSpace>().dimension));
      for (std::size_t i = 0; i < mu.size(); ++i) m += mu.weights[i] * mu.support[i].as<EuclideanPoint>().x;
      return Point::euclidean(m);
    }
    case SpaceKind::Tree: return tree_barycenter(space.as<MetricTree>(), mu);
    case SpaceKind::Cone: return cone_barycenter(space.as<EuclideanCone>(), mu);
    case SpaceKind::Product: {
      // Componentwise: the barycenter of the factor pushforwards.
      const auto& f = space.as<ProductSpace>().factors();
      ProductPoint out;
      for (std::size_t k = 0; k < f.size(); ++k) {
        Measure push{f[k], {}, mu.weights};
        for (const auto& p : mu.support) push.support.push_back(p.as<ProductPoint>().factors[k]);
        out.factors.push_back(barycenter_impl(push));
      }
      return Point(std::move(out));
    }
  }
  return {};
}

}  // namespace

Point barycenter(const Measure& mu, const BarycenterOptions& opts) {
  mu.validate();
  Point bar = canonicalize(mu.space, barycenter_impl(mu));
  if (!opts.certify) return bar;
  auto report = certify_barycenter(mu, bar, opts.tol, opts.num_probes, opts.seed);
  if (!report.passed) throw UncertifiedBarycenter(bar, report);
  return bar;
}

CertificationReport certify_barycenter(const Measure& mu, const Point& candidate, double tol, int num_probes,
                                       std::uint64_t seed) {
  mu.validate();
  validate_point(mu.space, candidate);
  CertificationReport rep;
  const double f0 = frechet_objective(mu, candidate);
  double scale = 0.0;
  for (const auto& p : mu.support) scale = std::max(scale, distance(mu.space, candidate, p));
  const double gap_tol = tol * std::max(1.0, f0);
  const double slope_tol = tol * std::max(1.0, scale);

  std::vector<Point> probes;
  for (const auto& p : mu.support) {
    probes.push_back(p);
    probes.push_back(geodesic(mu.space, candidate, p).eval(0.5));
  }
  Rng rng = make_rng(seed, 0xCE27);
  while (static_cast<int>(probes.size()) < num_probes)
    probes.push_back(sample_point(mu.space, rng, std::max(1.0, 1.5 * scale)));

  rep.worst_variance_gap = std::numeric_limits<double>::infinity();
  rep.worst_directional = std::numeric_limits<double>::infinity();
  for (const auto& y : probes) {
    ++rep.probes;
    const double d = distance(mu.space, candidate, y);
    if (d <= 1e-15) continue;
    rep.worst_variance_gap = std::min(rep.worst_variance_gap, variance_gap(mu, candidate, y));
    // One-sided derivative along the geodesic ray toward y.
    const double h = std::min(1.0, 1e-6 * std::max(1.0, scale) / d);
    const Point z = geodesic(mu.space, candidate, y).eval(h);
    const double step = distance(mu.space, candidate, z);
    // rounding in the objective difference, amplified by very short steps
    const double noise = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, f0) / step;
    if (step > 0.0)
      rep.worst_directional = std::min(rep.worst_directional, (frechet_objective(mu, z) - f0) / step + noise);
  }
  if (!std::isfinite(rep.worst_variance_gap)) rep.worst_variance_gap = 0.0;
  if (!std::isfinite(rep.worst_directional)) rep.worst_directional = 0.0;
  rep.passed = rep.worst_variance_gap >= -gap_tol && rep.worst_directional >= -slope_tol;
  if (!rep.passed) {
    rep.detail = "variance gap " + std::to_string(rep.worst_variance_gap) + ", directional derivative " +
                 std::to_string(rep.worst_directional);
  } else {
    rep.detail = "ok";
  }
  return rep;
}

}  // namespace cat0
