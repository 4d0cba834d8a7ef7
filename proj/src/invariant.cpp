#include "cat0/invariant.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

#include "cat0/random.hpp"
#include "cat0/sdp.hpp"

namespace cat0 {

using Eigen::MatrixXd;
using Eigen::VectorXd;

void DistanceProfile::validate(double tol) const {
  const Eigen::Index m = radial.size();
  if (m < 1) throw InvalidArgument("distance profile: empty");
  if (pairwise.rows() != m || pairwise.cols() != m) throw InvalidArgument("distance profile: size mismatch");
  if (!pairwise.allFinite() || !radial.allFinite()) throw InvalidArgument("distance profile: non-finite entry");
  const double scale = std::max({1.0, pairwise.cwiseAbs().maxCoeff(), radial.cwiseAbs().maxCoeff()});
  const double eps = tol * scale;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (radial(i) < 0.0) throw InvalidArgument("distance profile: negative radial distance");
    if (std::abs(pairwise(i, i)) > eps) throw InvalidArgument("distance profile: nonzero diagonal");
    for (Eigen::Index j = 0; j < m; ++j) {
      const double d = pairwise(i, j);
      if (d < 0.0) throw InvalidArgument("distance profile: negative distance");
      if (std::abs(d - pairwise(j, i)) > eps) throw InvalidArgument("distance profile: asymmetric");
      if (std::abs(radial(i) - radial(j)) > d + eps || d > radial(i) + radial(j) + eps)
        throw InvalidArgument("distance profile: radial data inconsistent with pairwise distances");
      for (Eigen::Index k = 0; k < m; ++k)
        if (d > pairwise(i, k) + pairwise(k, j) + eps) throw InvalidArgument("distance profile: triangle inequality");
    }
  }
}

DistanceProfile DistanceProfile::scaled(double c) const {
  if (!(c > 0.0)) throw InvalidArgument("distance profile: scale must be positive");
  return {pairwise * c, radial * c};
}

DistanceProfile DistanceProfile::from_points(const ModelSpace& space, const std::vector<Point>& support,
                                             const Point& center) {
  const auto m = static_cast<Eigen::Index>(support.size());
  DistanceProfile P{MatrixXd::Zero(m, m), VectorXd::Zero(m)};
  for (Eigen::Index i = 0; i < m; ++i) {
    P.radial(i) = distance(space, support[static_cast<std::size_t>(i)], center);
    for (Eigen::Index j = i + 1; j < m; ++j) {
      const double d = distance(space, support[static_cast<std::size_t>(i)], support[static_cast<std::size_t>(j)]);
      P.pairwise(i, j) = d;
      P.pairwise(j, i) = d;
    }
  }
  return P;
}

DistanceProfile distance_profile(const Measure& mu, const BarycenterOptions& opts) {
  mu.validate();
  if (mu.distinct_points() < 2) throw InvalidArgument("delta needs at least two distinct support points");
  const Point bar = barycenter(mu, opts);
  return DistanceProfile::from_points(mu.space, mu.support, bar);
}

double gram_quotient(const MatrixXd& gram, const std::vector<double>& weights) {
  const VectorXd t = Eigen::Map<const VectorXd>(weights.data(), static_cast<Eigen::Index>(weights.size()));
  const double den = t.dot(gram.diagonal());
  if (!(den > 0.0)) throw InvalidArgument("Rayleigh quotient: zero denominator");
  return t.dot(gram * t) / den;
}

namespace {

void check_weights(const DistanceProfile& P, const std::vector<double>& t) {
  if (t.size() != P.size()) throw InvalidArgument("weights and profile have different sizes");
  double sum = 0.0;
  for (double w : t) {
    if (!(w > 0.0)) throw InvalidArgument("weights must be positive");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw InvalidArgument("weights must sum to 1");
}

double denominator(const DistanceProfile& P, const std::vector<double>& t) {
  double den = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) den += t[i] * P.radial(static_cast<Eigen::Index>(i)) * P.radial(static_cast<Eigen::Index>(i));
  if (!(den > 0.0)) throw InvalidArgument("every support point sits at the barycenter");
  return den;
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
    return true;
  }
};

constexpr double kMergeTol = 1e-10;

void fill_gram_diagnostics(const DistanceProfile& P, const MatrixXd& G, SolverDiagnostics& diag) {
  const Eigen::Index m = G.rows();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(G, Eigen::EigenvaluesOnly);
  diag.gram_min_eigenvalue = es.eigenvalues().minCoeff();
  diag.max_norm_residual = 0.0;
  diag.max_lipschitz_residual = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    diag.max_norm_residual = std::max(diag.max_norm_residual, std::abs(G(i, i) - P.radial(i) * P.radial(i)));
    for (Eigen::Index j = i + 1; j < m; ++j) {
      const double excess = G(i, i) + G(j, j) - 2.0 * G(i, j) - P.pairwise(i, j) * P.pairwise(i, j);
      diag.max_lipschitz_residual = std::max(diag.max_lipschitz_residual, excess);
    }
  }
}

// Points with coinciding forced directions collapse to one cluster; what remains
// is a correlation problem over cluster directions.
struct Reduction {
  std::vector<int> active;      // points away from the barycenter
  std::vector<int> cluster_of;  // per active point
  int clusters = 0;
  MatrixXd bound;  // lower bound on cluster correlations, -inf if none
  VectorXd tau;    // sum of t_i d_i per cluster, scaled by 1/sqrt(den)
};

Reduction reduce(const DistanceProfile& P, const std::vector<double>& t) {
  const int m = static_cast<int>(P.size());
  const double dmax = P.radial.maxCoeff();
  Reduction red;
  for (int i = 0; i < m; ++i)
    if (P.radial(i) > 1e-12 * dmax) red.active.push_back(i);
  const int k = static_cast<int>(red.active.size());
  auto idx = [](int a) { return static_cast<std::size_t>(a); };

  auto lower = [&](int a, int b) {
    const int i = red.active[idx(a)], j = red.active[idx(b)];
    const double di = P.radial(i), dj = P.radial(j), dij = P.pairwise(i, j);
    return (di * di + dj * dj - dij * dij) / (2.0 * di * dj);
  };

  UnionFind uf(k);
  for (int a = 0; a < k; ++a)
    for (int b = a + 1; b < k; ++b)
      if (lower(a, b) >= 1.0 - kMergeTol) uf.unite(a, b);

  red.cluster_of.assign(idx(k), 0);
  for (bool changed = true; changed;) {
    changed = false;
    std::vector<int> label(idx(k), -1);
    int nc = 0;
    for (int a = 0; a < k; ++a) {
      const int r = uf.find(a);
      if (label[idx(r)] < 0) label[idx(r)] = nc++;
      red.cluster_of[idx(a)] = label[idx(r)];
    }
    red.clusters = nc;
    red.bound = MatrixXd::Constant(nc, nc, -std::numeric_limits<double>::infinity());
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b) {
        const int ca = red.cluster_of[idx(a)], cb = red.cluster_of[idx(b)];
        if (ca != cb) red.bound(ca, cb) = std::max(red.bound(ca, cb), lower(a, b));
      }
    for (int a = 0; a < k && !changed; ++a)
      for (int b = 0; b < k && !changed; ++b) {
        const int ca = red.cluster_of[idx(a)], cb = red.cluster_of[idx(b)];
        if (ca != cb && red.bound(ca, cb) >= 1.0 - kMergeTol) changed = uf.unite(a, b);
      }
  }

  const double sc = std::sqrt(denominator(P, t));
  red.tau = VectorXd::Zero(red.clusters);
  for (int a = 0; a < k; ++a) {
    const int i = red.active[idx(a)];
    red.tau(red.cluster_of[idx(a)]) += t[idx(i)] * P.radial(i) / sc;
  }
  return red;
}

// Gram matrix of the realization phi_i = d_i * u_{cluster(i)}.
MatrixXd expand_gram(const DistanceProfile& P, const Reduction& red, const MatrixXd& W) {
  const auto m = static_cast<Eigen::Index>(P.size());
  MatrixXd G = MatrixXd::Zero(m, m);
  for (std::size_t a = 0; a < red.active.size(); ++a)
    for (std::size_t b = 0; b < red.active.size(); ++b) {
      const int i = red.active[a], j = red.active[b];
      G(i, j) = P.radial(i) * P.radial(j) * W(red.cluster_of[a], red.cluster_of[b]);
    }
  return G;
}

MatrixXd expand_vectors(const DistanceProfile& P, const Reduction& red, const MatrixXd& U) {
  MatrixXd Phi = MatrixXd::Zero(static_cast<Eigen::Index>(P.size()), U.cols());
  for (std::size_t a = 0; a < red.active.size(); ++a) {
    const int i = red.active[a];
    Phi.row(i) = P.radial(i) * U.row(red.cluster_of[a]);
  }
  return Phi;
}

// ---------------------------------------------------------------------------
// Nonconvex cross-check: augmented Lagrangian over unit cluster directions.

struct AlmState {
  const Reduction* red = nullptr;
  std::vector<std::array<int, 2>> pairs;
  std::vector<double> lo;
  std::vector<double> lambda;
  double rho = 10.0;
  double floor = 1.0;  // constraints are divided by max(1 - lo, floor)

  double value(const MatrixXd& U) const { return (U.transpose() * red->tau).squaredNorm(); }

  double gap(const MatrixXd& U, std::size_t q) const {
    return (lo[q] - U.row(pairs[q][0]).dot(U.row(pairs[q][1]))) / std::max(1.0 - lo[q], floor);
  }

  double lagrangian(const MatrixXd& U) const {
    double L = value(U);
    for (std::size_t q = 0; q < pairs.size(); ++q) {
      const double s = std::max(0.0, lambda[q] + rho * gap(U, q));
      L += (s * s - lambda[q] * lambda[q]) / (2.0 * rho);
    }
    return L;
  }

  // Riemannian gradient on the product of unit spheres.
  MatrixXd gradient(const MatrixXd& U) const {
    const VectorXd& tau = red->tau;
    const Eigen::RowVectorXd v = (U.transpose() * tau).transpose();
    MatrixXd G = 2.0 * tau * v;
    for (std::size_t q = 0; q < pairs.size(); ++q) {
      const double s = std::max(0.0, lambda[q] + rho * gap(U, q));
      if (s == 0.0) continue;
      const int a = pairs[q][0], b = pairs[q][1];
      const double k = s / std::max(1.0 - lo[q], floor);
      G.row(a) -= k * U.row(b);
      G.row(b) -= k * U.row(a);
    }
    for (Eigen::Index i = 0; i < U.rows(); ++i) G.row(i) -= G.row(i).dot(U.row(i)) * U.row(i);
    return G;
  }
};

MatrixXd retract(MatrixXd U) {
  for (Eigen::Index i = 0; i < U.rows(); ++i) {
    const double nrm = U.row(i).norm();
    if (nrm > 0.0) U.row(i) /= nrm;
  }
  return U;
}

MatrixXd project_tangent(const MatrixXd& U, MatrixXd D) {
  for (Eigen::Index i = 0; i < U.rows(); ++i) D.row(i) -= D.row(i).dot(U.row(i)) * U.row(i);
  return D;
}

double inner(const MatrixXd& A, const MatrixXd& B) { return (A.array() * B.array()).sum(); }

// Riemannian L-BFGS with projection as vector transport.
void inner_solve(const AlmState& S, MatrixXd& U, int max_inner) {
  constexpr std::size_t kMemory = 12;
  std::deque<std::pair<MatrixXd, MatrixXd>> hist;
  double L = S.lagrangian(U);
  MatrixXd G = S.gradient(U);
  const double g0 = std::max(G.norm(), 1e-300);
  for (int it = 0; it < max_inner; ++it) {
    if (G.norm() <= 1e-13 * std::max(1.0, g0)) break;
    MatrixXd D = -G;
    std::vector<double> alpha(hist.size());
    for (std::size_t k = hist.size(); k-- > 0;) {
      const auto& [s, y] = hist[k];
      alpha[k] = inner(s, D) / inner(y, s);
      D -= alpha[k] * y;
    }
    if (!hist.empty()) D *= inner(hist.back().first, hist.back().second) / hist.back().second.squaredNorm();
    for (std::size_t k = 0; k < hist.size(); ++k) {
      const auto& [s, y] = hist[k];
      D += (alpha[k] - inner(y, D) / inner(y, s)) * s;
    }
    D = project_tangent(U, D);
    double slope = inner(G, D);
    if (!(slope < 0.0)) {
      hist.clear();
      D = -G;
      slope = -G.squaredNorm();
    }
    double step = hist.empty() ? 1.0 / std::max(1.0, D.norm()) : 1.0;
    MatrixXd Unew;
    double Lnew = L;
    bool accepted = false;
    for (int bt = 0; bt < 50; ++bt) {
      Unew = retract(U + step * D);
      Lnew = S.lagrangian(Unew);
      if (Lnew <= L + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (hist.empty()) break;
      hist.clear();
      continue;
    }
    MatrixXd Gnew = S.gradient(Unew);
    MatrixXd s = project_tangent(Unew, Unew - U);
    MatrixXd y = Gnew - project_tangent(Unew, G);
    if (inner(s, y) > 1e-12 * s.norm() * y.norm()) {
      hist.emplace_back(std::move(s), std::move(y));
      if (hist.size() > kMemory) hist.pop_front();
    }
    const double drop = L - Lnew;
    U = std::move(Unew);
    G = std::move(Gnew);
    L = Lnew;
    if (drop <= 1e-18 * std::max(1.0, std::abs(L))) break;
  }
}

// Runs the augmented Lagrangian from unit rows U, then repairs exactly by
// mixing with the all-aligned configuration. Returns the value and the unit rows.
void alm_run(AlmState& S, MatrixXd& U, const MultistartOptions& opts) {
  S.lambda.assign(S.pairs.size(), 0.0);
  S.rho = 10.0;
  double prev_viol = std::numeric_limits<double>::infinity();
  for (int outer = 0; outer < opts.max_outer; ++outer) {
    inner_solve(S, U, opts.max_inner);
    double viol = 0.0;
    for (std::size_t q = 0; q < S.pairs.size(); ++q) {
      const double g = S.gap(U, q);
      viol = std::max(viol, g);
      S.lambda[q] = std::max(0.0, S.lambda[q] + S.rho * g);
    }
    if (viol < opts.feas_tol) {
      if (outer > 2) break;
    } else if (viol > 0.25 * prev_viol) {
      S.rho = std::min(opts.rho_max, S.rho * 4.0);
    }
    prev_viol = viol;
  }
}

// Convex weight on the all-aligned configuration that makes U feasible.
double repair_shift(const AlmState& S, const MatrixXd& U) {
  double shift = 0.0;
  for (std::size_t q = 0; q < S.pairs.size(); ++q) {
    const double c = U.row(S.pairs[q][0]).dot(U.row(S.pairs[q][1]));
    if (c < S.lo[q]) shift = std::max(shift, (S.lo[q] - c) / (1.0 - c));
  }
  return std::min(1.0, shift);
}

// Augmented Lagrangian from unit rows U followed by an exact repair. Nearly
// parallel pairs make the repair expensive, so a second pass tightens them in
// relative terms. Returns the value and the repaired unit rows.
std::pair<double, MatrixXd> alm_solve(const Reduction& red, MatrixXd U, const MultistartOptions& opts) {
  AlmState S;
  S.red = &red;
  for (int a = 0; a < red.clusters; ++a)
    for (int b = a + 1; b < red.clusters; ++b)
      if (red.bound(a, b) > -1.0 + 1e-12) {
        S.pairs.push_back({a, b});
        S.lo.push_back(red.bound(a, b));
      }
  auto repaired = [&](const MatrixXd& X) {
    const double shift = repair_shift(S, X);
    const Eigen::Index dim = X.cols();
    MatrixXd V(X.rows(), dim + 1);
    V.leftCols(dim) = std::sqrt(1.0 - shift) * X;
    V.col(dim).setConstant(std::sqrt(shift));
    return std::pair<double, MatrixXd>{S.value(V), V};
  };

  alm_run(S, U, opts);
  auto best = repaired(U);
  if (repair_shift(S, U) > 1e-12) {
    S.floor = 0.0;
    alm_run(S, U, opts);
    auto tight = repaired(U);
    if (tight.first < best.first) best = std::move(tight);
  }
  return best;
}

MatrixXd unit_rows_from_gram(const MatrixXd& W, Rng& rng) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(W);
  const VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  MatrixXd V = es.eigenvectors() * ev.asDiagonal();
  for (Eigen::Index i = 0; i < V.rows(); ++i)
    if (V.row(i).norm() <= 1e-300)
      for (Eigen::Index c = 0; c < V.cols(); ++c) V(i, c) = gaussian(rng);
  return retract(V);
}

}  // namespace

DeltaResult delta_sdp(const DistanceProfile& P, const std::vector<double>& t, const SdpOptions& opts) {
  P.validate();
  check_weights(P, t);
  const Reduction red = reduce(P, t);
  const int nc = red.clusters;

  CorrelationSdp prob;
  prob.cost = red.tau * red.tau.transpose();
  for (int a = 0; a < nc; ++a)
    for (int b = a + 1; b < nc; ++b)
      if (red.bound(a, b) > -1.0 + 1e-12) prob.bounds.push_back({a, b, red.bound(a, b)});

  CorrelationSdpOptions sopts;
  sopts.gap_tol = opts.gap_tol;
  sopts.max_iter = opts.max_iter;
  const CorrelationSdpResult sol = solve_correlation_sdp(prob, sopts);

  DeltaResult out;
  out.gram = expand_gram(P, red, sol.solution);
  out.value = std::clamp(sol.upper, 0.0, 1.0);
  auto& diag = out.diagnostics;
  diag.iterations = sol.iterations;
  diag.lower_bound = sol.lower;
  diag.gap = sol.upper - sol.lower;
  diag.primal_residual = sol.primal_residual;
  diag.dual_residual = sol.dual_residual;
  diag.repair_shift = sol.repair_shift;
  diag.clusters = nc;
  diag.constraints = static_cast<int>(prob.bounds.size());
  fill_gram_diagnostics(P, out.gram, diag);

  if (!sol.certified) {
    // polish the interior-point iterate into an exactly feasible realization
    Rng rng = make_rng(opts.seed, 0x9011);
    MultistartOptions mo;
    mo.seed = opts.seed;
    auto [value, U] = alm_solve(red, unit_rows_from_gram(sol.solution, rng), mo);
    if (value < sol.upper) {
      out.value = std::clamp(value, 0.0, 1.0);
      out.gram = expand_gram(P, red, U * U.transpose());
      diag.gap = value - sol.lower;
      fill_gram_diagnostics(P, out.gram, diag);
    }
  }
  if (diag.gap <= opts.gap_tol) {
    diag.certificate = "duality-gap";
    return out;
  }
  if (opts.multistart_fallback) {
    MultistartOptions mo;
    mo.num_starts = opts.fallback_starts;
    mo.seed = opts.seed;
    const MultistartResult ms = delta_multistart(P, t, mo);
    const bool agree = std::abs(ms.value - out.value) <= 10.0 * opts.gap_tol;
    if (ms.value < out.value) {
      out.value = std::clamp(ms.value, 0.0, 1.0);
      out.gram = ms.vectors * ms.vectors.transpose();
      diag.gap = ms.value - sol.lower;
      fill_gram_diagnostics(P, out.gram, diag);
    }
    if (diag.gap <= opts.gap_tol) {
      diag.certificate = "duality-gap";
      return out;
    }
    if (agree) {
      diag.certificate = "multistart-agreement";
      return out;
    }
  }
  throw SolverFailure("delta SDP did not reach the duality-gap certificate", diag);
}

MultistartResult delta_multistart(const DistanceProfile& P, const std::vector<double>& weights,
                                  const MultistartOptions& opts) {
  P.validate();
  check_weights(P, weights);
  const Reduction red = reduce(P, weights);
  const Eigen::Index nc = red.clusters;
  const Eigen::Index dim = std::max<Eigen::Index>(2, nc);

  MultistartResult best;
  best.value = std::numeric_limits<double>::infinity();
  for (int s = 0; s < std::max(1, opts.num_starts); ++s) {
    Rng rng = make_rng(opts.seed, static_cast<std::uint64_t>(s));
    MatrixXd U(nc, dim);
    for (Eigen::Index i = 0; i < nc; ++i)
      for (Eigen::Index c = 0; c < dim; ++c) U(i, c) = gaussian(rng);
    auto [value, V] = alm_solve(red, retract(U), opts);
    if (value < best.value) {
      best.value = value;
      best.vectors = expand_vectors(P, red, V);
      best.best_start = s;
    }
  }
  best.value = std::clamp(best.value, 0.0, 1.0);
  return best;
}

RealizationReport realization_check(const DistanceProfile& P, const MatrixXd& vectors, double tol) {
  const Eigen::Index m = static_cast<Eigen::Index>(P.size());
  if (vectors.rows() != m) throw InvalidArgument("realization check: expected one vector per support point");
  RealizationReport rep;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double res = std::abs(vectors.row(i).norm() - P.radial(i));
    if (res > rep.worst_norm_residual || rep.worst_norm_index < 0) {
      rep.worst_norm_residual = std::max(rep.worst_norm_residual, res);
      rep.worst_norm_index = static_cast<int>(i);
    }
    for (Eigen::Index j = i + 1; j < m; ++j) {
      const double excess = (vectors.row(i) - vectors.row(j)).norm() - P.pairwise(i, j);
      if (excess > rep.worst_lipschitz_residual) {
        rep.worst_lipschitz_residual = excess;
        rep.worst_pair_i = static_cast<int>(i);
        rep.worst_pair_j = static_cast<int>(j);
      }
    }
  }
  rep.passed = rep.worst_norm_residual <= tol && rep.worst_lipschitz_residual <= tol;
  return rep;
}

Measure scaling_sequence(const MetricTree& tree, const TreeTangentCone& tangent, const Measure& nu, int n) {
  if (n < 1) throw InvalidArgument("scaling sequence: n must be positive");
  if (nu.space.kind() != SpaceKind::Cone) throw InvalidArgument("scaling sequence: nu must live on a tangent cone");
  nu.validate();
  const MetricGraph& g = tree.graph();
  std::vector<Point> pts;
  for (const Point& pt : nu.support) {
    const auto& v = pt.as<ConePoint>();
    if (v.is_origin()) {
      pts.emplace_back(tangent.base);
      continue;
    }
    const int k = v.direction.vertex;
    if (k < 0 || static_cast<std::size_t>(k) >= tangent.directions.size())
      throw InvalidArgument("scaling sequence: direction is not a tree direction");
    const double s = v.radius / n;
    const auto [far, reach] = g.farthest_along(tangent.base, tangent.directions[static_cast<std::size_t>(k)]);
    if (reach < s - 1e-12) throw InvalidArgument("scaling sequence: geodesic too short for the requested n");
    pts.emplace_back(g.along(tangent.base, far, std::min(s, reach)));
  }
  return Measure{ModelSpace(tree), std::move(pts), nu.weights};
}

ProductRealization product_realization(const std::vector<FactorRealization>& factors,
                                       const std::vector<std::vector<int>>& support_index,
                                       const std::vector<double>& weights) {
  if (factors.empty()) throw InvalidArgument("product realization: no factors");
  if (support_index.size() != factors.size()) throw InvalidArgument("product realization: index table arity mismatch");
  const std::size_t m = weights.size();
  ProductRealization out;
  out.gram = MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  for (std::size_t k = 0; k < factors.size(); ++k) {
    const auto& F = factors[k];
    const auto& idx = support_index[k];
    const auto mk = static_cast<int>(F.weights.size());
    if (idx.size() != m) throw InvalidArgument("product realization: index table has the wrong length");
    if (F.gram.rows() != mk || F.gram.cols() != mk || static_cast<int>(F.profile.size()) != mk)
      throw InvalidArgument("product realization: factor sizes disagree");
    std::vector<double> pushed(static_cast<std::size_t>(mk), 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      if (idx[i] < 0 || idx[i] >= mk) throw InvalidArgument("product realization: index out of range");
      pushed[static_cast<std::size_t>(idx[i])] += weights[i];
    }
    for (int a = 0; a < mk; ++a)
      if (std::abs(pushed[static_cast<std::size_t>(a)] - F.weights[static_cast<std::size_t>(a)]) > 1e-9)
        throw InvalidArgument("product realization: factor weights are not the pushforward of the product weights");
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        out.gram(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += F.gram(idx[i], idx[j]);
    out.factor_quotients.push_back(gram_quotient(F.gram, F.weights));
  }
  out.quotient = gram_quotient(out.gram, weights);
  const double qmax = *std::max_element(out.factor_quotients.begin(), out.factor_quotients.end());
  if (out.quotient > qmax + 1e-9) throw ComputationError("product realization: quotient exceeds the factor maximum");
  return out;
}

PointEstimate delta_at_point_estimate(const ModelSpace& space, const Point& p, const SamplerConfig& cfg) {
  validate_point(space, p);
  PointEstimate est;
  Rng rng = make_rng(cfg.seed, 0x5eed);

  auto consider = [&](const Measure& mu) {
    ++est.attempted;
    try {
      mu.validate();
      if (mu.distinct_points() < 2) return;
      const Point bar = barycenter(mu, cfg.barycenter);
      if (!same_point(space, bar, p, 1e-7)) return;
      const DistanceProfile P = DistanceProfile::from_points(space, mu.support, p);
      const DeltaResult r = delta_sdp(P, mu.weights, cfg.sdp);
      ++est.certified_measures;
      if (!est.has_witness || r.value > est.lower_bound) {
        est.has_witness = true;
        est.lower_bound = r.value;
        est.witness_support = mu.support;
        est.witness_weights = mu.weights;
      }
    } catch (const ComputationError&) {
      // uncertified candidates are simply not witnesses
    }
  };

  for (const Measure& mu : cfg.seeds) consider(mu);

  const bool cone_origin = space.kind() == SpaceKind::Cone && p.as<ConePoint>().is_origin();
  const int half = std::max(1, cfg.max_support / 2);
  for (int s = 0; s < cfg.num_samples; ++s) {
    std::vector<Point> pts;
    if (cone_origin && s % 2 == 1) {
      const auto& cone = space.as<EuclideanCone>();
      const std::size_t nb = cone.base().size();
      for (std::size_t v = 0; v < nb; ++v)
        if (uniform(rng) < 0.5) pts.emplace_back(ConePoint::ray(static_cast<int>(v), cfg.scale));
    } else {
      const int pairs = 1 + static_cast<int>(uniform_index(rng, static_cast<std::size_t>(half)));
      for (int k = 0; k < pairs; ++k) {
        Point q = sample_point(space, rng, cfg.scale);
        auto q2 = reflect_through(space, p, q, rng);
        if (!q2) continue;
        pts.push_back(std::move(q));
        pts.push_back(std::move(*q2));
      }
    }
    if (pts.size() < 2) {
      ++est.attempted;
      continue;
    }
    const std::size_t k = pts.size();
    consider(Measure{space, std::move(pts), std::vector<double>(k, 1.0 / static_cast<double>(k))});
  }
  return est;
}

}  // namespace cat0
