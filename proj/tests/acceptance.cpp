#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>

#include "cat0/invariant.hpp"
#include "cat0/randomgroups.hpp"
#include "cat0/regularity.hpp"
#include "cat0/spectral.hpp"
#include "support.hpp"

using namespace cat0;
using cat0::testing::kPi;

namespace {

struct Outcome {
  bool passed = true;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

double delta_of(const Measure& mu) { return delta_sdp(distance_profile(mu), mu.weights).value; }

Measure perturbed_heawood(Rng& rng) {
  Measure mu = cat0::testing::heawood_uniform();
  const auto w = cat0::testing::random_weights(rng, 14);
  for (std::size_t i = 0; i < 14; ++i) {
    mu.weights[i] = 0.8 / 14.0 + 0.2 * w[i];
    mu.support[i] = ConePoint::ray(static_cast<int>(i), 0.8 + 0.4 * uniform(rng));
  }
  return mu;
}

VertexMap random_map(const LabeledGraph& g, const ModelSpace& space, Rng& rng, double scale) {
  VertexMap f;
  for (std::size_t v = 0; v < g.num_vertices(); ++v) f.push_back(sample_point(space, rng, scale));
  return f;
}

VertexMap edge_lipschitz(const LabeledGraph& g, const ModelSpace& space, VertexMap f) {
  double worst = 0.0;
  for (auto [u, v] : g.edges())
    worst = std::max(worst, distance(space, f[static_cast<std::size_t>(u)], f[static_cast<std::size_t>(v)]));
  if (worst <= 1.0) return f;
  const Point base = f[0];
  for (auto& p : f) p = geodesic(space, base, p).eval(1.0 / worst);
  return f;
}

FiniteMetricSpace random_space(Rng& rng, std::size_t n, double diameter) {
  Eigen::MatrixXd pts(n, 2);
  for (std::size_t i = 0; i < n; ++i) pts.row(i) << uniform(rng), uniform(rng);
  Eigen::MatrixXd m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = (pts.row(i) - pts.row(j)).norm();
  return FiniteMetricSpace(m * (diameter / m.maxCoeff()));
}

Outcome flat_and_tree_targets() {
  Rng rng = make_rng(1001);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const ModelSpace flat = EuclideanSpace{1 + uniform_index(rng, 5)};
    worst = std::max(worst, delta_of(cat0::testing::random_measure(flat, rng, 2 + uniform_index(rng, 9))));
    const ModelSpace tree = cat0::testing::random_tree(rng);
    worst = std::max(worst, delta_of(cat0::testing::random_measure(tree, rng, 2 + uniform_index(rng, 9))));
  }
  return {worst <= 1e-6, fmt("max delta %.3g over 200 measures", worst)};
}

Outcome tree_products() {
  Rng rng = make_rng(1002);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const ModelSpace space = cat0::testing::random_tree_product(rng);
    worst = std::max(worst, delta_of(cat0::testing::random_measure(space, rng, 2 + uniform_index(rng, 9))));
  }
  return {worst <= 0.5 + 1e-4, fmt("max delta %.6f", worst)};
}

Outcome heawood_building() {
  const Measure mu = cat0::testing::heawood_uniform();
  const DistanceProfile P = distance_profile(mu);
  const DeltaResult sdp = delta_sdp(P, mu.weights);
  const MultistartResult ms = delta_multistart(P, mu.weights);
  const bool ok = sdp.value >= 0.0541 - 1e-3 && std::abs(sdp.value - ms.value) <= 1e-4;
  return {ok, fmt("sdp %.6f, multistart %.6f", sdp.value, ms.value)};
}

Outcome sandwich() {
  const ModelSpace line = EuclideanSpace{1};
  const ModelSpace tripod = cat0::testing::tripod();
  double line_err = 0.0, tree_err = 0.0;
  for (const LabeledGraph& g : cat0::testing::small_graphs(20, 1004)) {
    const double l1 = laplacian_lambda1(g);
    line_err = std::max(line_err, std::abs(wang_lambda1(g, line).estimate - l1));
    tree_err = std::max(tree_err, std::abs(wang_lambda1(g, tripod).estimate - l1));
  }
  return {line_err <= 1e-5 && tree_err <= 1e-3, fmt("max |wang - lambda1|: line %.2g, tripod %.2g", line_err, tree_err)};
}

Outcome continuity_and_scaling() {
  Rng rng = make_rng(1005);
  const ModelSpace cone = cat0::testing::heawood_cone();
  SdpOptions tight;
  tight.gap_tol = 3e-9;
  double scale_err = 0.0;
  for (int k = 0; k < 20; ++k) {
    const Measure mu = k % 2 ? cat0::testing::random_measure(cone, rng, 3 + uniform_index(rng, 6))
                             : cat0::testing::random_measure(cat0::testing::random_tree_product(rng), rng, 3 + uniform_index(rng, 6));
    const DistanceProfile P = distance_profile(mu);
    const double base = delta_sdp(P, mu.weights, tight).value;
    for (double c : {0.01, 0.3, 2.0, 17.0, 500.0})
      scale_err = std::max(scale_err, std::abs(delta_sdp(P.scaled(c), mu.weights, tight).value - base));
  }
  double jump = 0.0;
  for (int k = 0; k < 20; ++k) {
    const Measure mu = perturbed_heawood(rng);
    Measure nu = mu;
    for (std::size_t i = 0; i < nu.size(); ++i) {
      const auto& c = mu.support[i].as<ConePoint>();
      nu.support[i] = ConePoint::ray(c.direction.vertex, c.radius + 4e-4 * (2.0 * uniform(rng) - 1.0));
    }
    const auto P = distance_profile(mu), Q = distance_profile(nu);
    if ((P.pairwise - Q.pairwise).cwiseAbs().maxCoeff() > 1e-3 || (P.radial - Q.radial).cwiseAbs().maxCoeff() > 1e-3)
      return {false, "perturbation exceeded 1e-3"};
    jump = std::max(jump, std::abs(delta_sdp(P, mu.weights).value - delta_sdp(Q, nu.weights).value));
  }
  return {scale_err <= 1e-8 && jump <= 0.01, fmt("scaling drift %.2g, perturbation jump %.2g", scale_err, jump)};
}

Outcome tangent_scaling() {
  Rng rng = make_rng(1006);
  double worst = 0.0;
  for (int k = 0; k < 10; ++k) {
    const MetricTree tree = MetricTree::random(4 + uniform_index(rng, 8), rng);
    const int p = static_cast<int>(uniform_index(rng, tree.num_vertices()));
    const TreeTangentCone tc = tree_tangent_cone(tree, TreePoint::at_vertex(p));
    const std::size_t dirs = tc.directions.size();
    const std::size_t m = 2 + uniform_index(rng, 6);
    std::vector<Point> support;
    for (std::size_t i = 0; i < m; ++i)
      support.push_back(ConePoint::ray(static_cast<int>(uniform_index(rng, dirs)), uniform(rng, 0.02, 0.2)));
    const Measure nu{tc.cone, support, cat0::testing::random_weights(rng, m)};
    const double target = delta_of(nu);
    for (int n : {1, 10, 100}) worst = std::max(worst, std::abs(delta_of(scaling_sequence(tree, tc, nu, n)) - target));
  }
  return {worst <= 1e-6, fmt("max |delta(mu_n) - delta(nu)| %.2g", worst)};
}

Outcome variance_inequality() {
  Rng rng = make_rng(1007);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const ModelSpace tree = cat0::testing::random_tree(rng);
    const Measure mu = cat0::testing::random_measure(tree, rng, 2 + uniform_index(rng, 9));
    const Point bar = barycenter(mu);
    for (int j = 0; j < 1000; ++j) worst = std::min(worst, variance_gap(mu, bar, sample_point(tree, rng)));
  }
  return {worst >= -1e-8, fmt("min variance gap %.3g", worst)};
}

Outcome property_p_witness() {
  Rng rng = make_rng(1008);
  int passed = 0;
  for (int k = 0; k < 50; ++k) {
    const double diam = kPi / 4 + (2 * kPi - kPi / 4) * k / 49.0;
    const FiniteMetricSpace X = random_space(rng, 2 + uniform_index(rng, 15), diam);
    const auto w = property_p_witness_from_net(X);
    passed += w.report.passed && check_property_p(X, w.net, w.triple).passed;
  }
  return {passed == 50, fmt("%.0f of 50 witnesses verified", passed)};
}

Outcome expander_machinery() {
  std::vector<LabeledGraph> regular, cycles;
  for (std::size_t n : {50u, 100u, 200u}) {
    regular.push_back(random_regular_graph(n, 3, 1009 + n));
    cycles.push_back(LabeledGraph::cycle(n));
  }
  const auto good = expander_certificate(regular, 3, 0.05);
  const auto bad = expander_certificate(cycles, 2, 0.05);
  return {good.passed && !bad.passed,
          fmt("min lambda1 %.4f on 3-regular samples, %.4f on cycles",
              *std::min_element(good.lambda1s.begin(), good.lambda1s.end()),
              *std::min_element(bad.lambda1s.begin(), bad.lambda1s.end()))};
}

Outcome poincare_obstruction() {
  Rng rng = make_rng(1010);
  const LabeledGraph k4 = LabeledGraph::complete(4);
  const ModelSpace tree = MetricTree::random(10, rng);
  const double B4 = 1.0 / std::sqrt(8.0 / 3.0);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k)
    worst = std::max(worst, rms_displacement(k4, tree, edge_lipschitz(k4, tree, random_map(k4, tree, rng, 3.0))));

  const double lambda = 0.05;
  const auto rho1 = [](double s) { return s / 4.0; };
  std::vector<LabeledGraph> family;
  for (std::size_t n : {1000u, 16000u, 32000u}) family.push_back(random_regular_graph(n, 3, 1010 + n));
  const auto cert = expander_certificate(family, 3, lambda);
  bool consistent = cert.passed;
  ObstructionReport last;
  for (const auto& g : family) {
    last = embedding_obstruction(g, lambda, 1.0, rho1);
    consistent = consistent && last.contradiction_flagged == (last.median_distance > 4.0 * last.bound);
  }
  const bool ok = worst <= B4 + 1e-6 && consistent && last.contradiction_flagged;
  return {ok, fmt("K4 worst RMS %.4f (bound %.4f)", worst, B4) +
                  fmt(", n=32000 median %.0f vs 4B %.3f flagged", last.median_distance, 4.0 * last.bound)};
}

Outcome excluded_reports() {
  const FixedPointReport fp = fixed_point_report(LabeledGraph::heawood(), 0.3, {6, 0.05, 3, 3, 0.5});
  bool ok = fp.hypotheses.size() == 4 && !fp.citation.empty() && fp.verdict.find("probab") == std::string::npos;
  const Measure mu = cat0::testing::heawood_uniform();
  const DeltaResult r = delta_sdp(distance_profile(mu), mu.weights);
  ok = ok && r.diagnostics.lower_bound <= r.value && r.value - r.diagnostics.lower_bound <= 1e-7;
  return {ok, "excluded from quantitative acceptance; hypothesis checklist and certified lower bound reported"};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"delta vanishes on flat and tree targets", flat_and_tree_targets},
      {"delta at most 1/2 on products of two trees", tree_products},
      {"Heawood cone lower bound at p = 2", heawood_building},
      {"sandwich theorem for Wang's invariant", sandwich},
      {"continuity and scaling of delta", continuity_and_scaling},
      {"tangent-cone scaling sequence", tangent_scaling},
      {"variance inequality on trees", variance_inequality},
      {"property P witness from a net", property_p_witness},
      {"expander certificate", expander_machinery},
      {"Poincare obstruction", poincare_obstruction},
      {"fixed-point probability and sup delta reported only", excluded_reports},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failures += !o.passed;
    std::printf("%s %zu %s: %s (%.1f s)\n", o.passed ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
