#include <doctest.h>

#include <cmath>

#include "cat0/error.hpp"
#include "cat0/invariant.hpp"
#include "support.hpp"

using namespace cat0;
using cat0::testing::kPi;

namespace {

DistanceProfile two_point_profile(double d1, double d2) {
  DistanceProfile P{Eigen::MatrixXd(2, 2), Eigen::Vector2d(d1, d2)};
  P.pairwise << 0, d1 + d2, d1 + d2, 0;
  return P;
}

struct Instance {
  DistanceProfile profile;
  std::vector<double> weights;
};

// Perturbations of the uniform Heawood measure keep the barycenter at the cone point.
Measure perturbed_heawood(Rng& rng) {
  Measure mu = cat0::testing::heawood_uniform();
  const auto w = cat0::testing::random_weights(rng, 14);
  for (std::size_t i = 0; i < 14; ++i) {
    mu.weights[i] = 0.8 / 14.0 + 0.2 * w[i];
    mu.support[i] = ConePoint::ray(static_cast<int>(i), 0.8 + 0.4 * uniform(rng));
  }
  return mu;
}

// Random measures on the Heawood cone, near-uniform measures at its cone point
// and random measures on products of trees.
std::vector<Instance> random_instances(std::size_t count, std::uint64_t seed, std::size_t max_support = 8) {
  Rng rng = make_rng(seed);
  const ModelSpace cone = cat0::testing::heawood_cone();
  std::vector<Instance> out;
  while (out.size() < count) {
    const std::size_t m = 3 + uniform_index(rng, max_support - 2);
    const Measure mu = out.size() % 3 == 0   ? cat0::testing::random_measure(cone, rng, m)
                       : out.size() % 3 == 1 ? perturbed_heawood(rng)
                                             : cat0::testing::random_measure(cat0::testing::random_tree_product(rng), rng, m);
    out.push_back({distance_profile(mu), mu.weights});
  }
  return out;
}

}  // namespace

TEST_CASE("distance_profile examples") {
  const ModelSpace seg = MetricTree::path({2.0});
  const auto P = distance_profile(Measure{seg, {TreePoint::at_vertex(0), TreePoint::at_vertex(1)}, {0.5, 0.5}});
  CHECK(P.radial(0) == doctest::Approx(1.0));
  CHECK(P.radial(1) == doctest::Approx(1.0));
  CHECK(P.pairwise(0, 1) == doctest::Approx(2.0));

  const ModelSpace t = cat0::testing::tripod();
  const auto T = distance_profile(
      uniform_measure(t, {TreePoint::at_vertex(1), TreePoint::at_vertex(2), TreePoint::at_vertex(3)}));
  for (int i = 0; i < 3; ++i) {
    CHECK(T.radial(i) == doctest::Approx(1.0));
    for (int j = 0; j < 3; ++j)
      if (i != j) CHECK(T.pairwise(i, j) == doctest::Approx(2.0));
  }

  const ModelSpace e = EuclideanSpace{2};
  const auto S = distance_profile(uniform_measure(
      e, {Point::euclidean({0, 0}), Point::euclidean({1, 0}), Point::euclidean({1, 1}), Point::euclidean({0, 1})}));
  for (int i = 0; i < 4; ++i) CHECK(S.radial(i) == doctest::Approx(std::sqrt(0.5)));
  CHECK(S.pairwise(0, 1) == doctest::Approx(1.0));
  CHECK(S.pairwise(0, 2) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("delta_sdp examples") {
  CHECK(delta_sdp(two_point_profile(1.0, 3.0), {0.75, 0.25}).value == doctest::Approx(0.0).epsilon(1e-9));

  DistanceProfile tri{Eigen::MatrixXd::Constant(3, 3, 2.0), Eigen::Vector3d::Ones()};
  tri.pairwise.diagonal().setZero();
  CHECK(delta_sdp(tri, {1.0 / 3, 1.0 / 3, 1.0 / 3}).value <= 1e-7);

  const Measure h = cat0::testing::heawood_uniform();
  const auto r = delta_sdp(distance_profile(h), h.weights);
  CHECK(r.value >= 0.0541 - 1e-3);
  CHECK(r.diagnostics.certificate == "duality-gap");
  CHECK(r.diagnostics.gap <= 1e-7);
  CHECK(r.diagnostics.max_norm_residual <= 1e-9);
  CHECK(r.diagnostics.max_lipschitz_residual <= 1e-9);
}

TEST_CASE("delta_sdp rejects bad weights") {
  CHECK_THROWS_AS(delta_sdp(two_point_profile(1, 1), {0.5, 0.6}), InvalidArgument);
  CHECK_THROWS_AS(delta_sdp(two_point_profile(1, 1), {1.0, 0.0}), InvalidArgument);
}

TEST_CASE("delta_multistart examples") {
  CHECK(delta_multistart(two_point_profile(1, 2), {2.0 / 3, 1.0 / 3}).value <= 1e-6);
  Rng rng = make_rng(1);
  const Measure mu = cat0::testing::random_measure(EuclideanSpace{4}, rng, 10);
  CHECK(delta_multistart(distance_profile(mu), mu.weights).value <= 1e-6);
  const Measure h = cat0::testing::heawood_uniform();
  const auto P = distance_profile(h);
  CHECK(std::abs(delta_multistart(P, h.weights).value - delta_sdp(P, h.weights).value) <= 1e-4);
}

TEST_CASE("realization_check examples") {
  const auto P = two_point_profile(1, 1);
  Eigen::MatrixXd v(2, 2);
  v << 1, 0, -1, 0;
  CHECK(realization_check(P, v).passed);
  v << 1, 0, 1, 0;
  CHECK(realization_check(P, v).passed);
  v << 2, 0, -1, 0;
  const auto rep = realization_check(P, v);
  CHECK_FALSE(rep.passed);
  CHECK(rep.worst_norm_index == 0);
}

TEST_CASE("scaling_sequence examples") {
  const MetricTree t = MetricTree::star({1.0, 1.0, 1.0});
  const auto tc = tree_tangent_cone(t, TreePoint::at_vertex(0));
  const Measure nu = uniform_measure(tc.cone, {ConePoint::ray(0, 1), ConePoint::ray(1, 1), ConePoint::ray(2, 1)});
  const Measure mu = scaling_sequence(t, tc, nu, 10);
  for (const auto& p : mu.support) CHECK(distance(mu.space, p, TreePoint::at_vertex(0)) == doctest::Approx(0.1));
  CHECK(delta_sdp(distance_profile(mu), mu.weights).value <= 1e-7);
  CHECK_THROWS_AS(scaling_sequence(t, tc, uniform_measure(tc.cone, {ConePoint::ray(0, 5), ConePoint::ray(1, 5)}), 1),
                  InvalidArgument);

  const MetricTree line = MetricTree::path({1.0, 1.0});
  const auto lc = tree_tangent_cone(line, TreePoint::at_vertex(1));
  const Measure two = Measure{lc.cone, {ConePoint::ray(0, 0.5), ConePoint::ray(1, 1.0)}, {2.0 / 3, 1.0 / 3}};
  for (int n : {1, 3, 7}) {
    const Measure m = scaling_sequence(line, lc, two, n);
    CHECK(delta_sdp(distance_profile(m), m.weights).value <= 1e-7);
  }

  const MetricTree star = MetricTree::star(std::vector<double>(14, 1.0));
  const auto sc = tree_tangent_cone(star, TreePoint::at_vertex(0));
  std::vector<Point> rays;
  for (int i = 0; i < 14; ++i) rays.push_back(ConePoint::ray(i, 0.5 + 0.03 * i));
  Rng rng = make_rng(5);
  const Measure nu14{sc.cone, rays, cat0::testing::random_weights(rng, 14)};
  const double target = delta_sdp(distance_profile(nu14), nu14.weights).value;
  for (int n : {1, 10, 100}) {
    const Measure m = scaling_sequence(star, sc, nu14, n);
    CHECK(std::abs(delta_sdp(distance_profile(m), m.weights).value - target) <= 1e-6);
  }
}

TEST_CASE("product_realization examples") {
  const auto P = two_point_profile(1, 1);
  Eigen::MatrixXd g(2, 2);
  g << 1, -1, -1, 1;
  const FactorRealization flat{P, {0.5, 0.5}, g};
  const auto both = product_realization({flat, flat}, {{0, 1}, {0, 1}}, {0.5, 0.5});
  CHECK(both.quotient == doctest::Approx(0.0));

  Eigen::MatrixXd g2(2, 2);
  g2 << 1, 0, 0, 1;
  const FactorRealization ortho{P, {0.5, 0.5}, g2};
  const auto mixed = product_realization({flat, ortho}, {{0, 1}, {0, 1}}, {0.5, 0.5});
  CHECK(mixed.quotient <= mixed.factor_quotients[1] + 1e-12);

  const auto single = product_realization({ortho}, {{0, 1}}, {0.5, 0.5});
  CHECK(single.gram.isApprox(g2));
  CHECK_THROWS_AS(product_realization({ortho}, {{0, 0}}, {0.5, 0.5}), InvalidArgument);
}

TEST_CASE("delta_at_point_estimate examples") {
  SamplerConfig cfg;
  cfg.num_samples = 12;
  const auto e = delta_at_point_estimate(EuclideanSpace{2}, Point::euclidean({0.3, -1}), cfg);
  REQUIRE(e.has_witness);
  CHECK(e.lower_bound <= 1e-6);

  Rng rng = make_rng(3);
  const MetricTree tree = MetricTree::random(8, rng);
  for (int v = 0; v < 8; ++v) {
    const auto t = delta_at_point_estimate(tree, TreePoint::at_vertex(v), cfg);
    if (tree.graph().directions(TreePoint::at_vertex(v)).size() < 2) {
      // only the Dirac measure has its barycenter at a leaf
      CHECK_FALSE(t.has_witness);
      continue;
    }
    REQUIRE(t.has_witness);
    CHECK(t.lower_bound <= 1e-6);
  }

  cfg.seeds = {cat0::testing::heawood_uniform()};
  const auto h = delta_at_point_estimate(cat0::testing::heawood_cone(), ConePoint::origin(), cfg);
  REQUIRE(h.has_witness);
  CHECK(h.lower_bound >= 0.0541 - 1e-3);
}

TEST_CASE("delta lies in [0, 1] and flat targets give zero") {
  for (const auto& inst : random_instances(20, 31)) {
    const double v = delta_sdp(inst.profile, inst.weights).value;
    CHECK(v >= -1e-9);
    CHECK(v <= 1.0 + 1e-9);
  }
  Rng rng = make_rng(32);
  for (int k = 0; k < 10; ++k) {
    const Measure mu = cat0::testing::random_measure(EuclideanSpace{1 + uniform_index(rng, 4)}, rng, 2 + uniform_index(rng, 9));
    CHECK(delta_sdp(distance_profile(mu), mu.weights).value <= 1e-6);
  }
}

TEST_CASE("profile sufficiency") {
  const Measure h = cat0::testing::heawood_uniform();
  Measure rotated = h;
  Rng rng = make_rng(33);
  rotated.weights = cat0::testing::random_weights(rng, 14);
  Measure original = rotated;
  // i -> i+1 (mod 7) on both colour classes is an automorphism of the Heawood graph
  for (int i = 0; i < 14; ++i) {
    const int j = i < 7 ? (i + 1) % 7 : 7 + (i - 7 + 1) % 7;
    rotated.support[static_cast<std::size_t>(i)] = ConePoint::ray(j, 1.0 + 0.05 * i);
    original.support[static_cast<std::size_t>(i)] = ConePoint::ray(i, 1.0 + 0.05 * i);
  }
  const auto a = delta_sdp(distance_profile(original), original.weights).value;
  const auto b = delta_sdp(distance_profile(rotated), rotated.weights).value;
  CHECK(std::abs(a - b) <= 1e-8);
}

TEST_CASE("scale invariance") {
  for (const auto& inst : random_instances(6, 34)) {
    const double base = delta_sdp(inst.profile, inst.weights).value;
    for (double c : {0.01, 0.5, 7.0, 300.0})
      CHECK(std::abs(delta_sdp(inst.profile.scaled(c), inst.weights).value - base) <= 1e-8);
  }
}

TEST_CASE("relaxing Lipschitz bounds never increases delta") {
  for (const auto& inst : random_instances(10, 35)) {
    DistanceProfile relaxed = inst.profile;
    const auto m = static_cast<Eigen::Index>(relaxed.size());
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < m; ++j)
        if (i != j)
          relaxed.pairwise(i, j) = std::min(relaxed.pairwise(i, j) + 0.1, relaxed.radial(i) + relaxed.radial(j));
    CHECK(delta_sdp(relaxed, inst.weights).value <= delta_sdp(inst.profile, inst.weights).value + 1e-8);
  }
}

TEST_CASE("tree products stay below one half") {
  Rng rng = make_rng(36);
  for (int k = 0; k < 15; ++k) {
    const Measure mu = cat0::testing::random_measure(cat0::testing::random_tree_product(rng), rng, 2 + uniform_index(rng, 9));
    CHECK(delta_sdp(distance_profile(mu), mu.weights).value <= 0.5 + 1e-4);
  }
}

TEST_CASE("oracle agreement") {
  for (const auto& inst : random_instances(200, 37, 12)) {
    const double sdp = delta_sdp(inst.profile, inst.weights).value;
    const double ms = delta_multistart(inst.profile, inst.weights).value;
    CHECK(std::abs(sdp - ms) <= 1e-4);
    CHECK(ms >= sdp - 1e-7);
  }
}

TEST_CASE("multistart vectors are realizations") {
  for (const auto& inst : random_instances(5, 38)) {
    const auto ms = delta_multistart(inst.profile, inst.weights);
    CHECK(realization_check(inst.profile, ms.vectors, 1e-8).passed);
  }
}

TEST_CASE("continuity under small profile changes") {
  Rng rng = make_rng(39);
  for (int k = 0; k < 5; ++k) {
    const Measure mu = perturbed_heawood(rng);
    Measure nu = mu;
    for (std::size_t i = 0; i < nu.size(); ++i) {
      const auto& c = mu.support[i].as<ConePoint>();
      nu.support[i] = ConePoint::ray(c.direction.vertex, c.radius + 4e-4 * (2.0 * uniform(rng) - 1.0));
    }
    const auto P = distance_profile(mu), Q = distance_profile(nu);
    REQUIRE((P.pairwise - Q.pairwise).cwiseAbs().maxCoeff() <= 1e-3);
    REQUIRE((P.radial - Q.radial).cwiseAbs().maxCoeff() <= 1e-3);
    const double a = delta_sdp(P, mu.weights).value;
    CHECK(a > 0.01);
    CHECK(std::abs(a - delta_sdp(Q, nu.weights).value) <= 0.01);
  }
}
