#include <doctest.h>

#include <cmath>
#include <numeric>

#include "cat0/error.hpp"
#include "cat0/regularity.hpp"
#include "support.hpp"

using namespace cat0;
using cat0::testing::kPi;

namespace {

FiniteMetricSpace two_points(double d) {
  Eigen::MatrixXd m(2, 2);
  m << 0, d, d, 0;
  return FiniteMetricSpace(m);
}

FiniteMetricSpace path_space(std::size_t n) {
  Eigen::MatrixXd m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = std::abs(static_cast<double>(i) - static_cast<double>(j));
  return FiniteMetricSpace(m);
}

// Points in the plane rescaled to the requested diameter.
FiniteMetricSpace random_space(Rng& rng, std::size_t n, double diameter) {
  Eigen::MatrixXd pts(n, 2);
  for (std::size_t i = 0; i < n; ++i) pts.row(i) << uniform(rng), uniform(rng);
  Eigen::MatrixXd m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = (pts.row(i) - pts.row(j)).norm();
  return FiniteMetricSpace(m * (diameter / m.maxCoeff()));
}

std::vector<std::size_t> all_points(const FiniteMetricSpace& X) {
  std::vector<std::size_t> s(X.size());
  std::iota(s.begin(), s.end(), 0);
  return s;
}

std::size_t brute_cover(const FiniteMetricSpace& X, double r) {
  const std::size_t n = X.size();
  std::size_t best = n;
  for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
    bool ok = true;
    for (std::size_t x = 0; x < n && ok; ++x) {
      bool hit = false;
      for (std::size_t c = 0; c < n && !hit; ++c) hit = ((mask >> c) & 1) && X(c, x) < r;
      ok = hit;
    }
    if (ok) best = std::min<std::size_t>(best, static_cast<std::size_t>(__builtin_popcountll(mask)));
  }
  return best;
}

}  // namespace

TEST_CASE("covering_number examples") {
  const auto seven = covering_number(FiniteMetricSpace::uniform(7, kPi), kPi / 12);
  CHECK(seven.count == 7);
  CHECK(seven.exact);
  CHECK(covering_number(two_points(1.0), 2.0).count == 1);
  CHECK(covering_number(two_points(1.0), 0.4).count == 2);
  CHECK(covering_number(two_points(1.0), 1.0).count == 2);  // open balls
}

TEST_CASE("covering_number matches exhaustive search") {
  Rng rng = make_rng(60);
  for (int k = 0; k < 25; ++k) {
    const FiniteMetricSpace X = random_space(rng, 3 + uniform_index(rng, 8), 2.0);
    const double r = uniform(rng, 0.1, 1.5);
    const auto c = covering_number(X, r);
    CHECK(c.count == brute_cover(X, r));
    for (std::size_t x = 0; x < X.size(); ++x) {
      bool hit = false;
      for (std::size_t ctr : c.centers) hit = hit || X(ctr, x) < r;
      CHECK(hit);
    }
  }
}

TEST_CASE("large spaces fall back to a greedy upper bound") {
  Rng rng = make_rng(61);
  const FiniteMetricSpace X = random_space(rng, 40, 3.0);
  const auto c = covering_number(X, 0.5);
  CHECK_FALSE(c.exact);
  CHECK(c.centers.size() == c.count);
}

TEST_CASE("check_property_p examples") {
  const PropertyPTriple t{kPi / 3, 1.0, kPi / 6, ""};
  const auto X = two_points(kPi);
  CHECK(check_property_p(X, {0, 1}, t).passed);
  CHECK(check_property_p(X, {0}, t).passed);

  const auto three = FiniteMetricSpace::uniform(3, kPi / 2);
  const auto fail = check_property_p(three, {0, 1, 2}, t);
  CHECK_FALSE(fail.passed);
  REQUIRE(fail.failures.size() == 3);
  CHECK(fail.failures.front().separating == 2);
  CHECK(check_property_p(three, {0, 1, 2}, {kPi / 3, 2.0 / 3.0, kPi / 6, ""}).passed);

  CHECK_THROWS_AS(check_property_p(X, {}, t), InvalidArgument);
  CHECK_THROWS_AS(check_property_p(X, {0}, {kPi, 1.0, 0.1, ""}), InvalidArgument);
  CHECK_THROWS_AS(check_property_p(X, {5}, t), InvalidArgument);
}

TEST_CASE("property_p_witness_from_net examples") {
  const auto two = property_p_witness_from_net(two_points(kPi));
  CHECK(two.cover_number == 2);
  CHECK(two.triple.alpha == doctest::Approx(1.0));
  CHECK(two.triple.theta == doctest::Approx(kPi / 3));
  CHECK(two.triple.epsilon == doctest::Approx(kPi / 6));
  CHECK(two.report.passed);

  const auto small = property_p_witness_from_net(FiniteMetricSpace::uniform(5, 0.9));
  CHECK(small.report.passed);
  CHECK(small.report.pairs_checked == 0);

  const LabeledGraph h = LabeledGraph::heawood();
  const auto heawood = property_p_witness_from_net(FiniteMetricSpace::graph_metric(h.num_vertices(), h.edges(), kPi / 3));
  CHECK(heawood.cover_number == 14);
  CHECK(heawood.triple.alpha == doctest::Approx(1.0 / 7.0));
  CHECK(heawood.report.passed);
}

TEST_CASE("doubling_constant examples") {
  CHECK(doubling_constant(FiniteMetricSpace::uniform(4, 1.0)).constant == 4);
  CHECK(doubling_constant(two_points(1.0)).constant == 2);
  const auto path = doubling_constant(path_space(5));
  CHECK(path.constant == 3);
  CHECK(path.exact);
}

TEST_CASE("doubling_p_triple examples") {
  const auto two = doubling_p_triple(2);
  CHECK(two.theta == doctest::Approx(kPi / 3));
  CHECK(two.alpha == doctest::Approx(0.5));
  CHECK(two.epsilon == doctest::Approx(kPi / 6));
  CHECK(two.note.empty());

  const auto one = doubling_p_triple(1);
  CHECK(one.alpha == doctest::Approx(1.0));
  CHECK_FALSE(one.note.empty());
  CHECK(doubling_p_triple(3, 1).alpha == doctest::Approx(2.0 / 3.0));
  CHECK_THROWS_AS(doubling_p_triple(0), InvalidArgument);
}

TEST_CASE("doubling of a sampled Heawood cone ball feeds the base check") {
  const LabeledGraph h = LabeledGraph::heawood();
  const ModelSpace cone = cat0::testing::heawood_cone();
  std::vector<Point> grid{ConePoint::origin()};
  for (int v = 0; v < 14; ++v)
    for (double r : {0.5, 1.0}) grid.push_back(ConePoint::ray(v, r));
  Eigen::MatrixXd m(grid.size(), grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (std::size_t j = 0; j < grid.size(); ++j) m(i, j) = distance(cone, grid[i], grid[j]);
  const auto N = doubling_constant(FiniteMetricSpace(m, 1e-9));
  CHECK(N.constant >= 2);
  const auto triple = doubling_p_triple(static_cast<int>(N.constant));
  const FiniteMetricSpace base = FiniteMetricSpace::graph_metric(h.num_vertices(), h.edges(), kPi / 3);
  const auto pieces = covering_number(base, kPi / 12);
  CHECK(check_property_p(base, pieces.centers, triple).passed);
}

TEST_CASE("covering_number is nonincreasing in r") {
  Rng rng = make_rng(62);
  for (int k = 0; k < 15; ++k) {
    const FiniteMetricSpace X = random_space(rng, 4 + uniform_index(rng, 10), 3.0);
    std::size_t prev = X.size() + 1;
    for (double r : {0.05, 0.3, 0.7, 1.2, 2.0, 3.01}) {
      const std::size_t c = covering_number(X, r).count;
      CHECK(c <= prev);
      prev = c;
    }
    CHECK(prev == 1);
  }
}

TEST_CASE("check_property_p is monotone in the triple") {
  Rng rng = make_rng(63);
  for (int k = 0; k < 20; ++k) {
    const FiniteMetricSpace X = random_space(rng, 4 + uniform_index(rng, 8), uniform(rng, kPi / 4, 2 * kPi));
    std::vector<std::size_t> S;
    for (std::size_t i = 0; i < X.size(); ++i)
      if (uniform(rng) < 0.6) S.push_back(i);
    if (S.empty()) S.push_back(0);
    const PropertyPTriple t{uniform(rng, 0.2, 1.5), uniform(rng, 0.1, 1.0), uniform(rng, 0.05, 1.0), ""};
    if (!check_property_p(X, S, t).passed) continue;
    CHECK(check_property_p(X, S, {std::min(1.55, t.theta * 1.1), t.alpha, t.epsilon, ""}).passed);
    CHECK(check_property_p(X, S, {t.theta, t.alpha * 0.7, t.epsilon, ""}).passed);
    CHECK(check_property_p(X, S, {t.theta, t.alpha, t.epsilon * 0.5, ""}).passed);
  }
}

TEST_CASE("net witnesses pass their own check") {
  Rng rng = make_rng(64);
  for (int k = 0; k < 50; ++k) {
    const double diam = kPi / 4 + (2 * kPi - kPi / 4) * k / 49.0;
    const FiniteMetricSpace X = random_space(rng, 2 + uniform_index(rng, 15), diam);
    const auto w = property_p_witness_from_net(X);
    CHECK(w.report.passed);
    CHECK(check_property_p(X, w.net, w.triple).passed);
  }
}

TEST_CASE("doubling balls: exact cover never exceeds greedy") {
  Rng rng = make_rng(65);
  for (int k = 0; k < 10; ++k) {
    const FiniteMetricSpace X = random_space(rng, 5 + uniform_index(rng, 8), 2.0);
    const auto d = doubling_constant(X);
    std::vector<std::size_t> ball;
    for (std::size_t y = 0; y < X.size(); ++y)
      if (X(d.center, y) <= d.radius) ball.push_back(y);
    CHECK(closed_cover(X, ball, d.radius / 2).count == d.constant);
    // greedy: repeatedly take the center covering most uncovered points
    std::vector<bool> covered(X.size(), true);
    for (std::size_t y : ball) covered[y] = false;
    std::size_t greedy = 0;
    for (;;) {
      std::size_t best = 0, gain = 0;
      for (std::size_t c = 0; c < X.size(); ++c) {
        std::size_t g = 0;
        for (std::size_t y : ball) g += !covered[y] && X(c, y) <= d.radius / 2;
        if (g > gain) {
          gain = g;
          best = c;
        }
      }
      if (gain == 0) break;
      ++greedy;
      for (std::size_t y : ball) covered[y] = covered[y] || X(best, y) <= d.radius / 2;
    }
    CHECK(d.constant <= greedy);
  }
}

TEST_CASE("triples outside the allowed ranges are rejected") {
  CHECK_THROWS_AS((PropertyPTriple{0.0, 0.5, 0.1, ""}.validate()), InvalidArgument);
  CHECK_THROWS_AS((PropertyPTriple{1.0, 0.0, 0.1, ""}.validate()), InvalidArgument);
  CHECK_THROWS_AS((PropertyPTriple{1.0, 0.5, 0.0, ""}.validate()), InvalidArgument);
  CHECK_NOTHROW((PropertyPTriple{1.0, 1.0, 0.1, ""}.validate()));
  CHECK(all_points(two_points(1.0)).size() == 2);
}
