#include <doctest.h>

#include "cat0/commands.hpp"
#include "cat0/error.hpp"
#include "cat0/io.hpp"
#include "support.hpp"

using namespace cat0;
using cat0::io::json;
using cat0::testing::kPi;

namespace {

std::vector<ModelSpace> sample_spaces(Rng& rng) {
  return {EuclideanSpace{3}, cat0::testing::tripod(), cat0::testing::random_tree(rng), cat0::testing::heawood_cone(),
          cat0::testing::random_tree_product(rng), ProductSpace({EuclideanSpace{1}, cat0::testing::tripod()})};
}

}  // namespace

TEST_CASE("round12 keeps twelve significant digits") {
  CHECK(io::round12(1.0 / 3.0) == 0.333333333333);
  CHECK(io::round12(0.0) == 0.0);
  CHECK(io::round12(-2.5e-20) == doctest::Approx(-2.5e-20));
  CHECK(io::round12(123456789.123456789) == 123456789.123);
}

TEST_CASE("spaces and points survive a JSON round trip") {
  Rng rng = make_rng(80);
  for (const ModelSpace& space : sample_spaces(rng)) {
    const json j = io::to_json(space);
    CHECK(j.at("version") == io::kFormatVersion);
    const ModelSpace back = io::space_from_json(json::parse(j.dump()));
    CHECK(back.kind() == space.kind());
    for (int k = 0; k < 10; ++k) {
      const Point p = sample_point(space, rng), q = sample_point(space, rng);
      const Point p2 = io::point_from_json(back, io::to_json(space, p));
      const Point q2 = io::point_from_json(back, io::to_json(space, q));
      CHECK(distance(back, p2, q2) == doctest::Approx(distance(space, p, q)).epsilon(1e-10));
      CHECK(distance(back, p2, p2) == doctest::Approx(0.0));
    }
  }
}

TEST_CASE("measures survive a JSON round trip") {
  Rng rng = make_rng(81);
  const Measure mu = cat0::testing::random_measure(cat0::testing::tripod(), rng, 5);
  const Measure back = io::measure_from_json(io::to_json(mu));
  REQUIRE(back.support.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(back.weights[i] == doctest::Approx(mu.weights[i]));
    CHECK(same_point(back.space, back.support[i], mu.support[i], 1e-10));
  }
  const json uniform = {{"space", {{"kind", "euclidean"}, {"dimension", 1}}}, {"support", {{0.0}, {1.0}, {3.0}}}};
  const Measure u = io::measure_from_json(uniform);
  for (double w : u.weights) CHECK(w == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("metric spaces, graphs and profiles round trip") {
  const LabeledGraph h = LabeledGraph::heawood();
  const FiniteMetricSpace X = FiniteMetricSpace::graph_metric(h.num_vertices(), h.edges(), kPi / 3);
  const FiniteMetricSpace Y = io::metric_from_json(io::to_json(X));
  CHECK((Y.matrix() - X.matrix()).cwiseAbs().maxCoeff() < 1e-10);
  const FiniteMetricSpace Z = io::metric_from_json({{"graph", {{"named", "heawood"}}}, {"edge_length", kPi / 3}});
  CHECK((Z.matrix() - X.matrix()).cwiseAbs().maxCoeff() < 1e-12);

  LabeledGraph g = LabeledGraph::petersen();
  g = [&] {
    LabeledGraph l = g;
    std::vector<int> labels;
    for (std::size_t k = 0; k < l.num_edges(); ++k) labels.push_back(k % 2 ? 1 : -2);
    l.set_labels(2, labels);
    return l;
  }();
  const LabeledGraph g2 = io::graph_from_json(io::to_json(g));
  CHECK(g2.edges() == g.edges());
  CHECK(g2.labels() == g.labels());
  CHECK(g2.num_generators() == 2);

  for (const char* name : {"complete:5", "cycle:6", "path:3", "star:4", "hypercube:3", "petersen"})
    CHECK(io::graph_from_json({{"named", name}}).num_vertices() > 0);
  CHECK_THROWS_AS(io::graph_from_json({{"named", "moebius"}}), ParseError);

  DistanceProfile prof;
  prof.pairwise = X.matrix().topLeftCorner(3, 3) / 3.0;
  prof.radial = Eigen::VectorXd::Constant(3, 1.0);
  const DistanceProfile prof2 = io::profile_from_json(io::to_json(prof));
  CHECK((prof2.pairwise - prof.pairwise).norm() < 1e-10);
  CHECK((prof2.radial - prof.radial).norm() < 1e-12);
}

TEST_CASE("edge lists") {
  const LabeledGraph g = io::graph_from_edge_list("# square\n4\n0 1\n1 2\n\n2 3 # last\n3 0\n");
  CHECK(g.num_vertices() == 4);
  CHECK(g.num_edges() == 4);
  CHECK(io::graph_from_edge_list("0 1\n1 2\n").num_vertices() == 3);
  CHECK(io::graph_from_text("{\"named\": \"cycle:5\"}").num_edges() == 5);
  CHECK(io::graph_from_text("  0 1\n").num_edges() == 1);
  CHECK_THROWS_AS(io::graph_from_edge_list("0 x\n"), ParseError);
  CHECK_THROWS_AS(io::graph_from_edge_list("0 0\n"), InvalidArgument);
}

TEST_CASE("malformed documents raise ParseError") {
  CHECK_THROWS_AS(io::parse("{\"space\": "), ParseError);
  CHECK_THROWS_AS(io::space_from_json({{"kind", "hyperbolic"}}), ParseError);
  CHECK_THROWS_AS(io::space_from_json({{"dimension", 2}}), ParseError);
  CHECK_THROWS_AS(io::point_from_json(cat0::testing::tripod(), json::array({1.0})), ParseError);
  CHECK_THROWS_AS(io::measure_from_json({{"support", json::array()}}), ParseError);
}

TEST_CASE("triples and thresholds") {
  const PropertyPTriple t = io::triple_from_json({{"theta", 1.0}, {"alpha", 0.5}, {"epsilon", 0.25}});
  CHECK(t.theta == 1.0);
  const PropertyPTriple t2 = io::triple_from_json(io::to_json(t));
  CHECK(t2.alpha == 0.5);
  CHECK_THROWS_AS(io::triple_from_json({{"theta", 1.0}, {"alpha", 1.5}, {"epsilon", 0.25}}), InvalidArgument);

  const auto th = io::thresholds_from_json(
      {{"min_girth", 6}, {"min_lambda", 0.05}, {"min_degree", 3}, {"max_degree", 3}, {"delta_constant", 0.5}});
  CHECK(th.min_girth == 6);
  CHECK(th.delta_constant == 0.5);
  CHECK_FALSE(io::thresholds_from_json({{"min_girth", 6}}).min_lambda.has_value());
}

TEST_CASE("run_command reports") {
  const json req = {{"metric", {{"distances", {{0.0, kPi}, {kPi, 0.0}}}}}, {"seed", 4}};
  const json rep = run_command("property-p", req);
  CHECK(rep.at("schema_version") == kReportSchemaVersion);
  CHECK(rep.at("seed") == 4);
  CHECK(rep.at("citation").get<std::string>().find("Property P") != std::string::npos);
  CHECK(rep.at("result").at("check").at("passed") == true);
  CHECK(run_command("property-p", req).dump() == rep.dump());

  const json batch = run_command("covering", {{"metric", req.at("metric")}, {"batch", {{{"radius", 1.0}}, {{"radius", 4.0}}}}});
  REQUIRE(batch.at("runs").size() == 2);
  CHECK(batch.at("runs")[0].at("result").at("count") == 2);
  CHECK(batch.at("runs")[1].at("result").at("count") == 1);

  const std::string csv = report_to_csv(batch);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  CHECK(csv.find("result.count") != std::string::npos);

  CHECK_THROWS_AS(run_command("nope", req), ParseError);
  CHECK_THROWS_AS(run_command("covering", {{"metric", req.at("metric")}}), ParseError);
  CHECK_THROWS_AS(run_command("covering", json::array()), ParseError);
  CHECK_THROWS_AS(run_command("covering", {{"metric", req.at("metric")}, {"radius", "far"}}), ParseError);
  CHECK(command_names().size() == 11);
}
