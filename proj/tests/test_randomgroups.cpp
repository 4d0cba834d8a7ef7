#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "cat0/error.hpp"
#include "cat0/randomgroups.hpp"
#include "support.hpp"

using namespace cat0;

namespace {

LabeledGraph triangle() { return LabeledGraph(3, {{0, 1}, {1, 2}, {2, 0}}); }

FixedPointThresholds thresholds(int g, double lambda) { return {g, lambda, 2, 4, 0.9}; }

// Shortest cycle through each edge: drop the edge and measure the detour.
std::optional<int> girth_by_edge_removal(const LabeledGraph& g) {
  std::optional<int> best;
  const auto& edges = g.edges();
  for (std::size_t k = 0; k < edges.size(); ++k) {
    std::vector<LabeledGraph::Edge> rest;
    for (std::size_t j = 0; j < edges.size(); ++j)
      if (j != k) rest.push_back(edges[j]);
    const LabeledGraph h(g.num_vertices(), rest);
    const int d = h.bfs(edges[k].first)[static_cast<std::size_t>(edges[k].second)];
    if (d >= 0 && (!best || d + 1 < *best)) best = d + 1;
  }
  return best;
}

LabeledGraph random_graph(Rng& rng, std::size_t n, double p) {
  std::vector<LabeledGraph::Edge> edges;
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v)
      if (uniform(rng) < p) edges.emplace_back(static_cast<int>(u), static_cast<int>(v));
  return LabeledGraph(n, edges);
}

}  // namespace

TEST_CASE("words: reduction, inversion, text form") {
  CHECK(free_reduce({1, 2, -2, -1, 3}) == Word{3});
  CHECK(free_reduce({1, -1}).empty());
  CHECK(inverse({1, -2, 3}) == Word{-3, 2, -1});
  CHECK(to_string({1, 2, -1}) == "s1 s2 S1");
  CHECK(to_string(Word{}) == "1");
  CHECK(parse_word("s1 s2 S1") == Word{1, 2, -1});
  CHECK(parse_word("1").empty());
  CHECK_THROWS(parse_word("t3"));
}

TEST_CASE("sample_labels examples") {
  const auto t = sample_labels(triangle(), 2, 5);
  CHECK(t.oriented());
  REQUIRE(t.labels().size() == 3);
  for (int l : t.labels()) {
    CHECK(l != 0);
    CHECK(std::abs(l) <= 2);
  }
  const auto empty = sample_labels(LabeledGraph(4, {}), 3, 5);
  CHECK(empty.labels().empty());

  const auto p = LabeledGraph::petersen();
  const auto a = sample_labels(p, 3, 17), b = sample_labels(p, 3, 17);
  CHECK(a.labels() == b.labels());
  CHECK(a.edges() == b.edges());
  CHECK_THROWS_AS(sample_labels(p, 0, 1), InvalidArgument);
}

TEST_CASE("girth examples") {
  CHECK(girth(LabeledGraph::cycle(5)) == 5);
  CHECK_FALSE(girth(LabeledGraph::path(6)).has_value());
  CHECK_FALSE(girth(LabeledGraph::star(4)).has_value());
  CHECK(girth(LabeledGraph::petersen()) == 5);
  CHECK(girth(LabeledGraph::heawood()) == 6);
  CHECK(girth(LabeledGraph::complete(5)) == 3);
  CHECK(girth(LabeledGraph::hypercube(3)) == 4);
}

TEST_CASE("cycle_words examples") {
  LabeledGraph t = triangle();
  t.set_labels(2, {1, 2, -1});
  const auto words = cycle_words(t, 3);
  REQUIRE(words.words.size() == 2);
  std::vector<std::string> text;
  for (const auto& w : words.words) {
    CHECK(w.size() == 3);
    text.push_back(to_string(w));
  }
  CHECK(std::find(text.begin(), text.end(), "s1 s2 S1") != text.end());
  CHECK(std::find(text.begin(), text.end(), "s1 S2 S1") != text.end());

  const auto tree = cycle_words(sample_labels(LabeledGraph::path(5), 2, 1), 10);
  CHECK(tree.words.empty());
  CHECK_FALSE(tree.note.empty());

  const auto c4 = cycle_words(sample_labels(LabeledGraph::cycle(4), 2, 1), 3);
  CHECK(c4.words.empty());
  CHECK(c4.note.find("cap below girth") != std::string::npos);
  CHECK(cycle_words(sample_labels(LabeledGraph::cycle(4), 2, 1), 4).words.size() == 2);
}

TEST_CASE("fixed_point_report examples") {
  const auto k4 = LabeledGraph::complete(4);
  const auto short_girth = fixed_point_report(k4, 0.1, thresholds(10, 0.1));
  CHECK_FALSE(short_girth.met);
  CHECK(short_girth.verdict == "not met: girth");

  const auto c20 = LabeledGraph::cycle(20);
  const auto weak = fixed_point_report(c20, 0.1, thresholds(3, 0.1));
  CHECK(weak.lambda1 < 0.1);
  CHECK(weak.verdict == "not met: spectral gap");

  const auto ok = fixed_point_report(LabeledGraph::petersen(), 0.1, thresholds(5, 0.5));
  CHECK(ok.met);
  CHECK(ok.verdict == "met (conditional on configured constants)");
  CHECK(ok.hypotheses.size() == 4);
  CHECK_FALSE(ok.citation.empty());
  CHECK(ok.citation.find("probability constants are not available") != std::string::npos);

  CHECK(fixed_point_report(LabeledGraph::petersen(), 0.95, thresholds(5, 0.5)).verdict == "not met: delta");
  CHECK(fixed_point_report(LabeledGraph::star(5), 0.1, thresholds(3, 0.1)).verdict == "not met: degree");

  FixedPointThresholds partial = thresholds(5, 0.5);
  partial.min_lambda.reset();
  CHECK_THROWS_AS(fixed_point_report(k4, 0.1, partial), ParseError);
}

TEST_CASE("relator words are at least as long as the girth") {
  Rng rng = make_rng(70);
  for (int k = 0; k < 20; ++k) {
    const auto g = sample_labels(random_graph(rng, 5 + uniform_index(rng, 4), 0.45), 3, 100 + k);
    const auto gi = girth(g);
    const auto words = cycle_words(g, 7);
    CHECK(words.words.size() == words.cycles.size());
    for (std::size_t i = 0; i < words.words.size(); ++i) {
      REQUIRE(gi.has_value());
      CHECK(static_cast<int>(words.words[i].size()) >= *gi);
      CHECK(words.words[i].size() == words.cycles[i].size());
    }
  }
}

TEST_CASE("reversed traversal emits the inverse word") {
  Rng rng = make_rng(71);
  for (int k = 0; k < 20; ++k) {
    const auto g = sample_labels(random_graph(rng, 4 + uniform_index(rng, 5), 0.5), 2, 200 + k);
    const auto words = cycle_words(g, 6);
    REQUIRE(words.words.size() % 2 == 0);
    for (std::size_t i = 0; i < words.words.size(); ++i) {
      const auto& w = words.words[i];
      const auto it = std::find_if(words.words.begin(), words.words.end(), [&](const Word& v) {
        Word cat = w;
        cat.insert(cat.end(), v.begin(), v.end());
        return free_reduce(cat).empty() && v == inverse(w);
      });
      CHECK(it != words.words.end());
    }
  }
}

TEST_CASE("labels are uniform over the 2k symbols") {
  const LabeledGraph g = LabeledGraph::cycle(10);
  const int k = 3, samples = 10000;
  std::vector<int> counts(2 * k, 0);
  for (int s = 0; s < samples; ++s) {
    const int l = sample_labels(g, k, static_cast<std::uint64_t>(s)).labels()[0];
    ++counts[static_cast<std::size_t>(l > 0 ? l - 1 : k - l - 1)];
  }
  const double p = 1.0 / (2 * k), sigma = std::sqrt(p * (1 - p) / samples);
  for (int c : counts) CHECK(std::abs(static_cast<double>(c) / samples - p) <= 3 * sigma);
}

TEST_CASE("girth agrees with an independent search on small graphs") {
  Rng rng = make_rng(72);
  for (int k = 0; k < 200; ++k) {
    const auto g = random_graph(rng, 2 + uniform_index(rng, 9), uniform(rng, 0.1, 0.7));
    CHECK(girth(g) == girth_by_edge_removal(g));
  }
  for (const auto& g : cat0::testing::small_graphs(12, 73)) CHECK(girth(g) == girth_by_edge_removal(g));
}
