#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cat0/graph.hpp"

namespace cat0 {

/// Signed generator index: +i is s_i, -i is s_i^{-1} (i >= 1).
using Generator = int;
using Word = std::vector<Generator>;

Word free_reduce(const Word& w);
Word inverse(const Word& w);
/// "s1 s2 S1"; the empty word renders as "1".
std::string to_string(const Word& w);
Word parse_word(const std::string& text);

/// Orients every edge uniformly at random and labels it uniformly from the 2k symbols.
LabeledGraph sample_labels(const LabeledGraph& g, int k, std::uint64_t seed);

/// Shortest cycle length, or nullopt for forests.
std::optional<int> girth(const LabeledGraph& g);

struct CycleWords {
  std::vector<Word> words;
  std::vector<std::vector<int>> cycles;  // vertex sequences, first vertex repeated implicitly
  int cap = 0;
  std::string note;
};

/// Words read along every simple cycle of length <= max_length, in both directions,
/// starting at the cycle's smallest vertex.
CycleWords cycle_words(const LabeledGraph& g, int max_length);

struct FixedPointThresholds {
  std::optional<int> min_girth;
  std::optional<double> min_lambda;
  std::optional<int> min_degree;
  std::optional<int> max_degree;
  std::optional<double> delta_constant;  // C < 1 that delta_upper must not exceed
};

struct HypothesisCheck {
  std::string name;
  bool satisfied = false;
  std::string detail;
};

struct FixedPointReport {
  bool met = false;
  std::string verdict;
  std::vector<HypothesisCheck> hypotheses;
  double lambda1 = 0.0;
  std::optional<int> girth;
  std::string citation;
};

/// Hypothesis checklist for the fixed-point criterion for random groups.
/// Throws InvalidArgument when any threshold is missing.
FixedPointReport fixed_point_report(const LabeledGraph& g, double delta_upper, const FixedPointThresholds& th);

}  // namespace cat0
