#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "cat0/metric.hpp"

namespace cat0 {

struct CoverResult {
  std::size_t count = 0;
  std::vector<std::size_t> centers;
  bool exact = false;  // false: greedy upper bound
};

/// Minimum number of open r-balls centred in X that cover X.
/// Exact (branch and bound) for |X| <= 24, greedy otherwise.
CoverResult covering_number(const FiniteMetricSpace& X, double r);

/// Minimum number of closed r-balls centred in X covering the subset `targets`.
CoverResult closed_cover(const FiniteMetricSpace& X, const std::vector<std::size_t>& targets, double r);

struct PropertyPTriple {
  double theta = 0.0;
  double alpha = 0.0;
  double epsilon = 0.0;
  std::string note;  // set when a parameter had to be clamped

  /// Throws InvalidArgument unless 0 < theta < pi/2, 0 < alpha <= 1, epsilon > 0.
  void validate() const;
};

struct PropertyPFailure {
  std::size_t x = 0;
  std::size_t y = 0;
  std::size_t separating = 0;
};

struct PropertyPReport {
  bool passed = false;
  std::size_t pairs_checked = 0;
  std::size_t required = 0;  // ceil(alpha |S|) up to rounding tolerance
  std::vector<PropertyPFailure> failures;
};

/// For every pair with d(x,y) >= theta, at least alpha |S| points s of S have
/// |d(x,s) - d(y,s)| >= epsilon.
PropertyPReport check_property_p(const FiniteMetricSpace& X, const std::vector<std::size_t>& S,
                                 const PropertyPTriple& triple);

struct PropertyPWitness {
  std::vector<std::size_t> net;
  std::size_t cover_number = 0;
  PropertyPTriple triple;
  PropertyPReport report;
};

/// Net of open pi/12-balls with the triple (pi/3, 2/N, pi/6).
PropertyPWitness property_p_witness_from_net(const FiniteMetricSpace& X);

struct DoublingResult {
  std::size_t constant = 0;
  std::size_t center = 0;
  double radius = 0.0;
  bool exact = true;
};

/// max over x and realized radii r of the closed r/2-ball cover number of the closed r-ball.
DoublingResult doubling_constant(const FiniteMetricSpace& X);

/// (pi/3, 2/N^exponent, pi/6), alpha clamped to 1.
PropertyPTriple doubling_p_triple(int N, int exponent = 2);

}  // namespace cat0
