#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cat0/error.hpp"
#include "cat0/spaces.hpp"

namespace cat0 {

/// Finitely supported probability measure sum_i t_i Dirac(p_i).
struct Measure {
  ModelSpace space;
  std::vector<Point> support;
  std::vector<double> weights;

  /// Positive weights summing to 1 (within 1e-12), valid support points.
  void validate() const;
  std::size_t size() const { return support.size(); }
  /// Number of pairwise distinct support points.
  std::size_t distinct_points(double tol = 1e-12) const;
};

Measure uniform_measure(ModelSpace space, std::vector<Point> support);

struct BarycenterOptions {
  double tol = 1e-8;
  int num_probes = 256;
  std::uint64_t seed = 0;
  bool certify = true;
};

struct CertificationReport {
  bool passed = false;
  int probes = 0;
  double worst_variance_gap = 0.0;   // min over probes of variance_gap
  double worst_directional = 0.0;    // min one-sided derivative along rays
  std::string detail;
};

class UncertifiedBarycenter : public ComputationError {
 public:
  UncertifiedBarycenter(Point candidate, CertificationReport report);
  const Point& candidate() const { return candidate_; }
  const CertificationReport& report() const { return report_; }

 private:
  Point candidate_;
  CertificationReport report_;
};

/// y -> sum_i t_i d(y, p_i)^2.
double frechet_objective(const Measure& mu, const Point& y);

/// Minimiser of the Frechet objective, certified unless opts.certify is false.
/// Throws UncertifiedBarycenter carrying the best candidate on failure.
Point barycenter(const Measure& mu, const BarycenterOptions& opts = {});

/// sum_i t_i (d(y,p_i)^2 - d(bar,p_i)^2) - d(bar,y)^2; nonnegative in CAT(0).
double variance_gap(const Measure& mu, const Point& bar, const Point& y);

CertificationReport certify_barycenter(const Measure& mu, const Point& candidate, double tol = 1e-8,
                                       int num_probes = 256, std::uint64_t seed = 0);

}  // namespace cat0
