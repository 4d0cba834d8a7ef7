#pragma once

// The Izeki-Nayatani invariant delta(mu) of a finitely supported measure.

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cat0/barycenter.hpp"
#include "cat0/error.hpp"
#include "cat0/spaces.hpp"

namespace cat0 {

/// Pairwise support distances and distances to the barycenter.
struct DistanceProfile {
  Eigen::MatrixXd pairwise;
  Eigen::VectorXd radial;

  std::size_t size() const { return static_cast<std::size_t>(radial.size()); }
  /// Throws InvalidArgument unless the profile is a metric with consistent radial data.
  void validate(double tol = 1e-9) const;
  DistanceProfile scaled(double c) const;

  static DistanceProfile from_points(const ModelSpace& space, const std::vector<Point>& support, const Point& center);
};

/// Profile of mu around its certified barycenter.
DistanceProfile distance_profile(const Measure& mu, const BarycenterOptions& opts = {});

struct SdpOptions {
  double gap_tol = 1e-7;
  int max_iter = 200;
  bool multistart_fallback = true;  // accept agreement with delta_multistart within 10 gap_tol
  int fallback_starts = 8;
  std::uint64_t seed = 0;
};

struct SolverDiagnostics {
  int iterations = 0;
  double lower_bound = 0.0;
  double gap = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double repair_shift = 0.0;
  double gram_min_eigenvalue = 0.0;
  double max_norm_residual = 0.0;       // max |G_ii - d_i^2|
  double max_lipschitz_residual = 0.0;  // max (G_ii + G_jj - 2 G_ij - d_ij^2)_+
  int clusters = 0;
  int constraints = 0;
  std::string certificate;  // "duality-gap" or "multistart-agreement"
};

struct DeltaResult {
  double value = 0.0;
  Eigen::MatrixXd gram;
  SolverDiagnostics diagnostics;
};

class SolverFailure : public ComputationError {
 public:
  SolverFailure(const std::string& what, SolverDiagnostics diag) : ComputationError(what), diag_(std::move(diag)) {}
  const SolverDiagnostics& diagnostics() const { return diag_; }

 private:
  SolverDiagnostics diag_;
};

/// min <t t^T, G> / sum t_i d_i^2 over Gram matrices of realizations.
DeltaResult delta_sdp(const DistanceProfile& profile, const std::vector<double>& weights, const SdpOptions& opts = {});

struct MultistartOptions {
  int num_starts = 8;
  std::uint64_t seed = 0;
  int max_outer = 40;
  int max_inner = 400;
  double feas_tol = 1e-10;
  double rho_max = 1e9;
};

struct MultistartResult {
  double value = 0.0;  // feasible upper bound on delta
  Eigen::MatrixXd vectors;  // rows phi_i
  int best_start = 0;
};

/// Nonconvex cross-check: explicit vectors phi_i in R^m, augmented Lagrangian, repaired to exact feasibility.
MultistartResult delta_multistart(const DistanceProfile& profile, const std::vector<double>& weights,
                                  const MultistartOptions& opts = {});

struct RealizationReport {
  bool passed = false;
  double worst_norm_residual = 0.0;
  double worst_lipschitz_residual = 0.0;
  int worst_norm_index = -1;
  int worst_pair_i = -1;
  int worst_pair_j = -1;
};

/// Checks ||phi_i|| = d_i and ||phi_i - phi_j|| <= d(p_i, p_j) for the rows of `vectors`.
RealizationReport realization_check(const DistanceProfile& profile, const Eigen::MatrixXd& vectors, double tol = 1e-8);

/// Rayleigh quotient t^T G t / sum t_i G_ii.
double gram_quotient(const Eigen::MatrixXd& gram, const std::vector<double>& weights);

/// mu_n supported on gamma_i(r_i / n), where nu lives on the tangent cone at p.
Measure scaling_sequence(const MetricTree& tree, const TreeTangentCone& tangent, const Measure& nu, int n);

struct FactorRealization {
  DistanceProfile profile;
  std::vector<double> weights;
  Eigen::MatrixXd gram;
};

struct ProductRealization {
  Eigen::MatrixXd gram;
  double quotient = 0.0;
  std::vector<double> factor_quotients;
};

/// Direct sum of factor realizations of a product measure. `support_index[k][i]`
/// is the index in factor k's support of the k-th coordinate of product point i.
ProductRealization product_realization(const std::vector<FactorRealization>& factors,
                                       const std::vector<std::vector<int>>& support_index,
                                       const std::vector<double>& product_weights);

struct SamplerConfig {
  int num_samples = 32;
  int max_support = 6;
  double scale = 1.0;
  std::uint64_t seed = 0;
  BarycenterOptions barycenter;
  SdpOptions sdp;
  /// Extra candidate measures tried before the random ones.
  std::vector<Measure> seeds;
};

struct PointEstimate {
  bool has_witness = false;
  double lower_bound = 0.0;  // meaningless without a witness (delta(Y,p) = -infinity)
  int certified_measures = 0;
  int attempted = 0;
  std::vector<Point> witness_support;
  std::vector<double> witness_weights;
};

/// Certified lower bound on delta(Y, p) from sampled measures with barycenter p.
PointEstimate delta_at_point_estimate(const ModelSpace& space, const Point& p, const SamplerConfig& cfg = {});

}  // namespace cat0
