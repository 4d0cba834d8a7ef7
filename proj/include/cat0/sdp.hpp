#pragma once

#include <vector>

#include <Eigen/Dense>

namespace cat0 {

/// minimise <C, W>  subject to  W PSD, diag(W) = 1, W_ab >= lower for each bound.
struct CorrelationSdp {
  struct Bound {
    int a;
    int b;
    double lower;
  };
  Eigen::MatrixXd cost;
  std::vector<Bound> bounds;
};

struct CorrelationSdpOptions {
  double gap_tol = 1e-7;
  int max_iter = 200;
  double target = 1e-11;  // relative accuracy at which the interior-point loop stops
};

struct CorrelationSdpResult {
  Eigen::MatrixXd solution;  // exactly feasible after repair
  Eigen::VectorXd dual;      // diag multipliers, then one per bound
  double upper = 0.0;        // <C, solution>
  double lower = 0.0;        // certified dual bound
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double repair_shift = 0.0;  // convex weight moved onto the all-ones matrix
  bool certified = false;     // upper - lower <= gap_tol
};

/// Primal-dual interior-point method (HKM direction, Mehrotra predictor-corrector)
/// followed by exact primal/dual repair, so [lower, upper] brackets the optimum.
CorrelationSdpResult solve_correlation_sdp(const CorrelationSdp& problem, const CorrelationSdpOptions& opts = {});

}  // namespace cat0
