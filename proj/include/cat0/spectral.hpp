#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cat0/graph.hpp"
#include "cat0/spaces.hpp"

namespace cat0 {

struct SpectralGap {
  double lambda1 = 0.0;
  Eigen::VectorXd eigenfunction;  // f with sum deg(v) f(v) = 0 and sum deg(v) f(v)^2 = 1
  double variational_quotient = 0.0;
  bool iterative = false;  // Lanczos estimate rather than a dense eigensolve
};

/// First positive eigenvalue of Delta_G f(v) = f(v) - sum_{u ~ v} f(u) / deg(u).
/// Throws InvalidArgument on disconnected graphs or fewer than two vertices.
SpectralGap laplacian_spectrum(const LabeledGraph& g);
double laplacian_lambda1(const LabeledGraph& g);

using VertexMap = std::vector<Point>;

/// sum_E d(f u, f v)^2 / sum_V deg(v) d(f v, fbar)^2 with fbar the barycenter of
/// the degree-weighted pushforward. Throws InvalidArgument on constant maps.
double wang_quotient(const LabeledGraph& g, const ModelSpace& space, const VertexMap& f);

struct WangOptions {
  int restarts = 4;
  int max_sweeps = 60;
  double tol = 1e-10;
  std::uint64_t seed = 0;
  int line_search_iters = 48;
};

struct WangResult {
  double estimate = 0.0;  // upper bound on lambda_1(G, Y)
  VertexMap witness;
  std::vector<double> restart_values;
};

WangResult wang_lambda1(const LabeledGraph& g, const ModelSpace& space, const WangOptions& opts = {});

struct SandwichReport {
  double lambda1 = 0.0;
  double wang = 0.0;
  double delta_bound = 0.0;
  double lower = 0.0;         // (1 - delta_bound) lambda1
  double lower_margin = 0.0;  // wang - lower
  double upper_margin = 0.0;  // lambda1 - wang
  bool passed = false;
};

SandwichReport sandwich_check(const LabeledGraph& g, const ModelSpace& space, double delta_upper_bound,
                              const WangOptions& opts = {}, double tol = 1e-9);

/// Uniform random d-regular simple graph from the pairing model (at most 10^4 attempts).
LabeledGraph random_regular_graph(std::size_t n, int d, std::uint64_t seed);

struct ExpanderCertificate {
  std::vector<std::size_t> sizes;
  std::vector<double> lambda1s;
  bool sizes_grow = false;
  bool degree_bounded = false;
  bool gap_bounded = false;
  bool passed = false;
  std::vector<std::string> failures;
};

ExpanderCertificate expander_certificate(const std::vector<LabeledGraph>& family, int d, double lambda);

struct PoincareReport {
  double energy = 0.0;    // sum_E d(f u, f v)^2
  double variance = 0.0;  // sum_V deg(v) d(f v, fbar)^2
  double lambda_lower = 0.0;
  double slack = 0.0;  // energy - lambda_lower * variance
  bool passed = false;
};

PoincareReport poincare_check(const LabeledGraph& g, const ModelSpace& space, const VertexMap& f,
                              double lambda_lower, double tol = 1e-9);

/// sqrt(sum_V deg(v) d(f v, fbar)^2 / sum_V deg(v)).
double rms_displacement(const LabeledGraph& g, const ModelSpace& space, const VertexMap& f);

/// Lower median of the graph distance over unordered vertex pairs.
int median_graph_distance(const LabeledGraph& g);

struct ObstructionReport {
  double bound = 0.0;  // B = L / sqrt(2 lambda)
  std::size_t vertices = 0;
  int median_distance = 0;
  double rho1_at_median = 0.0;
  bool contradiction_flagged = false;   // rho1(median) > B
  bool rigorous_contradiction = false;  // pair-counting argument
};

/// Displacement bound for maps whose edge images have length <= lipschitz_bound.
double displacement_bound(double lambda_lower, double lipschitz_bound);

ObstructionReport embedding_obstruction(const LabeledGraph& g, double lambda_lower, double lipschitz_bound,
                                        const std::function<double(double)>& rho1);

}  // namespace cat0
