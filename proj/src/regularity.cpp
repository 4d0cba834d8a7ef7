#include "cat0/regularity.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>

#include "cat0/error.hpp"

namespace cat0 {
namespace {

constexpr std::size_t kExactLimit = 24;

using Mask = std::uint32_t;

struct BranchAndBound {
  std::vector<Mask> sets;
  std::size_t best_count;
  std::vector<std::size_t> best;
  std::vector<std::size_t> current;
  int max_size = 1;

  void search(Mask uncovered) {
    if (uncovered == 0) {
      if (current.size() < best_count) {
        best_count = current.size();
        best = current;
      }
      return;
    }
    const auto lower = current.size() + (static_cast<std::size_t>(std::popcount(uncovered)) + max_size - 1) / max_size;
    if (lower >= best_count) return;
    // Branch on the uncovered element with the fewest covering sets.
    int pivot = -1;
    int fewest = 1 << 30;
    for (int e = 0; e < 32; ++e) {
      if (!(uncovered & (Mask{1} << e))) continue;
      int cnt = 0;
      for (Mask s : sets) cnt += (s >> e) & 1U;
      if (cnt < fewest) {
        fewest = cnt;
        pivot = e;
      }
    }
    for (std::size_t i = 0; i < sets.size(); ++i) {
      if (!(sets[i] & (Mask{1} << pivot))) continue;
      current.push_back(i);
      search(uncovered & ~sets[i]);
      current.pop_back();
    }
  }
};

// covers[c][k] is true when center c covers target k.
CoverResult solve_cover(const std::vector<std::vector<bool>>& covers, std::size_t num_targets) {
  CoverResult res;
  if (num_targets == 0) {
    res.exact = true;
    return res;
  }
  // Greedy first: it is the answer beyond the exact limit and the incumbent below it.
  std::vector<bool> covered(num_targets, false);
  std::size_t left = num_targets;
  while (left > 0) {
    std::size_t best_c = 0, best_gain = 0;
    for (std::size_t c = 0; c < covers.size(); ++c) {
      std::size_t gain = 0;
      for (std::size_t k = 0; k < num_targets; ++k) gain += covers[c][k] && !covered[k];
      if (gain > best_gain) {
        best_gain = gain;
        best_c = c;
      }
    }
    if (best_gain == 0) throw ComputationError("cover: some target is not covered by any ball");
    res.centers.push_back(best_c);
    for (std::size_t k = 0; k < num_targets; ++k)
      if (covers[best_c][k] && !covered[k]) {
        covered[k] = true;
        --left;
      }
  }
  res.count = res.centers.size();
  if (num_targets > kExactLimit) return res;

  BranchAndBound bb;
  bb.best_count = res.count;
  bb.best = res.centers;
  for (const auto& row : covers) {
    Mask m = 0;
    for (std::size_t k = 0; k < num_targets; ++k)
      if (row[k]) m |= Mask{1} << k;
    bb.sets.push_back(m);
    bb.max_size = std::max(bb.max_size, std::popcount(m));
  }
  const Mask all = num_targets == 32 ? ~Mask{0} : ((Mask{1} << num_targets) - 1);
  bb.search(all);
  res.count = bb.best_count;
  res.centers = bb.best;
  std::sort(res.centers.begin(), res.centers.end());
  res.exact = true;
  return res;
}

double slack(const FiniteMetricSpace& X) { return 1e-12 * std::max(1.0, X.diameter()); }

}  // namespace

CoverResult covering_number(const FiniteMetricSpace& X, double r) {
  if (!(r > 0.0)) throw InvalidArgument("covering number: radius must be positive");
  const std::size_t n = X.size();
  std::vector<std::vector<bool>> covers(n, std::vector<bool>(n));
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t k = 0; k < n; ++k) covers[c][k] = X(c, k) < r;
  return solve_cover(covers, n);
}

CoverResult closed_cover(const FiniteMetricSpace& X, const std::vector<std::size_t>& targets, double r) {
  if (!(r >= 0.0)) throw InvalidArgument("cover: radius must be nonnegative");
  const double eps = slack(X);
  std::vector<std::vector<bool>> covers(X.size(), std::vector<bool>(targets.size()));
  for (std::size_t c = 0; c < X.size(); ++c)
    for (std::size_t k = 0; k < targets.size(); ++k) covers[c][k] = X(c, targets[k]) <= r + eps;
  return solve_cover(covers, targets.size());
}

void PropertyPTriple::validate() const {
  if (!(theta > 0.0 && theta < std::numbers::pi / 2)) throw InvalidArgument("property P: theta must lie in (0, pi/2)");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidArgument("property P: alpha must lie in (0, 1]");
  if (!(epsilon > 0.0)) throw InvalidArgument("property P: epsilon must be positive");
}

PropertyPReport check_property_p(const FiniteMetricSpace& X, const std::vector<std::size_t>& S,
                                 const PropertyPTriple& t) {
  if (S.empty()) throw InvalidArgument("property P: witness set is empty");
  t.validate();
  for (std::size_t s : S)
    if (s >= X.size()) throw InvalidArgument("property P: witness index out of range");
  const double eps = slack(X);
  PropertyPReport rep;
  const double need = t.alpha * static_cast<double>(S.size());
  rep.required = static_cast<std::size_t>(std::ceil(need - 1e-9));
  for (std::size_t x = 0; x < X.size(); ++x)
    for (std::size_t y = x + 1; y < X.size(); ++y) {
      if (X(x, y) < t.theta - eps) continue;
      ++rep.pairs_checked;
      std::size_t sep = 0;
      for (std::size_t s : S) sep += std::abs(X(x, s) - X(y, s)) >= t.epsilon - eps;
      if (static_cast<double>(sep) < need - 1e-9) rep.failures.push_back({x, y, sep});
    }
  rep.passed = rep.failures.empty();
  return rep;
}

PropertyPWitness property_p_witness_from_net(const FiniteMetricSpace& X) {
  if (X.size() == 0) throw InvalidArgument("property P witness: empty space");
  constexpr double pi = std::numbers::pi;
  PropertyPWitness w;
  const CoverResult net = covering_number(X, pi / 12);
  w.net = net.centers;
  w.cover_number = net.count;
  w.triple = {pi / 3, 2.0 / static_cast<double>(net.count), pi / 6, ""};
  if (w.triple.alpha > 1.0) {
    w.triple.alpha = 1.0;
    w.triple.note = "alpha clamped to 1 (single-ball net, no pair at distance pi/3)";
  }
  if (!net.exact) w.triple.note += w.triple.note.empty() ? "greedy net" : "; greedy net";
  w.report = check_property_p(X, w.net, w.triple);
  return w;
}

DoublingResult doubling_constant(const FiniteMetricSpace& X) {
  const std::size_t n = X.size();
  if (n == 0) throw InvalidArgument("doubling constant: empty space");
  DoublingResult best;
  best.constant = 1;
  const double eps = slack(X);
  for (std::size_t x = 0; x < n; ++x) {
    std::vector<double> radii;
    for (std::size_t y = 0; y < n; ++y)
      if (X(x, y) > eps) radii.push_back(X(x, y));
    std::sort(radii.begin(), radii.end());
    radii.erase(std::unique(radii.begin(), radii.end(), [&](double a, double b) { return b - a <= eps; }), radii.end());
    for (double r : radii) {
      std::vector<std::size_t> ball;
      for (std::size_t y = 0; y < n; ++y)
        if (X(x, y) <= r + eps) ball.push_back(y);
      const CoverResult c = closed_cover(X, ball, r / 2);
      best.exact = best.exact && c.exact;
      if (c.count > best.constant) {
        best.constant = c.count;
        best.center = x;
        best.radius = r;
      }
    }
  }
  return best;
}

PropertyPTriple doubling_p_triple(int N, int exponent) {
  if (N < 1) throw InvalidArgument("doubling constant must be at least 1");
  if (exponent < 1) throw InvalidArgument("exponent must be at least 1");
  constexpr double pi = std::numbers::pi;
  PropertyPTriple t{pi / 3, 2.0 / std::pow(static_cast<double>(N), exponent), pi / 6, ""};
  if (t.alpha > 1.0) {
    t.alpha = 1.0;
    t.note = "alpha clamped to 1; a 1-doubling space is a single point and the property holds vacuously";
  }
  return t;
}

}  // namespace cat0
