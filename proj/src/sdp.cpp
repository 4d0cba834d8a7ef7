#include "cat0/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cat0/error.hpp"

namespace cat0 {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Layout {
  int n = 0;
  int p = 0;
  std::vector<int> a;  // constraint q touches entry (a[q], b[q]); the first n are diagonal
  std::vector<int> b;
  VectorXd rhs;

  int size() const { return n + p; }
};

Layout make_layout(const CorrelationSdp& prob) {
  Layout L;
  L.n = static_cast<int>(prob.cost.rows());
  L.p = static_cast<int>(prob.bounds.size());
  L.rhs.resize(L.size());
  for (int i = 0; i < L.n; ++i) {
    L.a.push_back(i);
    L.b.push_back(i);
    L.rhs(i) = 1.0;
  }
  for (int q = 0; q < L.p; ++q) {
    const auto& bd = prob.bounds[static_cast<std::size_t>(q)];
    L.a.push_back(bd.a);
    L.b.push_back(bd.b);
    L.rhs(L.n + q) = bd.lower;
  }
  return L;
}

VectorXd apply_A(const Layout& L, const MatrixXd& X) {
  VectorXd out(L.size());
  for (int q = 0; q < L.size(); ++q) out(q) = 0.5 * (X(L.a[q], L.b[q]) + X(L.b[q], L.a[q]));
  return out;
}

MatrixXd apply_At(const Layout& L, const VectorXd& y) {
  MatrixXd out = MatrixXd::Zero(L.n, L.n);
  for (int q = 0; q < L.size(); ++q) {
    if (L.a[q] == L.b[q]) {
      out(L.a[q], L.a[q]) += y(q);
    } else {
      out(L.a[q], L.b[q]) += 0.5 * y(q);
      out(L.b[q], L.a[q]) += 0.5 * y(q);
    }
  }
  return out;
}

MatrixXd symmetric_part(const MatrixXd& A) { return 0.5 * (A + A.transpose()); }

double max_step_psd(const MatrixXd& X, const MatrixXd& dX) {
  Eigen::LLT<MatrixXd> llt(X);
  if (llt.info() != Eigen::Success) return 0.0;
  MatrixXd Linv_dX = llt.matrixL().solve(dX);
  MatrixXd M = llt.matrixL().solve(Linv_dX.transpose());
  M = symmetric_part(M);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(M, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  return lo >= 0.0 ? std::numeric_limits<double>::infinity() : -1.0 / lo;
}

double max_step_pos(const VectorXd& x, const VectorXd& dx) {
  double step = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (dx(i) < 0.0) step = std::min(step, -x(i) / dx(i));
  return step;
}

double min_eigenvalue(const MatrixXd& S) {
  if (S.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(symmetric_part(S), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

struct Iterate {
  MatrixXd X, S;
  VectorXd x, w, y;
};

struct Direction {
  MatrixXd dX, dS;
  VectorXd dx, dw, dy;
};

class Solver {
 public:
  Solver(const MatrixXd& C, const Layout& L) : C_(C), L_(L) {}

  // Residuals at the current iterate; rp = b - A(X) + E x, Rd = C - A^T y - S, rl = y_pair - w.
  void residuals(const Iterate& it) {
    rp_ = L_.rhs - apply_A(L_, it.X);
    rp_.tail(L_.p) += it.x;
    Rd_ = C_ - apply_At(L_, it.y) - it.S;
    rl_ = it.y.tail(L_.p) - it.w;
  }

  bool factor(const Iterate& it) {
    Eigen::LLT<MatrixXd> sllt(it.S);
    if (sllt.info() != Eigen::Success) return false;
    Z_ = sllt.solve(MatrixXd::Identity(L_.n, L_.n));
    Z_ = symmetric_part(Z_);
    const int k = L_.size();
    MatrixXd M(k, k);
    const MatrixXd& X = it.X;
    for (int q = 0; q < k; ++q) {
      const int a = L_.a[q], b = L_.b[q];
      for (int r = q; r < k; ++r) {
        const int c = L_.a[r], d = L_.b[r];
        const double v = 0.25 * (X(a, c) * Z_(d, b) + X(a, d) * Z_(c, b) + X(b, c) * Z_(d, a) + X(b, d) * Z_(c, a));
        M(q, r) = v;
        M(r, q) = v;
      }
    }
    for (int q = 0; q < L_.p; ++q) M(L_.n + q, L_.n + q) += it.x(q) / it.w(q);
    chol_.compute(M);
    if (chol_.info() == Eigen::Success) {
      use_ldlt_ = false;
      return true;
    }
    ldlt_.compute(M);
    use_ldlt_ = true;
    return ldlt_.info() == Eigen::Success;
  }

  Direction direction(const Iterate& it, double tau, const MatrixXd& corrX, const VectorXd& corrx) const {
    const MatrixXd& X = it.X;
    MatrixXd R1 = tau * Z_ - X - corrX - X * Rd_ * Z_;
    VectorXd h = rp_ - apply_A(L_, R1);
    VectorXd lp = (VectorXd::Constant(L_.p, tau) - it.x.cwiseProduct(it.w) - corrx - it.x.cwiseProduct(rl_))
                      .cwiseQuotient(it.w);
    h.tail(L_.p) += lp;

    Direction D;
    D.dy = use_ldlt_ ? VectorXd(ldlt_.solve(h)) : VectorXd(chol_.solve(h));
    MatrixXd AtDy = apply_At(L_, D.dy);
    D.dS = Rd_ - AtDy;
    D.dX = R1 + X * AtDy * Z_;
    D.dX = symmetric_part(D.dX);
    D.dw = D.dy.tail(L_.p) + rl_;
    D.dx = (VectorXd::Constant(L_.p, tau) - it.x.cwiseProduct(it.w) - corrx - it.x.cwiseProduct(D.dw))
               .cwiseQuotient(it.w);
    return D;
  }

  const VectorXd& rp() const { return rp_; }
  const MatrixXd& Rd() const { return Rd_; }
  const VectorXd& rl() const { return rl_; }
  const MatrixXd& Z() const { return Z_; }

 private:
  const MatrixXd& C_;
  const Layout& L_;
  MatrixXd Z_;
  VectorXd rp_;
  MatrixXd Rd_;
  VectorXd rl_;
  Eigen::LLT<MatrixXd> chol_;
  Eigen::LDLT<MatrixXd> ldlt_;
  bool use_ldlt_ = false;
};

double inner(const MatrixXd& A, const MatrixXd& B) { return A.cwiseProduct(B).sum(); }

// Dual certificate: nonnegative bound multipliers, then shift the diagonal
// multipliers until C - A^T y is PSD.
std::pair<double, VectorXd> dual_bound(const MatrixXd& C, const Layout& L, VectorXd y) {
  for (int q = 0; q < L.p; ++q) y(L.n + q) = std::max(0.0, y(L.n + q));
  const double lam = min_eigenvalue(C - apply_At(L, y));
  if (lam < 0.0) y.head(L.n).array() += lam;
  return {L.rhs.dot(y), y};
}

struct Repaired {
  MatrixXd W;
  double shift = 1.0;
  double upper = std::numeric_limits<double>::infinity();
};

// Primal certificate: unit diagonal, then mix with the all-ones matrix to meet every bound.
Repaired primal_repair(const CorrelationSdp& prob, const MatrixXd& C, const MatrixXd& X) {
  const Eigen::Index n = X.rows();
  Repaired out;
  out.W = X;
  bool ok = true;
  for (Eigen::Index i = 0; i < n; ++i) ok = ok && X(i, i) > 0.0 && std::isfinite(X(i, i));
  if (ok) {
    const VectorXd s = X.diagonal().cwiseSqrt().cwiseInverse();
    out.W = symmetric_part(s.asDiagonal() * X * s.asDiagonal());
    out.W.diagonal().setOnes();
    ok = out.W.allFinite() && min_eigenvalue(out.W) > -1e-12;
  }
  if (!ok) out.W = MatrixXd::Ones(n, n);
  double shift = 0.0;
  for (const auto& bd : prob.bounds) {
    const double v = out.W(bd.a, bd.b);
    if (v < bd.lower && v < 1.0) shift = std::max(shift, (bd.lower - v) / (1.0 - v));
  }
  out.shift = std::min(1.0, shift);
  if (out.shift > 0.0) out.W = (1.0 - out.shift) * out.W + out.shift * MatrixXd::Ones(n, n);
  out.upper = inner(C, out.W);
  return out;
}

}  // namespace

CorrelationSdpResult solve_correlation_sdp(const CorrelationSdp& prob, const CorrelationSdpOptions& opts) {
  const Eigen::Index n = prob.cost.rows();
  if (n == 0 || prob.cost.cols() != n) throw InvalidArgument("correlation SDP: cost must be a nonempty square matrix");
  for (const auto& bd : prob.bounds) {
    if (bd.a < 0 || bd.b < 0 || bd.a >= n || bd.b >= n || bd.a == bd.b)
      throw InvalidArgument("correlation SDP: bound index out of range");
    if (!(bd.lower <= 1.0)) throw InvalidArgument("correlation SDP: bound above 1 is infeasible");
  }
  const MatrixXd C = symmetric_part(prob.cost);
  const Layout L = make_layout(prob);
  const int p = L.p;
  const double dim = static_cast<double>(n + p);

  Iterate it;
  it.X = MatrixXd::Identity(n, n);
  it.S = MatrixXd::Identity(n, n) * (1.0 + C.norm());
  it.x = VectorXd::Ones(p);
  it.w = VectorXd::Ones(p);
  it.y = VectorXd::Zero(L.size());

  Solver solver(C, L);
  CorrelationSdpResult res;
  res.lower = -std::numeric_limits<double>::infinity();
  res.upper = std::numeric_limits<double>::infinity();
  const double bnorm = 1.0 + L.rhs.norm();
  const double cnorm = 1.0 + C.norm();
  int stalls = 0;
  // Every iterate yields valid bounds; keep the tightest of each.
  auto record = [&](const Iterate& cur) {
    if (auto [lo, y] = dual_bound(C, L, cur.y); lo > res.lower) {
      res.lower = lo;
      res.dual = std::move(y);
    }
    if (Repaired rep = primal_repair(prob, C, cur.X); rep.upper < res.upper) {
      res.upper = rep.upper;
      res.solution = std::move(rep.W);
      res.repair_shift = rep.shift;
    }
  };

  for (res.iterations = 0; res.iterations < opts.max_iter; ++res.iterations) {
    solver.residuals(it);
    const double mu = (inner(it.X, it.S) + it.x.dot(it.w)) / dim;
    const double pobj = inner(C, it.X);
    const double dobj = L.rhs.dot(it.y);
    const double pres = solver.rp().norm() / bnorm;
    const double dres = (solver.Rd().norm() + solver.rl().norm()) / cnorm;
    const double rgap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    res.primal_residual = pres;
    res.dual_residual = dres;
    record(it);
    if (pres < opts.target && dres < opts.target && rgap < opts.target && mu * dim < opts.target) break;
    if (!solver.factor(it)) break;

    const MatrixXd zeroX = MatrixXd::Zero(n, n);
    const VectorXd zerox = VectorXd::Zero(p);
    Direction aff = solver.direction(it, 0.0, zeroX, zerox);
    const double ap = std::min(1.0, std::min(max_step_psd(it.X, aff.dX), max_step_pos(it.x, aff.dx)));
    const double ad = std::min(1.0, std::min(max_step_psd(it.S, aff.dS), max_step_pos(it.w, aff.dw)));
    const double mu_aff = (inner(it.X + ap * aff.dX, it.S + ad * aff.dS) +
                           (it.x + ap * aff.dx).dot(it.w + ad * aff.dw)) /
                          dim;
    double sigma = std::pow(std::max(0.0, mu_aff) / mu, 3.0);
    sigma = std::clamp(sigma, 0.0, 1.0);

    const MatrixXd corrX = aff.dX * aff.dS * solver.Z();
    const Direction D = solver.direction(it, sigma * mu, corrX, aff.dx.cwiseProduct(aff.dw));

    double sp = std::min(max_step_psd(it.X, D.dX), max_step_pos(it.x, D.dx));
    double sd = std::min(max_step_psd(it.S, D.dS), max_step_pos(it.w, D.dw));
    sp = std::min(1.0, 0.98 * sp);
    sd = std::min(1.0, 0.98 * sd);
    if (sp < 1e-10 && sd < 1e-10) {
      if (++stalls >= 3) break;
    } else {
      stalls = 0;
    }
    it.X += sp * D.dX;
    it.x += sp * D.dx;
    it.S += sd * D.dS;
    it.w += sd * D.dw;
    it.y += sd * D.dy;
    it.X = symmetric_part(it.X);
    it.S = symmetric_part(it.S);
  }

  record(it);
  res.certified = (res.upper - res.lower) <= opts.gap_tol;
  return res;
}

}  // namespace cat0
