#include <cstdio>
#include <algorithm>
#include <Eigen/OrderingMethods>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cones.hpp"
#include "ldl.hpp"

namespace ellipsotope::conic {

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    default: return "numerical_failure";
  }
}

namespace {

using detail::Scaling;
using detail::WOp;
using Eigen::VectorXd;
using Triplet = Eigen::Triplet<double, int>;

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Equilibration {
  VectorXd D;   // columns
  VectorXd EA;  // rows of A
  VectorXd EG;  // rows of G, constant on each SOC/PSD block
};

Equilibration equilibrate(const StandardForm& f, bool enabled, int passes = 15) {
  const Index n = f.c.size(), p = f.b.size(), m = f.h.size();
  Equilibration eq{VectorXd::Ones(n), VectorXd::Ones(p), VectorXd::Ones(m)};
  if (!enabled) return eq;
  const detail::BlockOffsets off = detail::block_offsets(f.dims);
  for (int pass = 0; pass < passes; ++pass) {
    VectorXd colmax = VectorXd::Zero(n), rowA = VectorXd::Zero(p), rowG = VectorXd::Zero(m);
    for (int j = 0; j < f.A.outerSize(); ++j)
      for (SparseMatrix::InnerIterator it(f.A, j); it; ++it) {
        double v = std::abs(it.value() * eq.EA(it.row()) * eq.D(j));
        colmax(j) = std::max(colmax(j), v);
        rowA(it.row()) = std::max(rowA(it.row()), v);
      }
    for (int j = 0; j < f.G.outerSize(); ++j)
      for (SparseMatrix::InnerIterator it(f.G, j); it; ++it) {
        double v = std::abs(it.value() * eq.EG(it.row()) * eq.D(j));
        colmax(j) = std::max(colmax(j), v);
        rowG(it.row()) = std::max(rowG(it.row()), v);
      }
    auto blockmax = [&](Index o, Index len) {
      double mx = rowG.segment(o, len).maxCoeff();
      rowG.segment(o, len).setConstant(mx);
    };
    for (size_t b = 0; b < f.dims.soc.size(); ++b) blockmax(off.soc[b], f.dims.soc[b]);
    for (size_t b = 0; b < f.dims.psd.size(); ++b) blockmax(off.psd[b], svec_size(f.dims.psd[b]));
    for (Index j = 0; j < n; ++j)
      if (colmax(j) > 0) eq.D(j) /= std::sqrt(colmax(j));
    for (Index i = 0; i < p; ++i)
      if (rowA(i) > 0) eq.EA(i) /= std::sqrt(rowA(i));
    for (Index i = 0; i < m; ++i)
      if (rowG(i) > 0) eq.EG(i) /= std::sqrt(rowG(i));
  }
  return eq;
}

SparseMatrix scale(const SparseMatrix& M, const VectorXd& rows, const VectorXd& cols) {
  SparseMatrix out = M;
  for (int j = 0; j < out.outerSize(); ++j)
    for (SparseMatrix::InnerIterator it(out, j); it; ++it) it.valueRef() *= rows(it.row()) * cols(j);
  return out;
}

// quasidefinite KKT [dI A' G'; A -dI 0; G 0 -(W'W + dI)], lower triangle
class KktSolver {
 public:
  KktSolver(const SparseMatrix& A, const SparseMatrix& G, const ConeDims& dims, double reg, int refine)
      : A_(A), G_(G), At_(A.transpose()), Gt_(G.transpose()), dims_(dims), reg_(reg), refine_(refine) {
    n_ = A.cols();
    p_ = A.rows();
    m_ = G.rows();
    for (int j = 0; j < A.outerSize(); ++j)
      for (SparseMatrix::InnerIterator it(A, j); it; ++it) fixed_.emplace_back(n_ + it.row(), j, it.value());
    for (int j = 0; j < G.outerSize(); ++j)
      for (SparseMatrix::InnerIterator it(G, j); it; ++it) fixed_.emplace_back(n_ + p_ + it.row(), j, it.value());
    off_ = detail::block_offsets(dims);
  }

  bool factor(const Scaling& sc) {
    sc_ = &sc;
    blocks_ = detail::wtw_blocks(dims_, sc);
    assemble(reg_);
    if (signs_.empty()) {
      signs_.assign(static_cast<size_t>(n_ + p_ + m_), -1);
      std::fill(signs_.begin(), signs_.begin() + n_, 1);
    }
    return ldl_.factor(K_, signs_);
  }

  void assemble(double reg) {
    std::vector<Triplet> trip = fixed_;
    for (Index j = 0; j < n_; ++j) trip.emplace_back(j, j, reg);
    for (Index i = 0; i < p_; ++i) trip.emplace_back(n_ + i, n_ + i, -reg);
    const Index z0 = n_ + p_;
    for (Index i = 0; i < dims_.nonneg; ++i) trip.emplace_back(z0 + i, z0 + i, -(sc_->d(i) * sc_->d(i)) - reg);
    size_t b = 0;
    auto add_block = [&](Index o, const Eigen::MatrixXd& B) {
      for (Index j = 0; j < B.cols(); ++j)
        for (Index i = j; i < B.rows(); ++i)
          trip.emplace_back(z0 + o + i, z0 + o + j, -B(i, j) - (i == j ? reg : 0.0));
    };
    for (size_t k = 0; k < dims_.soc.size(); ++k, ++b) add_block(off_.soc[k], blocks_[b]);
    for (size_t k = 0; k < dims_.psd.size(); ++k, ++b) add_block(off_.psd[k], blocks_[b]);
    const Index N = n_ + p_ + m_;
    K_.resize(N, N);
    K_.setFromTriplets(trip.begin(), trip.end());
  }

  // exact (unregularised) KKT product
  VectorXd multiply(const VectorXd& u) const {
    VectorXd out(u.size());
    auto ux = u.head(n_);
    auto uy = u.segment(n_, p_);
    auto uz = u.tail(m_);
    out.head(n_) = At_ * uy + Gt_ * uz;
    out.segment(n_, p_) = A_ * ux;
    out.tail(m_) = G_ * ux - detail::apply_wtw(dims_, *sc_, uz);
    return out;
  }

  // right-preconditioned GMRES on the exact system, the factor as preconditioner
  VectorXd solve(const VectorXd& rhs) const {
    const double rn = std::max(rhs.lpNorm<Eigen::Infinity>(), 1e-300);
    VectorXd u = ldl_.solve(rhs);
    VectorXd r = rhs - multiply(u);
    double res = r.lpNorm<Eigen::Infinity>();
    const int restart = 20;
    for (int cycle = 0; cycle < refine_ && res > 1e-14 * rn; ++cycle) {
      const double beta = r.norm();
      Eigen::MatrixXd V(rhs.size(), restart + 1), Z(rhs.size(), restart);
      Eigen::MatrixXd Hs = Eigen::MatrixXd::Zero(restart + 1, restart);
      V.col(0) = r / beta;
      int k = 0;
      for (; k < restart; ++k) {
        Z.col(k) = ldl_.solve(V.col(k));
        VectorXd w = multiply(Z.col(k));
        for (int pass = 0; pass < 2; ++pass)
          for (int i = 0; i <= k; ++i) {
            double h = V.col(i).dot(w);
            Hs(i, k) += h;
            w -= h * V.col(i);
          }
        Hs(k + 1, k) = w.norm();
        if (!(Hs(k + 1, k) > 1e-300 * beta)) {
          ++k;
          break;
        }
        V.col(k + 1) = w / Hs(k + 1, k);
      }
      VectorXd g = VectorXd::Zero(k + 1);
      g(0) = beta;
      VectorXd yk = Hs.topLeftCorner(k + 1, k).colPivHouseholderQr().solve(g);
      VectorXd cand = u + Z.leftCols(k) * yk;
      VectorXd rc = rhs - multiply(cand);
      double rcn = rc.lpNorm<Eigen::Infinity>();
      if (!(rcn < res)) break;
      u = std::move(cand);
      r = std::move(rc);
      res = rcn;
    }
    return u;
  }

  Index n() const { return n_; }
  Index p() const { return p_; }
  Index m() const { return m_; }

 private:
  const SparseMatrix& A_;
  const SparseMatrix& G_;
  SparseMatrix At_, Gt_;
  ConeDims dims_;
  double reg_;
  int refine_;
  Index n_ = 0, p_ = 0, m_ = 0;
  std::vector<Triplet> fixed_;
  detail::BlockOffsets off_;
  std::vector<Eigen::MatrixXd> blocks_;
  const Scaling* sc_ = nullptr;
  SparseMatrix K_;
  detail::QuasidefiniteLdl ldl_;
  std::vector<signed char> signs_;
};

struct Direction {
  VectorXd x, y, z, s;
  double tau = 0.0, kappa = 0.0;
};

}  // namespace

StandardSolution solve_standard(const StandardForm& f, const SolverSettings& st) {
  const Index n = f.c.size(), p = f.b.size(), m = f.h.size();
  if (f.A.rows() != p || f.A.cols() != n || f.G.rows() != m || f.G.cols() != n || f.dims.size() != m)
    throw std::invalid_argument("solve_standard: inconsistent dimensions.");
  if (m == 0) throw std::invalid_argument("solve_standard: at least one cone constraint is required.");

  const Equilibration eq = equilibrate(f, st.equilibrate);
  const SparseMatrix A = scale(f.A, eq.EA, eq.D);
  const SparseMatrix G = scale(f.G, eq.EG, eq.D);
  const VectorXd c = f.c.cwiseProduct(eq.D);
  const VectorXd b = f.b.cwiseProduct(eq.EA);
  const VectorXd h = f.h.cwiseProduct(eq.EG);
  const ConeDims& dims = f.dims;
  const VectorXd e = detail::identity_element(dims);
  const double nu = static_cast<double>(dims.degree());

  const double bnorm = std::max(1.0, f.b.norm()), hnorm = std::max(1.0, f.h.norm()),
               cnorm = std::max(1.0, f.c.norm());

  KktSolver kkt(A, G, dims, st.regularization, st.refinement_steps);
  StandardSolution out;

  auto pack = [&](const VectorXd& rx, const VectorXd& ry, const VectorXd& rz) {
    VectorXd r(n + p + m);
    r << rx, ry, rz;
    return r;
  };

  // starting point from two least-squares solves with W = I
  Scaling sc = detail::identity_scaling(dims);
  if (!kkt.factor(sc)) return out;
  VectorXd x, y, z, s;
  {
    VectorXd u = kkt.solve(pack(VectorXd::Zero(n), b, h));
    x = u.head(n);
    s = -u.tail(m);
    VectorXd w = kkt.solve(pack(-c, VectorXd::Zero(p), VectorXd::Zero(m)));
    y = w.segment(n, p);
    z = w.tail(m);
    double ts = -detail::min_eigenvalue(dims, s);
    if (ts >= -1e-8 * std::max(1.0, s.norm())) s += (1.0 + ts) * e;
    double tz = -detail::min_eigenvalue(dims, z);
    if (tz >= -1e-8 * std::max(1.0, z.norm())) z += (1.0 + tz) * e;
  }
  double tau = 1.0, kappa = 1.0;

  const SparseMatrix At = A.transpose(), Gt = G.transpose();
  const SparseMatrix fAt = f.A.transpose(), fGt = f.G.transpose();

  struct Snapshot {
    VectorXd x, y, z, s;
    double pcost = 0.0, dcost = 0.0;
    Residuals res;
    int iter = 0;
  } best;
  double best_merit = std::numeric_limits<double>::infinity();

  for (int iter = 0; iter <= st.max_iterations; ++iter) {
    out.iterations = iter;
    // residuals of the embedding
    VectorXd rx = -At * y - Gt * z - c * tau;
    VectorXd ry = A * x - b * tau;
    VectorXd rz = s + G * x - h * tau;
    double rt = kappa + c.dot(x) + b.dot(y) + h.dot(z);

    // convergence in the original scaling
    VectorXd xu = eq.D.cwiseProduct(x) / tau;
    VectorXd yu = eq.EA.cwiseProduct(y) / tau;
    VectorXd zu = eq.EG.cwiseProduct(z) / tau;
    VectorXd su = s.cwiseQuotient(eq.EG) / tau;
    double pres_y = p > 0 ? (f.A * xu - f.b).norm() / bnorm : 0.0;
    double pres_z = (f.G * xu + su - f.h).norm() / hnorm;
    double pres = std::max(pres_y, pres_z);
    double dres = (fAt * yu + fGt * zu + f.c).norm() / cnorm;
    double pcost = f.c.dot(xu);
    double dcost = -f.b.dot(yu) - f.h.dot(zu);
    double gap = su.dot(zu);
    double relgap = std::abs(gap) / std::max(1.0, std::min(std::abs(pcost), std::abs(dcost)));
    out.residuals = {pres, dres, gap, relgap};
    const double merit = std::max({pres / st.feas_tol, dres / st.feas_tol, relgap / st.gap_tol});
    if (merit < best_merit) {
      best_merit = merit;
      best = {xu, yu, zu, su, pcost, dcost, out.residuals, iter};
    }
    if (pres <= st.feas_tol && dres <= st.feas_tol && relgap <= st.gap_tol) {
      out.status = SolveStatus::optimal;
      out.x = xu;
      out.y = yu;
      out.z = zu;
      out.s = su;
      out.primal_objective = pcost + f.c0;
      out.dual_objective = dcost + f.c0;
      return out;
    }
    // infeasibility certificates on the unnormalised iterate
    {
      VectorXd yr = eq.EA.cwiseProduct(y), zr = eq.EG.cwiseProduct(z);
      double bh = f.b.dot(yr) + f.h.dot(zr);
      if (bh < 0) {
        double res = (fAt * yr + fGt * zr).norm() / (-bh);
        if (res <= st.feas_tol) {
          out.status = SolveStatus::infeasible;
          out.y = yr / (-bh);
          out.z = zr / (-bh);
          out.x = VectorXd::Zero(n);
          out.s = VectorXd::Zero(m);
          return out;
        }
      }
      VectorXd xr = eq.D.cwiseProduct(x), sr = s.cwiseQuotient(eq.EG);
      double cx = f.c.dot(xr);
      if (cx < 0) {
        double ax = p > 0 ? (f.A * xr).norm() : 0.0;
        double res = std::max(ax, (f.G * xr + sr).norm()) / (-cx);
        if (res <= st.feas_tol) {
          out.status = SolveStatus::unbounded;
          out.x = xr / (-cx);
          out.s = sr / (-cx);
          out.y = VectorXd::Zero(p);
          out.z = VectorXd::Zero(m);
          return out;
        }
      }
    }
    if (iter == st.max_iterations) break;

    if (!detail::compute_scaling(dims, s, z, sc)) break;
    if (!kkt.factor(sc)) break;
    const VectorXd& lam = sc.lambda;
    const double mu = (s.dot(z) + tau * kappa) / (nu + 1.0);

    VectorXd u2 = kkt.solve(pack(-c, b, h));
    const double den_base = c.dot(u2.head(n)) + b.dot(u2.segment(n, p)) + h.dot(u2.tail(m)) - kappa / tau;

    auto newton = [&](double etaf, const VectorXd& ds, double dk) {
      Direction d;
      VectorXd l = detail::jordan_divide(dims, lam, ds);
      VectorXd u1 = kkt.solve(pack(etaf * rx, -etaf * ry, -etaf * rz - detail::apply_w(dims, sc, l, WOp::wt)));
      double num = -etaf * rt - dk / tau - (c.dot(u1.head(n)) + b.dot(u1.segment(n, p)) + h.dot(u1.tail(m)));
      d.tau = num / den_base;
      d.x = u1.head(n) + d.tau * u2.head(n);
      d.y = u1.segment(n, p) + d.tau * u2.segment(n, p);
      d.z = u1.tail(m) + d.tau * u2.tail(m);
      d.s = detail::apply_w(dims, sc, l - detail::apply_w(dims, sc, d.z, WOp::w), WOp::wt);
      d.kappa = (dk - kappa * d.tau) / tau;
      return d;
    };
    auto step_length = [&](const Direction& d) {
      double a = std::min(detail::max_step(dims, s, d.s), detail::max_step(dims, z, d.z));
      if (d.tau < 0) a = std::min(a, -tau / d.tau);
      if (d.kappa < 0) a = std::min(a, -kappa / d.kappa);
      return a;
    };

    // predictor
    Direction aff = newton(1.0, -detail::jordan_product(dims, lam, lam), -tau * kappa);
    double alpha_aff = std::min(1.0, step_length(aff));
    double sigma = std::pow(1.0 - alpha_aff, 3);
    // combined step with second-order correction
    VectorXd ds_aff = detail::apply_w(dims, sc, aff.s, WOp::winvt);
    VectorXd dz_aff = detail::apply_w(dims, sc, aff.z, WOp::w);
    VectorXd dsc = -detail::jordan_product(dims, lam, lam) + sigma * mu * e - detail::jordan_product(dims, ds_aff, dz_aff);
    double dkc = -tau * kappa + sigma * mu - aff.tau * aff.kappa;
    Direction d = newton(1.0 - sigma, dsc, dkc);
    double alpha = std::min(1.0, 0.99 * step_length(d));
    if (!(alpha > 0) || !std::isfinite(alpha)) break;

    x += alpha * d.x;
    y += alpha * d.y;
    z += alpha * d.z;
    s += alpha * d.s;
    tau += alpha * d.tau;
    kappa += alpha * d.kappa;
    if (!x.allFinite() || !(tau > 0) || !(kappa > 0)) break;
  }
  // report the least infeasible iterate seen
  out.status = SolveStatus::numerical_failure;
  if (std::isfinite(best_merit)) {
    out.x = best.x;
    out.y = best.y;
    out.z = best.z;
    out.s = best.s;
    out.primal_objective = best.pcost + f.c0;
    out.dual_objective = best.dcost + f.c0;
    out.residuals = best.res;
  }
  return out;
}

}  // namespace ellipsotope::conic
