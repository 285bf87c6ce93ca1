#include <algorithm>
#include <cmath>

#include "ellipsotope/containment.hpp"
#include "ellipsotope/norms.hpp"

namespace ellipsotope {

using conic::ConeProgram;
using conic::LinExpr;
using Eigen::MatrixXd;
using Eigen::VectorXd;

conic::Solution solve_verified(const ConeProgram& program, const conic::SolverSettings& settings,
                               const std::string& what) {
  conic::SolverSettings s = settings;
  for (int attempt = 0; attempt < 2; ++attempt) {
    conic::Solution sol = conic::solve(program, s);
    if (sol.status == conic::SolveStatus::optimal) {
      const double tol = std::max(1e-6, 100.0 * s.feas_tol) * (1.0 + std::abs(sol.objective));
      if (conic::verify_solution(program, sol, tol).empty()) return sol;
    } else if (sol.status != conic::SolveStatus::numerical_failure) {
      throw SolverFailure(what + ": solver reported " + conic::to_string(sol.status) + ".");
    } else if (std::max({sol.residuals.primal, sol.residuals.dual, sol.residuals.relative_gap}) <= 1e-6 &&
               conic::verify_solution(program, sol, 1e-6 * (1.0 + std::abs(sol.objective))).empty()) {
      // a stalled but nearly converged iterate beats a fresh loose solve
      return sol;
    }
    s.feas_tol = std::max(s.feas_tol, 1e-6);
    s.gap_tol = std::max(s.gap_tol, 1e-6);
  }
  throw SolverFailure(what + ": solver failed at widened tolerance.");
}

namespace {

void check_surjective(const MatrixXd& H, const char* who) {
  if (rank_and_projection(H).rank != H.rows())
    throw std::invalid_argument(std::string(who) + ": circumbody generators must be surjective; project first.");
}

void add_lmi(ConeProgram& P, const MatrixXd& G, const MatrixXd& H, const conic::Variable& v,
             const conic::Variable& w) {
  const Index n = G.rows(), m = G.cols(), l = H.cols();
  conic::ExprMatrix S(m + n, m + n);
  for (Index j = 0; j < m; ++j) S(j, j) = v(j);
  for (Index r = 0; r < n; ++r)
    for (Index j = 0; j < m; ++j) S(m + r, j) = LinExpr(-G(r, j));
  for (Index c = 0; c < n; ++c)
    for (Index r = c; r < n; ++r) {
      LinExpr e;
      for (Index i = 0; i < l; ++i)
        if (H(r, i) * H(c, i) != 0.0) e.add_term(w.index(i), H(r, i) * H(c, i));
      S(m + r, m + c) = e;
    }
  P.add_psd(S, "lmi");
}

std::vector<LinExpr> entries(const conic::Variable& v) {
  std::vector<LinExpr> out;
  for (Index i = 0; i < v.size(); ++i) out.push_back(LinExpr::variable(v.offset() + i));
  return out;
}

}  // namespace

LrResult lr_relaxation(const MatrixXd& G, const MatrixXd& H, const Exponent& q, const conic::SolverSettings& settings) {
  if (G.rows() != H.rows()) throw std::invalid_argument("lr_relaxation: inconsistent dimensions.");
  check_surjective(H, "lr_relaxation");
  const Index n = G.rows(), m = G.cols(), l = H.cols();
  ConeProgram P;
  auto X = P.add_variable("X", l, m);
  auto U = P.add_variable("U", l, m);
  auto t = P.add_variable("t");
  std::vector<LinExpr> rows(static_cast<size_t>(l));
  for (Index i = 0; i < l; ++i)
    for (Index j = 0; j < m; ++j) {
      P.add_less_equal(X(i, j), U(i, j));
      P.add_less_equal(-X(i, j), U(i, j));
      rows[static_cast<size_t>(i)] += U(i, j);
    }
  P.add_pnorm(t(0), rows, q);
  for (Index r = 0; r < n; ++r)
    for (Index j = 0; j < m; ++j) {
      LinExpr e(-G(r, j));
      for (Index i = 0; i < l; ++i)
        if (H(r, i) != 0.0) e.add_term(X.index(i, j), H(r, i));
      P.add_equality(e);
    }
  P.minimize(t(0));
  conic::Solution sol = solve_verified(P, settings, "lr_relaxation");
  LrResult out;
  out.X = sol.value(X);
  // the objective of the returned feasible X, recomputed exactly
  VectorXd rn = out.X.cwiseAbs().rowwise().sum();
  out.value = vector_norm(rn, q);
  return out;
}

LrDualResult lr_dual(const MatrixXd& G, const MatrixXd& H, const Exponent& q, const conic::SolverSettings& settings) {
  if (G.rows() != H.rows()) throw std::invalid_argument("lr_dual: inconsistent dimensions.");
  check_surjective(H, "lr_dual");
  const Index n = G.rows(), m = G.cols(), l = H.cols();
  ConeProgram P;
  auto Y = P.add_variable("Y", n, m);
  auto u = P.add_variable("u", l);
  LinExpr obj;
  for (Index r = 0; r < n; ++r)
    for (Index j = 0; j < m; ++j)
      if (G(r, j) != 0.0) obj.add_term(Y.index(r, j), G(r, j));
  for (Index i = 0; i < l; ++i)
    for (Index j = 0; j < m; ++j) {
      LinExpr e;
      for (Index r = 0; r < n; ++r)
        if (H(r, i) != 0.0) e.add_term(Y.index(r, j), H(r, i));
      P.add_less_equal(e, u(i));
      P.add_less_equal(-e, u(i));
    }
  P.add_pnorm(LinExpr(1.0), entries(u), q.conjugate());
  P.maximize(obj);
  conic::Solution sol = solve_verified(P, settings, "lr_dual");
  LrDualResult out;
  out.Y = sol.value(Y);
  // rescale onto the feasible set so the objective is a valid lower value
  const MatrixXd HY = H.transpose() * out.Y;
  const double nrm = vector_norm(HY.cwiseAbs().rowwise().maxCoeff(), q.conjugate());
  if (nrm > 1.0) out.Y /= nrm;
  out.value = (G.transpose() * out.Y).trace();
  return out;
}

bool lr_exactness_certificate(const MatrixXd& Y, double tol) {
  const Index m = Y.cols();
  double scale = 0.0;
  for (Index j = 0; j < m; ++j) scale = std::max(scale, Y.col(j).lpNorm<Eigen::Infinity>());
  if (scale == 0.0) return true;
  for (Index i = 0; i < m; ++i)
    for (Index j = i + 1; j < m; ++j) {
      double d = std::min((Y.col(i) - Y.col(j)).lpNorm<Eigen::Infinity>(), (Y.col(i) + Y.col(j)).lpNorm<Eigen::Infinity>());
      if (d > tol * scale) return false;
    }
  return true;
}

double dual_lower_bound(const MatrixXd& G, const MatrixXd& H, const Exponent& q, const VectorXd& y) {
  const double den = vector_norm(H.transpose() * y, q.conjugate());
  if (den == 0.0) return 0.0;
  return (G.transpose() * y).lpNorm<1>() / den;
}

SdpRelaxationResult zsr_relaxation(const MatrixXd& G, const MatrixXd& H, const Exponent& q,
                                   const conic::SolverSettings& settings) {
  if (G.rows() != H.rows()) throw std::invalid_argument("zsr_relaxation: inconsistent dimensions.");
  if (q.is_one() || q.is_infinite() || q.value() > 2.0)
    throw std::invalid_argument("zsr_relaxation: q must lie in (1, 2].");
  check_surjective(H, "zsr_relaxation");
  ConeProgram P;
  auto v = P.add_variable("v", G.cols());
  auto w = P.add_variable("w", H.cols());
  auto tw = P.add_variable("tw");
  add_lmi(P, G, H, v, w);
  P.add_pnorm(tw(0), entries(w), weight_norm_exponent(q.conjugate()));
  LinExpr obj = 0.5 * tw(0);
  for (Index j = 0; j < G.cols(); ++j) obj += 0.5 * v(j);
  P.minimize(obj);
  conic::Solution sol = solve_verified(P, settings, "zsr_relaxation");
  SdpRelaxationResult out;
  out.v = sol.value(v);
  out.w = sol.value(w);
  out.value = sol.objective;
  return out;
}

SdpRelaxationResult sr_relaxation(const MatrixXd& G, const MatrixXd& H, const Exponent& p, const Exponent& q,
                                  const conic::SolverSettings& settings) {
  if (G.rows() != H.rows()) throw std::invalid_argument("sr_relaxation: inconsistent dimensions.");
  if (q.is_one() || q.is_infinite() || q.value() > 2.0) throw std::invalid_argument("sr_relaxation: q must lie in (1, 2].");
  if (p.is_infinite() || p.value() < 2.0) throw std::invalid_argument("sr_relaxation: p must lie in [2, inf).");
  check_surjective(H, "sr_relaxation");
  ConeProgram P;
  auto v = P.add_variable("v", G.cols());
  auto w = P.add_variable("w", H.cols());
  auto tv = P.add_variable("tv");
  auto tw = P.add_variable("tw");
  add_lmi(P, G, H, v, w);
  P.add_pnorm(tv(0), entries(v), weight_norm_exponent(p));
  P.add_pnorm(tw(0), entries(w), weight_norm_exponent(q.conjugate()));
  P.minimize(0.5 * tv(0) + 0.5 * tw(0));
  conic::Solution sol = solve_verified(P, settings, "sr_relaxation");
  SdpRelaxationResult out;
  out.v = sol.value(v);
  out.w = sol.value(w);
  out.value = sol.objective;
  return out;
}

}  // namespace ellipsotope
