#include "ellipsotope/safeset.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ellipsotope/containment.hpp"
#include "ellipsotope/oracles.hpp"

namespace ellipsotope {

using conic::ConeProgram;
using conic::LinExpr;
using conic::Variable;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {
// the solver's last digits must not decide the independent re-checks
constexpr double kTerminalBackoff = 1e-6;
// state and input rows are tightened by this much (relative to max(1, |rhs|))
constexpr double kRowBackoff = 1e-6;
constexpr double kMinScale = 1e-6;
constexpr double kCenterPenalty = 1e-6;
}  // namespace

std::string to_string(TemplateKind t) { return t == TemplateKind::zonotope ? "zonotope" : "ellipsoid"; }

TemplateKind template_from_string(const std::string& s) {
  if (s == "zonotope") return TemplateKind::zonotope;
  if (s == "ellipsoid") return TemplateKind::ellipsoid;
  throw std::invalid_argument("unknown template '" + s + "'.");
}

SafeSetProblem::SafeSetProblem(LtiSystem system_, HPolyhedron X_, HPolyhedron U_, MatrixXd GW_)
    : system(std::move(system_)), X(std::move(X_)), U(std::move(U_)), GW(std::move(GW_)) {
  if (GW.size() == 0) GW = MatrixXd::Zero(system.nw(), 0);
}

Index SafeSetProblem::template_generators() const {
  if (m != 0) return m;
  return template_kind == TemplateKind::zonotope ? 2 * system.nx() : system.nx();
}

void SafeSetProblem::validate() const {
  const Index nx = system.nx();
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw std::invalid_argument("SafeSetProblem: t_end must be positive.");
  if (N_ts < 1) throw std::invalid_argument("SafeSetProblem: N_ts must be at least 1.");
  if (eta < 1) throw std::invalid_argument("SafeSetProblem: eta must be at least 1.");
  if (X.dimension() != nx) throw std::invalid_argument("SafeSetProblem: X has the wrong dimension.");
  if (U.dimension() != system.nu()) throw std::invalid_argument("SafeSetProblem: U has the wrong dimension.");
  if (GW.rows() != system.nw()) throw std::invalid_argument("SafeSetProblem: W generators need n_w rows.");
  if (m < 0 || (m != 0 && m < nx)) throw std::invalid_argument("SafeSetProblem: m must be at least n_x.");
  const Index n_beta = template_kind == TemplateKind::zonotope ? template_generators() : nx;
  if (m_u < 0 || m_u > n_beta) throw std::invalid_argument("SafeSetProblem: m_u exceeds the parameter dimension.");
  if (lqr_Q.size() != 0 && (lqr_Q.rows() != nx || lqr_Q.cols() != nx))
    throw std::invalid_argument("SafeSetProblem: lqr_Q must be n_x by n_x.");
  if (lqr_Rw.size() != 0 && (lqr_Rw.rows() != system.nu() || lqr_Rw.cols() != system.nu()))
    throw std::invalid_argument("SafeSetProblem: lqr_Rw must be n_u by n_u.");
}

namespace {

class Builder {
 public:
  Builder(ConeProgram& P, const Variable& theta) : P_(P), theta_(theta) {}

  // a^T M(:, c)
  LinExpr form(const AffineMatrix& M, const VectorXd& a, Index c) const {
    LinExpr e(a.dot(M.constant.col(c)));
    Eigen::RowVectorXd row = a.transpose() * M.jacobian.middleRows(c * M.rows(), M.rows());
    for (Index k = 0; k < row.size(); ++k)
      if (row(k) != 0.0) e.add_term(theta_.index(k), row(k));
    return e;
  }

  LinExpr entry(const AffineMatrix& M, Index r, Index c) const {
    LinExpr e(M.constant(r, c));
    const auto row = M.jacobian.row(r + c * M.rows());
    for (Index k = 0; k < row.size(); ++k)
      if (row(k) != 0.0) e.add_term(theta_.index(k), row(k));
    return e;
  }

  LinExpr abs(const LinExpr& e) {
    if (e.terms().empty()) return LinExpr(std::abs(e.constant()));
    Variable a = P_.add_variable("abs");
    P_.add_less_equal(e, a(0));
    P_.add_less_equal(-e, a(0));
    return a(0);
  }

  // upper bound of a^T x over the affine zonotope, as an expression
  LinExpr support(const AffineZonotope& Z, const VectorXd& a) {
    LinExpr e = form(Z.center, a, 0);
    for (Index c = 0; c < Z.generators.cols(); ++c) e += abs(form(Z.generators, a, c));
    if (Z.fixed.cols() > 0) e += (a.transpose() * Z.fixed).cwiseAbs().sum();
    return e;
  }

  ConeProgram& program() { return P_; }

 private:
  ConeProgram& P_;
  Variable theta_;
};

double tightened(double rhs) { return rhs - kRowBackoff * std::max(1.0, std::abs(rhs)); }

AffineZonotope euler_point(const AffineZonotope& x, const AffineZonotope& y, double dt) {
  AffineZonotope out = x;
  AffineMatrix yc = y.center, yg = y.generators;
  yc.constant *= dt;
  yc.jacobian *= dt;
  yg.constant *= dt;
  yg.jacobian *= dt;
  out.center += yc;
  out.generators += yg;
  out.fixed = x.fixed + dt * y.fixed;
  return out;
}

}  // namespace

ConeProgram assemble_program(const SafeSetProblem& problem, const ReachModel& reach, ProgramHandles* handles) {
  problem.validate();
  const DecisionLayout& L = reach.layout;
  const Index nx = L.nx, nt = L.size();
  if (static_cast<Index>(reach.states.size()) != L.N + 1 || static_cast<Index>(reach.inputs.size()) != L.N)
    throw std::invalid_argument("assemble_program: reach model does not match the horizon.");
  if (problem.system.nx() != nx) throw std::invalid_argument("assemble_program: reach model does not match the system.");
  const bool ellipsoid = problem.template_kind == TemplateKind::ellipsoid;

  ConeProgram P;
  Variable theta = P.add_variable("theta", nt);
  Builder b(P, theta);

  // state constraints on every interval, input constraints on every hold
  const MatrixXd& Lx = problem.X.Lambda;
  const MatrixXd& Lu = problem.U.Lambda;
  for (Index i = 0; i < L.N; ++i) {
    const AffineZonotope& x = reach.states[static_cast<size_t>(i)];
    const AffineZonotope& y = reach.rates[static_cast<size_t>(i)];
    if (Lx.rows() > 0) {
      // nu >= ||y||_inf over the set
      LinExpr nu_i;
      if (reach.interval_bloat > 0.0) {
        Variable v = P.add_variable("nu");
        nu_i = v(0);
        for (Index r = 0; r < nx; ++r) {
          VectorXd e = VectorXd::Unit(nx, r);
          LinExpr bound = b.abs(b.form(y.center, e, 0));
          for (Index c = 0; c < y.generators.cols(); ++c) bound += b.abs(b.form(y.generators, e, c));
          bound += y.fixed.row(r).cwiseAbs().sum();
          P.add_less_equal(bound, nu_i, "rate bound");
        }
      }
      const AffineZonotope xe = euler_point(x, y, reach.dt);
      for (Index j = 0; j < Lx.rows(); ++j) {
        VectorXd a = Lx.row(j).transpose();
        const double box = a.cwiseAbs().dot(reach.disturbance_box);
        const double bloat = a.cwiseAbs().sum() * reach.interval_bloat;
        for (const AffineZonotope* z : {&x, &xe}) {
          LinExpr lhs = b.support(*z, a) + box;
          if (bloat > 0.0) lhs += bloat * nu_i;
          P.add_less_equal(lhs, LinExpr(tightened(problem.X.lambda(j))), "state");
        }
      }
    }
    const AffineZonotope& u = reach.inputs[static_cast<size_t>(i)];
    for (Index j = 0; j < Lu.rows(); ++j)
      P.add_less_equal(b.support(u, Lu.row(j).transpose()), LinExpr(tightened(problem.U.lambda(j))), "input");
  }

  // scalings
  std::vector<LinExpr> s;
  for (Index j = 0; j < L.ns; ++j) {
    s.push_back(LinExpr::variable(theta.index(L.s() + j)));
    P.add_nonnegative(s.back() - kMinScale, "scale floor");
  }

  // terminal containment: [G_N, c_N - c_T, D_N] = H Z with row sums bounded by s
  const AffineZonotope& xN = reach.states.back();
  AffineMatrix cdiff = xN.center;
  for (Index r = 0; r < nx; ++r) cdiff.jacobian(r, L.c_T() + r) -= 1.0;
  const double shrink = (1.0 - kTerminalBackoff) / (ellipsoid ? std::sqrt(static_cast<double>(nx)) : 1.0);
  if (ellipsoid) {
    const MatrixXd Rinv = reach.G_template.inverse();
    const AffineMatrix G = xN.generators.left_multiply(Rinv);
    const AffineMatrix c = cdiff.left_multiply(Rinv);
    const MatrixXd D = Rinv * xN.fixed;
    for (Index j = 0; j < nx; ++j) {
      VectorXd e = VectorXd::Unit(nx, j);
      LinExpr row = b.abs(b.form(c, e, 0));
      for (Index k = 0; k < G.cols(); ++k) row += b.abs(b.form(G, e, k));
      row += D.row(j).cwiseAbs().sum();
      P.add_less_equal(row, shrink * s[static_cast<size_t>(j)], "terminal row");
    }
  } else {
    const MatrixXd& H = reach.G_template;
    const Index l = H.cols();
    const Index ncols = xN.generators.cols() + 1 + xN.fixed.cols();
    Variable Z = P.add_variable("Z", l, ncols);
    for (Index c = 0; c < ncols; ++c)
      for (Index r = 0; r < nx; ++r) {
        LinExpr e;
        for (Index j = 0; j < l; ++j)
          if (H(r, j) != 0.0) e.add_term(Z.index(j, c), H(r, j));
        if (c < xN.generators.cols())
          e -= b.entry(xN.generators, r, c);
        else if (c == xN.generators.cols())
          e -= b.entry(cdiff, r, 0);
        else
          e -= LinExpr(xN.fixed(r, c - xN.generators.cols() - 1));
        P.add_equality(e, "terminal equality");
      }
    for (Index j = 0; j < l; ++j) {
      LinExpr row;
      for (Index c = 0; c < ncols; ++c) row += b.abs(Z(j, c));
      P.add_less_equal(row, shrink * s[static_cast<size_t>(j)], "terminal row");
    }
  }

  Variable t = P.add_variable("geomean");
  P.add_geometric_mean(t(0), s, "volume");
  // directions the dynamics cannot see (e.g. a leader position) leave c_T free; pin them
  LinExpr objective = t(0);
  for (Index r = 0; r < nx; ++r) objective -= kCenterPenalty * b.abs(LinExpr::variable(theta.index(L.c_T() + r)));
  P.maximize(objective);
  if (handles) {
    handles->theta = theta;
    handles->s_geo = t;
    handles->n_theta = nt;
  }
  return P;
}

namespace {

Controller extract_controller(const SafeSetProblem& problem, const ReachModel& rm, const VectorXd& theta) {
  const DecisionLayout& L = rm.layout;
  Controller c;
  c.K = rm.K;
  c.t_end = problem.t_end;
  c.c_T = theta.segment(L.c_T(), L.nx);
  VectorXd s = theta.segment(L.s(), L.ns);
  c.q = problem.template_kind == TemplateKind::ellipsoid ? Exponent::two() : Exponent::infinity();
  c.G_T = rm.G_template * s.asDiagonal();
  for (Index i = 0; i < L.N; ++i) {
    c.U_blocks.push_back(Eigen::Map<const MatrixXd>(theta.data() + L.U(i), L.nu, L.mb));
    c.c_u.push_back(theta.segment(L.c_u(i), L.nu));
  }
  return c;
}

}  // namespace

SafeSetResult synthesize_safe_set(const SafeSetProblem& problem, const conic::SolverSettings& settings) {
  problem.validate();
  SafeSetResult res;
  const LqrResult lqr = lqr_gain(problem.system, problem.lqr_Q, problem.lqr_Rw, problem.dt());
  res.diagnostics.lqr_spectral_radius = lqr.spectral_radius;
  res.diagnostics.lqr_weights = (problem.lqr_Q.size() == 0 ? std::string("Q=I") : std::string("Q=custom")) + "," +
                                (problem.lqr_Rw.size() == 0 ? "Rw=I" : "Rw=custom");
  res.reach = parametric_reach(problem, lqr);

  ProgramHandles h;
  const ConeProgram P = assemble_program(problem, res.reach, &h);
  res.diagnostics.variables = P.num_variables();
  res.diagnostics.constraints = static_cast<Index>(P.constraints().size());

  const auto t0 = std::chrono::steady_clock::now();
  conic::SolverSettings st = settings;
  conic::Solution sol;
  for (int attempt = 0;; ++attempt) {
    sol = conic::solve(P, st);
    if (sol.status == conic::SolveStatus::infeasible) {
      res.diagnostics.status = "infeasible";
      res.diagnostics.iterations = sol.iterations;
      res.message = "no safe set found with this template";
      return res;
    }
    const bool converged =
        sol.status == conic::SolveStatus::optimal ||
        (sol.status == conic::SolveStatus::numerical_failure &&
         std::max({sol.residuals.primal, sol.residuals.dual, sol.residuals.relative_gap}) <= 1e-6);
    const double tol = std::max(1e-6, 100.0 * st.feas_tol) * (1.0 + std::abs(sol.objective));
    if (converged && conic::verify_solution(P, sol, tol).empty()) break;
    if (attempt == 1) throw SolverFailure("safe-set program: solver failed at widened tolerance.");
    st.feas_tol = std::max(st.feas_tol, 1e-6);
    st.gap_tol = std::max(st.gap_tol, 1e-6);
  }
  res.diagnostics.solve_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  res.diagnostics.status = conic::to_string(sol.status);
  res.diagnostics.objective = sol.objective;
  res.diagnostics.iterations = sol.iterations;
  res.diagnostics.primal_residual = sol.residuals.primal;
  res.diagnostics.dual_residual = sol.residuals.dual;
  res.diagnostics.relative_gap = sol.residuals.relative_gap;

  res.theta = sol.x.head(h.n_theta);
  res.s = res.theta.segment(res.reach.layout.s(), res.reach.layout.ns);
  res.controller = extract_controller(problem, res.reach, res.theta);
  const Controller& c = res.controller;
  res.T = Ellipsotope(c.q, c.G_T, c.c_T);
  res.T_hat = problem.template_kind == TemplateKind::ellipsoid
                  ? Ellipsotope::zonotope(c.G_T * res.reach.G_fixed, c.c_T)
                  : *res.T;

  // independent re-checks on the numeric optimum
  const Ellipsotope reachN = res.reach.states.back().evaluate(res.theta);
  ContainmentOptions opts;
  opts.method = Method::lr;
  opts.sampling_lower_bound = false;
  opts.parallel = false;
  res.diagnostics.verify_radius = containment_radius(reachN, *res.T, opts).r_upper;
  if (problem.template_kind == TemplateKind::ellipsoid)
    res.diagnostics.hull_radius = radius_zonotope_facets(*res.T, *res.T_hat).value;
  else
    res.diagnostics.hull_radius = 1.0;

  double margin = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < res.reach.inputs.size(); ++i) {
    if (problem.U.Lambda.rows() > 0)
      margin = std::min(margin, zonotope_in_polyhedron(res.reach.inputs[i].evaluate(res.theta), problem.U).minCoeff());
    if (problem.X.Lambda.rows() > 0)
      margin = std::min(margin, zonotope_in_polyhedron(res.reach.states[i].evaluate(res.theta), problem.X).minCoeff());
  }
  res.diagnostics.min_polyhedron_margin = margin;

  const bool verified = res.diagnostics.verify_radius <= 1.0 + 1e-6 && res.diagnostics.hull_radius <= 1.0 + 1e-6 &&
                        margin >= -1e-8;
  res.found = verified;
  res.message = verified ? "safe set found" : "post-verification failed";
  return res;
}

VectorXd controller_parameter(const Controller& c, const VectorXd& x0) {
  if (x0.size() != c.c_T.size()) throw std::invalid_argument("controller_parameter: x0 has the wrong dimension.");
  if (c.q.is_two()) {
    VectorXd beta = c.G_T.partialPivLu().solve(x0 - c.c_T);
    if (!(beta.norm() <= 1.0 + 1e-6)) throw std::invalid_argument("controller_parameter: x0 is outside the safe set.");
    return beta;
  }
  EllipsotopeNorm norm(c.G_T, c.q);
  auto v = norm.evaluate(x0 - c.c_T);
  if (!v || !(v->norm <= 1.0 + 1e-6)) throw std::invalid_argument("controller_parameter: x0 is outside the safe set.");
  return v->coefficients;
}

VectorXd evaluate_controller(const Controller& c, const VectorXd& beta, const VectorXd& x, double t) {
  const Index N = static_cast<Index>(c.c_u.size());
  if (N == 0) throw std::invalid_argument("evaluate_controller: empty controller.");
  if (x.size() != c.K.cols()) throw std::invalid_argument("evaluate_controller: state has the wrong dimension.");
  if (!(t >= 0.0 && t <= c.t_end)) throw std::invalid_argument("evaluate_controller: t outside [0, t_end].");
  const MatrixXd& U = c.U_blocks.front();
  if (beta.size() < U.cols()) throw std::invalid_argument("evaluate_controller: parameter has the wrong dimension.");
  Index i = static_cast<Index>(std::floor(t * static_cast<double>(N) / c.t_end));
  i = std::clamp<Index>(i, 0, N - 1);
  const MatrixXd& Ui = c.U_blocks[static_cast<size_t>(i)];
  return c.K * x + c.c_u[static_cast<size_t>(i)] + Ui * beta.head(Ui.cols());
}

VectorXd evaluate_controller(const Controller& c, const VectorXd& x0, double t) {
  return evaluate_controller(c, controller_parameter(c, x0), x0, t);
}

SafeSetProblem platoon_benchmark(int k, TemplateKind kind) {
  if (k < 2) throw std::invalid_argument("platoon_benchmark: at least two vehicles.");
  const Index n = 2 * k;
  MatrixXd A = MatrixXd::Zero(n, n), B = MatrixXd::Zero(n, k);
  for (int i = 0; i < k; ++i) A(2 * i, 2 * i + 1) = 1.0;
  B(1, 0) = 1.0;
  for (int i = 1; i < k; ++i) {
    B(2 * i + 1, i - 1) = 1.0;
    B(2 * i + 1, i) = -1.0;
  }
  LtiSystem sys(A, B, B, VectorXd::Zero(n));

  // x_{2i-1} >= 0 for the following vehicles
  MatrixXd Lx = MatrixXd::Zero(k - 1, n);
  for (int i = 1; i < k; ++i) Lx(i - 1, 2 * i) = -1.0;
  HPolyhedron X(Lx, VectorXd::Zero(k - 1));
  HPolyhedron U = HPolyhedron::box(VectorXd::Constant(k, -10.0), VectorXd::Constant(k, 10.0));

  SafeSetProblem p(sys, X, U, MatrixXd::Identity(k, k));
  p.N_ts = 10 * (k + 1);
  p.t_end = 0.1 * p.N_ts;
  p.eta = 2;
  p.template_kind = kind;
  p.m = kind == TemplateKind::zonotope ? 5 * k : 2 * k;
  return p;
}

}  // namespace ellipsotope
