#include <cmath>
#include <stdexcept>

#include "ellipsotope/safeset.hpp"

namespace ellipsotope {

using Eigen::MatrixXd;
using Eigen::VectorXd;

AffineMatrix::AffineMatrix(Index rows, Index cols, Index n_theta)
    : constant(MatrixXd::Zero(rows, cols)), jacobian(MatrixXd::Zero(rows * cols, n_theta)) {}

MatrixXd AffineMatrix::evaluate(const VectorXd& theta) const {
  if (theta.size() != jacobian.cols()) throw std::invalid_argument("AffineMatrix: decision vector has the wrong size.");
  VectorXd v = jacobian * theta;
  return constant + Eigen::Map<const MatrixXd>(v.data(), rows(), cols());
}

AffineMatrix AffineMatrix::left_multiply(const MatrixXd& L) const {
  if (L.cols() != rows()) throw std::invalid_argument("AffineMatrix: dimension mismatch.");
  AffineMatrix out(L.rows(), cols(), jacobian.cols());
  out.constant = L * constant;
  for (Index c = 0; c < cols(); ++c)
    out.jacobian.middleRows(c * L.rows(), L.rows()) = L * jacobian.middleRows(c * rows(), rows());
  return out;
}

AffineMatrix& AffineMatrix::operator+=(const AffineMatrix& other) {
  if (other.rows() != rows() || other.cols() != cols() || other.jacobian.cols() != jacobian.cols())
    throw std::invalid_argument("AffineMatrix: dimension mismatch.");
  constant += other.constant;
  jacobian += other.jacobian;
  return *this;
}

Ellipsotope AffineZonotope::evaluate(const VectorXd& theta) const {
  MatrixXd G(center.rows(), generators.cols() + fixed.cols());
  G << generators.evaluate(theta), fixed;
  return Ellipsotope::zonotope(G, center.evaluate(theta).col(0));
}

double taylor_remainder(const MatrixXd& A, double dt, int eta) {
  if (eta < 1) throw std::invalid_argument("taylor_remainder: Taylor order must be at least 1.");
  const double rho = A.cwiseAbs().rowwise().sum().maxCoeff() * dt;
  if (!(rho < eta + 2)) throw std::runtime_error("taylor_remainder: time step too large for the Taylor order.");
  double term = 1.0;
  for (int j = 1; j <= eta + 1; ++j) term *= rho / j;
  return term / (1.0 - rho / (eta + 2));
}

namespace {

// dt * sum_{j>=1} rho^j/(j+1)!
double interval_factor(double rho, double dt) {
  if (rho == 0.0) return 0.0;
  if (rho < 1e-3) return dt * (rho / 2.0 + rho * rho / 6.0 + rho * rho * rho / 24.0) * (1.0 + rho / 5.0);
  return dt * (std::expm1(rho) - rho) / rho;
}

MatrixXd nonzero_columns(const MatrixXd& M) {
  std::vector<Index> keep;
  for (Index c = 0; c < M.cols(); ++c)
    if (M.col(c).cwiseAbs().maxCoeff() > 0.0) keep.push_back(c);
  MatrixXd out(M.rows(), static_cast<Index>(keep.size()));
  for (size_t k = 0; k < keep.size(); ++k) out.col(static_cast<Index>(k)) = M.col(keep[k]);
  return out;
}

MatrixXd hstack(const MatrixXd& a, const MatrixXd& b) {
  MatrixXd out(a.rows(), a.cols() + b.cols());
  out << a, b;
  return out;
}

}  // namespace

ReachModel parametric_reach(const SafeSetProblem& problem, const LqrResult& lqr) {
  problem.validate();
  const LtiSystem& sys = problem.system;
  const Index nx = sys.nx(), nu = sys.nu(), nw = sys.nw();
  const int N = problem.N_ts;
  const double dt = problem.dt();
  if (lqr.K.rows() != nu || lqr.K.cols() != nx) throw std::invalid_argument("parametric_reach: gain has the wrong shape.");
  if (lqr.R.rows() != nx || lqr.R.cols() != nx) throw std::invalid_argument("parametric_reach: R has the wrong shape.");

  ReachModel rm;
  rm.dt = dt;
  rm.K = lqr.K;
  Discretization d = zero_order_hold(sys, dt);
  rm.Ad = d.Ad;
  rm.Bd = d.Bd;
  rm.Gamma = d.Gamma;
  rm.Phi = d.Ad + d.Bd * lqr.K;

  const Index m = problem.template_generators();
  const bool ellipsoid = problem.template_kind == TemplateKind::ellipsoid;
  if (ellipsoid) {
    rm.G_fixed = m == nx ? MatrixXd::Identity(nx, nx) : unit_ball_zonotope(nx, m, BallApproximation::outer);
    rm.G_template = lqr.R;
    rm.beta_map = rm.G_fixed;
  } else {
    rm.G_fixed = unit_ball_zonotope(nx, m, BallApproximation::inner);
    rm.G_template = lqr.R * rm.G_fixed;
    rm.beta_map = MatrixXd::Identity(m, m);
  }
  const Index n_beta = rm.beta_map.rows();
  const Index mu = problem.m_u == 0 ? n_beta : problem.m_u;
  // U_i acts on the leading m_u entries of the controller parameter
  const MatrixXd S = rm.beta_map.topRows(mu);

  DecisionLayout& L = rm.layout;
  L.nx = nx;
  L.ns = ellipsoid ? nx : m;
  L.nu = nu;
  L.mb = mu;
  L.N = N;
  const Index nt = L.size();

  // disturbance: Taylor terms of the convolution with exp(A s), boxed per term
  const double rho = sys.A.cwiseAbs().rowwise().sum().maxCoeff() * dt;
  const double tail = taylor_remainder(sys.A, dt, problem.eta);
  const MatrixXd EG = sys.E * problem.GW;
  const double rem = EG.size() == 0 ? 0.0 : dt * tail * EG.cwiseAbs().rowwise().sum().maxCoeff();
  const Index per_step = nw == 0 ? 0 : problem.GW.cols() * (problem.eta + 1) * nx;
  MatrixXd axis_step = MatrixXd::Zero(nx, per_step);
  {
    MatrixXd Aj = MatrixXd::Identity(nx, nx);
    double coef = dt;
    Index col = 0;
    for (int j = 0; j <= problem.eta; ++j) {
      MatrixXd T = Aj * EG * coef;
      for (Index l = 0; l < EG.cols(); ++l)
        for (Index r = 0; r < nx; ++r) axis_step(r, col++) = std::abs(T(r, l));
      Aj = Aj * sys.A;
      coef *= dt / (j + 2);
    }
    // the remainder rides on the first term's axis generators
    if (per_step > 0)
      for (Index r = 0; r < nx; ++r) axis_step(r, r) += rem;
  }
  rm.disturbance_box = per_step > 0 ? VectorXd(axis_step.rowwise().sum()) : VectorXd::Zero(nx);
  rm.interval_bloat = interval_factor(rho, dt);
  MatrixXd box_step = nonzero_columns(MatrixXd(rm.disturbance_box.asDiagonal()));

  // initial set: the template zonotope
  AffineZonotope x;
  x.center = AffineMatrix(nx, 1, nt);
  for (Index r = 0; r < nx; ++r) x.center.jacobian(r, L.c_T() + r) = 1.0;
  const Index mr = rm.G_fixed.cols();
  x.generators = AffineMatrix(nx, mr, nt);
  for (Index c = 0; c < mr; ++c)
    for (Index r = 0; r < nx; ++r) {
      if (ellipsoid) {
        // (R Diag(s) G_fixed)(r,c)
        for (Index j = 0; j < nx; ++j) x.generators.jacobian(r + c * nx, L.s() + j) = lqr.R(r, j) * rm.G_fixed(j, c);
      } else {
        x.generators.jacobian(r + c * nx, L.s() + c) = rm.G_template(r, c);
      }
    }
  x.fixed = MatrixXd::Zero(nx, 0);

  const MatrixXd AK = sys.A + sys.B * lqr.K;
  MatrixXd terminal = MatrixXd::Zero(nx, 0);
  for (int i = 0; i < N; ++i) {
    rm.states.push_back(x);

    // U_i S beta, as generators over the reach parameter
    AffineMatrix US(nu, mr, nt);
    for (Index c = 0; c < mr; ++c)
      for (Index j = 0; j < mu; ++j)
        for (Index k = 0; k < nu; ++k) US.jacobian(k + c * nu, L.U(i) + j * nu + k) += S(j, c);
    AffineMatrix cu(nu, 1, nt);
    for (Index k = 0; k < nu; ++k) cu.jacobian(k, L.c_u(i) + k) = 1.0;

    AffineZonotope u;
    u.center = x.center.left_multiply(lqr.K);
    u.center += cu;
    u.generators = x.generators.left_multiply(lqr.K);
    u.generators += US;
    u.fixed = lqr.K * x.fixed;
    rm.inputs.push_back(u);

    AffineZonotope y;
    y.center = x.center.left_multiply(AK);
    y.center += cu.left_multiply(sys.B);
    y.center.constant += sys.chi;
    y.generators = x.generators.left_multiply(AK);
    y.generators += US.left_multiply(sys.B);
    y.fixed = AK * x.fixed;
    rm.rates.push_back(y);

    AffineZonotope next;
    next.center = x.center.left_multiply(rm.Phi);
    next.center += cu.left_multiply(rm.Bd);
    next.center.constant += rm.Gamma * sys.chi;
    next.generators = x.generators.left_multiply(rm.Phi);
    next.generators += US.left_multiply(rm.Bd);
    next.fixed = hstack(rm.Phi * x.fixed, box_step);
    terminal = hstack(rm.Phi * terminal, axis_step);
    x = std::move(next);
  }
  rm.states.push_back(x);
  rm.terminal_disturbance = terminal;
  return rm;
}

}  // namespace ellipsotope
