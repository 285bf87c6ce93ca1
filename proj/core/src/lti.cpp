#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>
#include <unsupported/Eigen/MatrixFunctions>

#include "ellipsotope/safeset.hpp"

namespace ellipsotope {

using Eigen::MatrixXd;
using Eigen::VectorXd;

LtiSystem::LtiSystem(MatrixXd A_, MatrixXd B_, MatrixXd E_, VectorXd chi_)
    : A(std::move(A_)), B(std::move(B_)), E(std::move(E_)), chi(std::move(chi_)) {
  const Index n = A.rows();
  if (A.cols() != n || n == 0) throw std::invalid_argument("LtiSystem: A must be square and nonempty.");
  if (B.rows() != n) throw std::invalid_argument("LtiSystem: B has the wrong number of rows.");
  if (E.rows() != n && E.size() != 0) throw std::invalid_argument("LtiSystem: E has the wrong number of rows.");
  if (E.size() == 0) E = MatrixXd::Zero(n, 0);
  if (chi.size() == 0) chi = VectorXd::Zero(n);
  if (chi.size() != n) throw std::invalid_argument("LtiSystem: chi has the wrong size.");
  if (!A.allFinite() || !B.allFinite() || !E.allFinite() || !chi.allFinite())
    throw std::invalid_argument("LtiSystem: non-finite entries.");
}

Discretization zero_order_hold(const LtiSystem& sys, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("zero_order_hold: dt must be positive.");
  const Index n = sys.nx();
  MatrixXd M = MatrixXd::Zero(2 * n, 2 * n);
  M.topLeftCorner(n, n) = sys.A * dt;
  M.topRightCorner(n, n) = MatrixXd::Identity(n, n) * dt;
  MatrixXd expM = M.exp();
  Discretization d;
  d.Ad = expM.topLeftCorner(n, n);
  d.Gamma = expM.topRightCorner(n, n);
  d.Bd = d.Gamma * sys.B;
  return d;
}

namespace {

double dare_residual(const MatrixXd& A, const MatrixXd& B, const MatrixXd& Q, const MatrixXd& Rw, const MatrixXd& P) {
  MatrixXd BtPA = B.transpose() * P * A;
  MatrixXd S = Rw + B.transpose() * P * B;
  MatrixXd res = A.transpose() * P * A - BtPA.transpose() * S.ldlt().solve(BtPA) + Q - P;
  return res.norm() / std::max(1.0, P.norm());
}

}  // namespace

LqrResult lqr_gain(const LtiSystem& sys, const MatrixXd& Q_in, const MatrixXd& Rw_in, double dt) {
  const Index n = sys.nx(), nu = sys.nu();
  MatrixXd Q = Q_in.size() == 0 ? MatrixXd::Identity(n, n) : Q_in;
  MatrixXd Rw = Rw_in.size() == 0 ? MatrixXd::Identity(nu, nu) : Rw_in;
  if (Q.rows() != n || Q.cols() != n) throw std::invalid_argument("lqr_gain: Q must be n_x by n_x.");
  if (Rw.rows() != nu || Rw.cols() != nu) throw std::invalid_argument("lqr_gain: Rw must be n_u by n_u.");
  Q = 0.5 * (Q + Q.transpose());
  Rw = 0.5 * (Rw + Rw.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> eq(Q), er(Rw);
  if (eq.eigenvalues().minCoeff() < -1e-12 * std::max(1.0, Q.norm()))
    throw std::invalid_argument("lqr_gain: Q must be positive semidefinite.");
  if (er.eigenvalues().minCoeff() <= 0.0) throw std::invalid_argument("lqr_gain: Rw must be positive definite.");

  Discretization d = zero_order_hold(sys, dt);
  const MatrixXd I = MatrixXd::Identity(n, n);

  // structure-preserving doubling
  MatrixXd Ak = d.Ad;
  MatrixXd Gk = d.Bd * Rw.ldlt().solve(d.Bd.transpose());
  MatrixXd Hk = Q;
  bool converged = false;
  for (int it = 0; it < 200; ++it) {
    Eigen::PartialPivLU<MatrixXd> W(I + Gk * Hk);
    MatrixXd WA = W.solve(Ak);
    MatrixXd WG = W.solve(Gk);
    MatrixXd Hn = Hk + Ak.transpose() * Hk * WA;
    MatrixXd Gn = Gk + Ak * WG * Ak.transpose();
    MatrixXd An = Ak * WA;
    double change = (Hn - Hk).norm();
    Hk = 0.5 * (Hn + Hn.transpose());
    Gk = 0.5 * (Gn + Gn.transpose());
    Ak = An;
    if (!Hk.allFinite()) break;
    if (change <= 1e-14 * std::max(1.0, Hk.norm())) {
      converged = true;
      break;
    }
  }
  if (!converged) throw std::runtime_error("lqr_gain: Riccati iteration did not converge.");

  LqrResult r;
  r.P = Hk;
  // a few fixed-point sweeps polish the last digits
  for (int it = 0; it < 3; ++it) {
    MatrixXd BtPA = d.Bd.transpose() * r.P * d.Ad;
    MatrixXd S = Rw + d.Bd.transpose() * r.P * d.Bd;
    MatrixXd Pn = d.Ad.transpose() * r.P * d.Ad - BtPA.transpose() * S.ldlt().solve(BtPA) + Q;
    Pn = 0.5 * (Pn + Pn.transpose());
    if (dare_residual(d.Ad, d.Bd, Q, Rw, Pn) > dare_residual(d.Ad, d.Bd, Q, Rw, r.P)) break;
    r.P = Pn;
  }
  r.residual = dare_residual(d.Ad, d.Bd, Q, Rw, r.P);

  MatrixXd S = Rw + d.Bd.transpose() * r.P * d.Bd;
  r.K = -S.ldlt().solve(d.Bd.transpose() * r.P * d.Ad);
  r.spectral_radius = (d.Ad + d.Bd * r.K).eigenvalues().cwiseAbs().maxCoeff();
  if (!(r.spectral_radius < 1.0)) throw std::runtime_error("lqr_gain: closed loop is not stable.");

  Eigen::SelfAdjointEigenSolver<MatrixXd> ep(r.P);
  if (ep.eigenvalues().minCoeff() <= 0.0) throw std::runtime_error("lqr_gain: Riccati solution is not positive definite.");
  r.R = ep.operatorInverseSqrt();
  return r;
}

}  // namespace ellipsotope
