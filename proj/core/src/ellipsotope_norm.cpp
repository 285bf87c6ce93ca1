#include <cmath>
#include <stdexcept>

#include "ellipsotope/conic/solver.hpp"
#include "ellipsotope/norms.hpp"
#include "ellipsotope/sets.hpp"

namespace ellipsotope {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {
enum class Method { zero, pinv, square, conic };

// minimise ||b0 + N z||_p over z by damped Newton; returns the minimiser
VectorXd newton_null_space(const VectorXd& b0, const MatrixXd& N, double p) {
  const double scale = b0.cwiseAbs().maxCoeff();
  if (scale == 0.0) return b0;
  const VectorXd b = b0 / scale;
  auto f = [&](const VectorXd& beta) { return beta.cwiseAbs().array().pow(p).sum(); };
  VectorXd z = VectorXd::Zero(N.cols());
  VectorXd beta = b;
  double fv = f(beta);
  for (int it = 0; it < 60; ++it) {
    const Eigen::ArrayXd a = beta.cwiseAbs().array();
    const VectorXd grad = N.transpose() * (p * beta.array().sign() * a.pow(p - 1.0)).matrix();
    Eigen::ArrayXd h = p * (p - 1.0) * a.pow(p - 2.0);
    const double hmax = h.isFinite().select(h, 0.0).maxCoeff();
    h = h.isFinite().select(h, 1e12 * std::max(hmax, 1.0)).max(1e-12 * std::max(hmax, 1e-300));
    const MatrixXd hess = N.transpose() * h.matrix().asDiagonal() * N;
    const VectorXd step = hess.ldlt().solve(-grad);
    const double dec = -grad.dot(step);
    if (!(dec > 1e-30 * std::max(fv, 1e-300))) break;
    double t = 1.0;
    while (t > 1e-12) {
      VectorXd cand = b + N * (z + t * step);
      double fc = f(cand);
      if (fc <= fv - 0.25 * t * dec) {
        z += t * step;
        beta = cand;
        fv = fc;
        break;
      }
      t *= 0.5;
    }
    if (t <= 1e-12) break;
  }
  return scale * beta;
}
}

struct EllipsotopeNorm::Impl {
  Exponent p;
  double rel_tol;
  Index n = 0, m = 0;
  RankReport rank;
  Method method = Method::conic;
  MatrixXd G;
  MatrixXd Gp;    // projector * G, full row rank
  MatrixXd pinv;  // minimum-norm solution operator for the p = 2 case
  Eigen::PartialPivLU<MatrixXd> lu;
  MatrixXd null_basis;  // for the Newton path
  conic::ConeProgram program;
  conic::Lowering lowering;
  std::vector<Index> eq_rows;
};

namespace {

// accepted only when the primal value and a feasible dual agree to 1e-10
struct NewtonData {
  const Exponent& p;
  const MatrixXd& Gp;
  const MatrixXd& pinv;
  const MatrixXd& null_basis;
};

bool try_newton(const NewtonData& s, const VectorXd& y, EllipsotopeNorm::Value& out, VectorXd& u) {
  VectorXd beta = newton_null_space(s.pinv * y, s.null_basis, s.p.value());
  const double primal = vector_norm(beta, s.p);
  if (!std::isfinite(primal)) return false;
  if (primal == 0.0) {
    out.coefficients = VectorXd::Zero(s.Gp.cols());
    out.norm = 0.0;
    u = VectorXd::Zero(y.size());
    return true;
  }
  VectorXd cand = s.pinv.transpose() * dual_vector(beta, s.p);
  const double den = vector_norm(s.Gp.transpose() * cand, s.p.conjugate());
  if (!(den > 0.0)) return false;
  const double lower = cand.dot(y) / den;
  if (primal - lower > 1e-10 * primal) return false;
  // restore exact feasibility of the coefficients
  beta += s.pinv * (y - s.Gp * beta);
  out.coefficients = beta;
  out.norm = vector_norm(beta, s.p);
  u = cand / den;
  return true;
}

}  // namespace

EllipsotopeNorm::EllipsotopeNorm(const MatrixXd& G, const Exponent& p, double rel_tol) : impl_(std::make_unique<Impl>()) {
  if (G.size() == 0) throw std::invalid_argument("EllipsotopeNorm: generator matrix must be nonempty.");
  Impl& s = *impl_;
  s.p = p;
  s.rel_tol = rel_tol;
  s.n = G.rows();
  s.m = G.cols();
  s.G = G;
  s.rank = rank_and_projection(G, rel_tol);
  const Index k = s.rank.rank;
  s.Gp = s.rank.projector * G;
  if (k == 0) {
    s.method = Method::zero;
  } else if (p.is_two()) {
    s.method = Method::pinv;
    Eigen::JacobiSVD<MatrixXd> svd(s.Gp, Eigen::ComputeThinU | Eigen::ComputeThinV);
    VectorXd inv = svd.singularValues().cwiseInverse();
    s.pinv = svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
  } else if (k == s.m) {
    s.method = Method::square;
    s.lu = Eigen::PartialPivLU<MatrixXd>(s.Gp);
  } else {
    s.method = Method::conic;
    {
      Eigen::JacobiSVD<MatrixXd> svd(s.Gp, Eigen::ComputeThinU | Eigen::ComputeThinV);
      VectorXd inv = svd.singularValues().cwiseInverse();
      s.pinv = svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
      Eigen::JacobiSVD<MatrixXd> full(s.Gp, Eigen::ComputeFullV);
      s.null_basis = full.matrixV().rightCols(s.m - k);
    }
    auto a = s.program.add_variable("a", s.m);
    auto t = s.program.add_variable("t");
    s.program.minimize(t(0));
    std::vector<conic::LinExpr> v;
    for (Index j = 0; j < s.m; ++j) v.push_back(a(j));
    s.program.add_pnorm(t(0), v, p);
    std::vector<Index> cons;
    for (Index i = 0; i < k; ++i) {
      conic::LinExpr e;
      for (Index j = 0; j < s.m; ++j)
        if (s.Gp(i, j) != 0.0) e.add_term(a.index(j), s.Gp(i, j));
      cons.push_back(s.program.add_equality(e));
    }
    s.lowering = conic::lower(s.program);
    for (Index c : cons) s.eq_rows.push_back(s.lowering.slots[static_cast<size_t>(c)].start);
  }
}

EllipsotopeNorm::~EllipsotopeNorm() = default;
EllipsotopeNorm::EllipsotopeNorm(EllipsotopeNorm&&) noexcept = default;
EllipsotopeNorm& EllipsotopeNorm::operator=(EllipsotopeNorm&&) noexcept = default;

const RankReport& EllipsotopeNorm::rank_report() const { return impl_->rank; }

bool EllipsotopeNorm::in_range(const VectorXd& x) const {
  const Impl& s = *impl_;
  if (x.size() != s.n) throw std::invalid_argument("EllipsotopeNorm: inconsistent dimensions.");
  VectorXd proj = s.rank.projector.transpose() * (s.rank.projector * x);
  return (proj - x).norm() <= s.rel_tol * (1.0 + x.norm());
}

std::optional<double> EllipsotopeNorm::operator()(const VectorXd& x) const {
  auto v = evaluate(x);
  if (!v) return std::nullopt;
  return v->norm;
}

std::optional<EllipsotopeNorm::Value> EllipsotopeNorm::evaluate(const VectorXd& x) const {
  if (!in_range(x)) return std::nullopt;
  const Impl& s = *impl_;
  const Exponent pd = s.p.conjugate();
  Value out;
  if (s.method == Method::zero) {
    out.coefficients = VectorXd::Zero(s.m);
    out.dual = VectorXd::Zero(s.n);
    return out;
  }
  const VectorXd y = s.rank.projector * x;
  VectorXd u;  // dual in projected coordinates
  if (s.method == Method::pinv) {
    out.coefficients = s.pinv * y;
    out.norm = out.coefficients.norm();
    u = s.pinv.transpose() * dual_vector(out.coefficients, s.p);
  } else if (s.method == Method::square) {
    out.coefficients = s.lu.solve(y);
    out.norm = vector_norm(out.coefficients, s.p);
    u = s.lu.transpose().solve(VectorXd(dual_vector(out.coefficients, s.p)));
  } else if (!s.p.is_one() && !s.p.is_infinite() && try_newton({s.p, s.Gp, s.pinv, s.null_basis}, y, out, u)) {
  } else {
    conic::Lowering lw = s.lowering;
    for (size_t i = 0; i < s.eq_rows.size(); ++i) lw.form.b(s.eq_rows[i]) = y(static_cast<Index>(i));
    conic::Solution sol = conic::solve(s.program, lw);
    if (sol.status != conic::SolveStatus::optimal) {
      conic::SolverSettings loose;
      loose.feas_tol = loose.gap_tol = 1e-6;
      sol = conic::solve(s.program, lw, loose);
      if (sol.status != conic::SolveStatus::optimal)
        throw std::runtime_error("EllipsotopeNorm: solver failed (" + conic::to_string(sol.status) + ").");
    }
    out.coefficients = sol.x.head(s.m);
    out.norm = vector_norm(out.coefficients, s.p);
    u.resize(static_cast<Index>(s.eq_rows.size()));
    // equality multipliers live in consecutive constraint slots after the norm cone
    for (size_t i = 0; i < s.eq_rows.size(); ++i) u(static_cast<Index>(i)) = -sol.duals[i + 1](0);
  }
  out.dual = s.rank.projector.transpose() * u;
  const double scale = vector_norm(s.G.transpose() * out.dual, pd);
  if (scale > 1.0) out.dual /= scale;
  return out;
}

}  // namespace ellipsotope
