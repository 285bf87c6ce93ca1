#include "ellipsotope/norms.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "ellipsotope/rng.hpp"

namespace ellipsotope {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

double vector_norm(const Eigen::Ref<const VectorXd>& v, const Exponent& p) {
  if (v.size() == 0) return 0.0;
  switch (p.kind()) {
    case Exponent::Kind::one: return v.cwiseAbs().sum();
    case Exponent::Kind::infinity: return v.cwiseAbs().maxCoeff();
    default: break;
  }
  if (p.is_two()) return v.norm();
  // scale by the max entry to avoid overflow in |v|^p
  double scale = v.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  double pv = p.value();
  double acc = 0.0;
  for (Index i = 0; i < v.size(); ++i) acc += std::pow(std::abs(v(i)) / scale, pv);
  return scale * std::pow(acc, 1.0 / pv);
}

VectorXd dual_vector(const Eigen::Ref<const VectorXd>& y, const Exponent& p) {
  VectorXd u = VectorXd::Zero(y.size());
  double nrm = vector_norm(y, p);
  if (nrm == 0.0) return u;
  switch (p.kind()) {
    case Exponent::Kind::one:
      for (Index i = 0; i < y.size(); ++i) u(i) = (y(i) > 0) - (y(i) < 0);
      return u;
    case Exponent::Kind::infinity: {
      Index k = 0;
      y.cwiseAbs().maxCoeff(&k);
      u(k) = y(k) > 0 ? 1.0 : -1.0;
      return u;
    }
    default: break;
  }
  double pv = p.value();
  for (Index i = 0; i < y.size(); ++i) {
    double a = std::abs(y(i)) / nrm;
    u(i) = (y(i) > 0 ? 1.0 : -1.0) * std::pow(a, pv - 1.0);
    if (y(i) == 0.0) u(i) = 0.0;
  }
  return u;
}

double lpq_norm(const Eigen::Ref<const MatrixXd>& A, const Exponent& p, const Exponent& q, bool transposed) {
  const MatrixXd M = transposed ? MatrixXd(A.transpose()) : MatrixXd(A);
  VectorXd cols(M.cols());
  for (Index j = 0; j < M.cols(); ++j) cols(j) = vector_norm(M.col(j), p);
  return vector_norm(cols, q);
}

namespace {

OperatorNormEstimate enumerate_signs(const MatrixXd& A, const Exponent& q) {
  const Index m = A.cols();
  OperatorNormEstimate best;
  best.exact = true;
  best.witness = VectorXd::Ones(m);
  // Gray code walk: consecutive sign vectors differ in one entry
  VectorXd sigma = VectorXd::Ones(m);
  VectorXd sum = A.rowwise().sum();
  best.value = vector_norm(sum, q);
  const std::uint64_t total = std::uint64_t{1} << m;
  for (std::uint64_t k = 1; k < total; ++k) {
    int bit = __builtin_ctzll(k);
    sigma(bit) = -sigma(bit);
    sum += 2.0 * sigma(bit) * A.col(bit);
    double val = vector_norm(sum, q);
    if (val > best.value) {
      best.value = val;
      best.witness = sigma;
    }
  }
  return best;
}

// monotone ascent v <- argmax_{||v||_p<=1} <A^T dual_q(Av), v>
double ascend(const MatrixXd& A, const Exponent& p, const Exponent& q, VectorXd& v, int max_iterations) {
  const Exponent ps = p.conjugate();
  double value = vector_norm(A * v, q);
  for (int it = 0; it < max_iterations; ++it) {
    VectorXd g = A.transpose() * dual_vector(A * v, q);
    if (g.norm() == 0.0) break;
    VectorXd next = dual_vector(g, ps);
    double nv = vector_norm(A * next, q);
    if (nv <= value * (1.0 + 1e-15)) {
      if (nv > value) {
        value = nv;
        v = next;
      }
      break;
    }
    value = nv;
    v = next;
  }
  return value;
}

}  // namespace

OperatorNormEstimate operator_norm(const Eigen::Ref<const MatrixXd>& A_in, const Exponent& p, const Exponent& q,
                                   const OperatorNormOptions& options) {
  if (options.restarts < 1) throw std::invalid_argument("operator_norm: budget must be at least 1.");
  const MatrixXd A = A_in;
  const Index m = A.cols();
  OperatorNormEstimate out;
  out.witness = VectorXd::Zero(m);
  if (m == 0 || A.rows() == 0) {
    out.exact = true;
    return out;
  }
  if (p.is_one()) {
    // extreme points of the 1-ball are the signed unit vectors
    Index best = 0;
    for (Index j = 0; j < m; ++j) {
      double val = vector_norm(A.col(j), q);
      if (val > out.value) {
        out.value = val;
        best = j;
      }
    }
    out.witness(best) = 1.0;
    out.exact = true;
    return out;
  }
  if (q.is_infinite()) {
    // max over rows of the dual p*-norm
    const Exponent ps = p.conjugate();
    Index best = 0;
    for (Index i = 0; i < A.rows(); ++i) {
      double val = vector_norm(A.row(i).transpose(), ps);
      if (val > out.value) {
        out.value = val;
        best = i;
      }
    }
    out.witness = dual_vector(A.row(best).transpose(), ps);
    out.exact = true;
    return out;
  }
  if (p.is_two() && q.is_two()) {
    Eigen::JacobiSVD<MatrixXd> svd(A, Eigen::ComputeThinV);
    out.value = svd.singularValues()(0);
    out.witness = svd.matrixV().col(0);
    out.exact = true;
    return out;
  }
  if (p.is_infinite()) {
    if (m <= options.max_enumeration_columns) return enumerate_signs(A, q);
    if (options.require_exact)
      throw std::domain_error("operator_norm: oracle infeasible, too many columns for sign enumeration.");
  } else if (options.require_exact) {
    throw std::domain_error("operator_norm: no exact method for this exponent pair.");
  }

  CounterRng rng(options.seed);
  auto consider = [&](VectorXd v) {
    double nv = vector_norm(v, p);
    if (nv == 0.0) return;
    v /= nv;
    double val = ascend(A, p, q, v, options.max_iterations);
    if (val > out.value) {
      out.value = val;
      out.witness = v;
    }
  };
  for (Index j = 0; j < m; ++j) {
    consider(VectorXd::Unit(m, j));
    consider(-VectorXd::Unit(m, j));
  }
  {
    Eigen::JacobiSVD<MatrixXd> svd(A, Eigen::ComputeThinV);
    consider(svd.matrixV().col(0));
  }
  for (int r = 0; r < options.restarts; ++r) consider(rng.normal_vector(m));
  return out;
}

double matrix_norm(const Eigen::Ref<const MatrixXd>& A, const MatrixNormKind& kind, const OperatorNormOptions& options) {
  switch (kind.tag) {
    case MatrixNormKind::Tag::lpq: return lpq_norm(A, kind.p, kind.q, false);
    case MatrixNormKind::Tag::lpq_transposed: return lpq_norm(A, kind.p, kind.q, true);
    default: return operator_norm(A, kind.p, kind.q, options).value;
  }
}

double gaussian_moment(const Exponent& k) {
  if (k.is_infinite()) throw std::domain_error("gaussian_moment: undefined for k = inf.");
  const double kv = k.value();
  // log of 2^{k/2} Gamma((k+1)/2) / sqrt(pi), divided by k
  double logm = 0.5 * kv * std::numbers::ln2 + std::lgamma(0.5 * (kv + 1.0)) - 0.5 * std::log(std::numbers::pi);
  return std::exp(logm / kv);
}

}  // namespace ellipsotope
