#include <cmath>
#include <limits>
#include <numbers>

#include "cones.hpp"

namespace ellipsotope::conic {

Index svec_size(Index order) { return order * (order + 1) / 2; }

Index ConeDims::size() const {
  Index total = nonneg;
  for (Index k : soc) total += k;
  for (Index k : psd) total += svec_size(k);
  return total;
}

Index ConeDims::degree() const {
  Index total = nonneg + static_cast<Index>(soc.size());
  for (Index k : psd) total += k;
  return total;
}

}  // namespace ellipsotope::conic

namespace ellipsotope::conic::detail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double soc_det(const Eigen::Ref<const VectorXd>& x) {
  double t = x(0);
  double r = x.tail(x.size() - 1).norm();
  return (t - r) * (t + r);
}

}  // namespace

BlockOffsets block_offsets(const ConeDims& dims) {
  BlockOffsets off;
  Index pos = dims.nonneg;
  for (Index k : dims.soc) {
    off.soc.push_back(pos);
    pos += k;
  }
  for (Index k : dims.psd) {
    off.psd.push_back(pos);
    pos += svec_size(k);
  }
  return off;
}

MatrixXd smat(const Eigen::Ref<const VectorXd>& v, Index order) {
  MatrixXd M(order, order);
  Index pos = 0;
  for (Index j = 0; j < order; ++j) {
    M(j, j) = v(pos++);
    for (Index i = j + 1; i < order; ++i) {
      M(i, j) = M(j, i) = v(pos++) / std::numbers::sqrt2;
    }
  }
  return M;
}

VectorXd svec(const MatrixXd& M) {
  const Index k = M.rows();
  VectorXd v(svec_size(k));
  Index pos = 0;
  for (Index j = 0; j < k; ++j) {
    v(pos++) = M(j, j);
    for (Index i = j + 1; i < k; ++i) v(pos++) = std::numbers::sqrt2 * 0.5 * (M(i, j) + M(j, i));
  }
  return v;
}

Scaling identity_scaling(const ConeDims& dims) {
  Scaling sc;
  sc.d = VectorXd::Ones(dims.nonneg);
  for (Index k : dims.soc) {
    sc.soc_w.push_back(MatrixXd::Identity(k, k));
    sc.soc_winv.push_back(MatrixXd::Identity(k, k));
  }
  for (Index k : dims.psd) {
    sc.psd_r.push_back(MatrixXd::Identity(k, k));
    sc.psd_rinv.push_back(MatrixXd::Identity(k, k));
  }
  sc.lambda = identity_element(dims);
  return sc;
}

bool compute_scaling(const ConeDims& dims, const VectorXd& s, const VectorXd& z, Scaling& sc) {
  const BlockOffsets off = block_offsets(dims);
  sc.lambda.resize(s.size());
  sc.d.resize(dims.nonneg);
  for (Index i = 0; i < dims.nonneg; ++i) {
    if (!(s(i) > 0) || !(z(i) > 0)) return false;
    sc.d(i) = std::sqrt(s(i) / z(i));
    sc.lambda(i) = std::sqrt(s(i) * z(i));
  }
  sc.soc_w.resize(dims.soc.size());
  sc.soc_winv.resize(dims.soc.size());
  for (size_t b = 0; b < dims.soc.size(); ++b) {
    const Index k = dims.soc[b], o = off.soc[b];
    VectorXd sb = s.segment(o, k), zb = z.segment(o, k);
    double sd = soc_det(sb), zd = soc_det(zb);
    if (!(sd > 0) || !(zd > 0) || sb(0) <= 0 || zb(0) <= 0) return false;
    double sn = std::sqrt(sd), zn = std::sqrt(zd);
    VectorXd sbar = sb / sn, zbar = zb / zn;
    double gamma = std::sqrt(0.5 * (1.0 + sbar.dot(zbar)));
    VectorXd wbar(k);
    wbar(0) = (sbar(0) + zbar(0)) / (2.0 * gamma);
    wbar.tail(k - 1) = (sbar.tail(k - 1) - zbar.tail(k - 1)) / (2.0 * gamma);
    double eta = std::sqrt(sn / zn);
    MatrixXd W(k, k), Wi(k, k);
    W(0, 0) = wbar(0);
    Wi(0, 0) = wbar(0);
    if (k > 1) {
      VectorXd w1 = wbar.tail(k - 1);
      W.block(0, 1, 1, k - 1) = w1.transpose();
      W.block(1, 0, k - 1, 1) = w1;
      W.block(1, 1, k - 1, k - 1) = MatrixXd::Identity(k - 1, k - 1) + w1 * w1.transpose() / (1.0 + wbar(0));
      Wi.block(0, 1, 1, k - 1) = -w1.transpose();
      Wi.block(1, 0, k - 1, 1) = -w1;
      Wi.block(1, 1, k - 1, k - 1) = W.block(1, 1, k - 1, k - 1);
    }
    sc.soc_w[b] = eta * W;
    sc.soc_winv[b] = Wi / eta;
    sc.lambda.segment(o, k) = sc.soc_w[b] * zb;
  }
  sc.psd_r.resize(dims.psd.size());
  sc.psd_rinv.resize(dims.psd.size());
  for (size_t b = 0; b < dims.psd.size(); ++b) {
    const Index k = dims.psd[b], o = off.psd[b], len = svec_size(k);
    MatrixXd S = smat(s.segment(o, len), k), Z = smat(z.segment(o, len), k);
    Eigen::LLT<MatrixXd> ls(S), lz(Z);
    if (ls.info() != Eigen::Success || lz.info() != Eigen::Success) return false;
    MatrixXd Ls = ls.matrixL(), Lz = lz.matrixL();
    Eigen::JacobiSVD<MatrixXd> svd(Lz.transpose() * Ls, Eigen::ComputeFullU | Eigen::ComputeFullV);
    VectorXd lam = svd.singularValues();
    if (!(lam.minCoeff() > 0)) return false;
    VectorXd isq = lam.cwiseSqrt().cwiseInverse();
    MatrixXd R = Ls * svd.matrixV() * isq.asDiagonal();
    MatrixXd Rinv = lam.cwiseSqrt().asDiagonal() * svd.matrixV().transpose() *
                    Ls.triangularView<Eigen::Lower>().solve(MatrixXd::Identity(k, k));
    sc.psd_r[b] = R;
    sc.psd_rinv[b] = Rinv;
    sc.lambda.segment(o, len) = svec(MatrixXd(lam.asDiagonal()));
  }
  return true;
}

VectorXd apply_w(const ConeDims& dims, const Scaling& sc, const VectorXd& v, WOp op) {
  const BlockOffsets off = block_offsets(dims);
  VectorXd out(v.size());
  const bool inverse = op == WOp::winv || op == WOp::winvt;
  if (inverse)
    out.head(dims.nonneg) = v.head(dims.nonneg).cwiseQuotient(sc.d);
  else
    out.head(dims.nonneg) = v.head(dims.nonneg).cwiseProduct(sc.d);
  for (size_t b = 0; b < dims.soc.size(); ++b) {
    const Index k = dims.soc[b], o = off.soc[b];
    out.segment(o, k) = (inverse ? sc.soc_winv[b] : sc.soc_w[b]) * v.segment(o, k);
  }
  for (size_t b = 0; b < dims.psd.size(); ++b) {
    const Index k = dims.psd[b], o = off.psd[b], len = svec_size(k);
    MatrixXd V = smat(v.segment(o, len), k);
    MatrixXd M;
    switch (op) {
      case WOp::w: M = sc.psd_r[b].transpose() * V * sc.psd_r[b]; break;
      case WOp::wt: M = sc.psd_r[b] * V * sc.psd_r[b].transpose(); break;
      case WOp::winv: M = sc.psd_rinv[b].transpose() * V * sc.psd_rinv[b]; break;
      case WOp::winvt: M = sc.psd_rinv[b] * V * sc.psd_rinv[b].transpose(); break;
    }
    out.segment(o, len) = svec(M);
  }
  return out;
}

std::vector<MatrixXd> wtw_blocks(const ConeDims& dims, const Scaling& sc) {
  std::vector<MatrixXd> blocks;
  for (size_t b = 0; b < dims.soc.size(); ++b) blocks.push_back(sc.soc_w[b] * sc.soc_w[b]);
  for (size_t b = 0; b < dims.psd.size(); ++b) {
    const Index k = dims.psd[b], len = svec_size(k);
    MatrixXd RRt = sc.psd_r[b] * sc.psd_r[b].transpose();
    MatrixXd M(len, len);
    for (Index j = 0; j < len; ++j) {
      MatrixXd E = smat(VectorXd::Unit(len, j), k);
      M.col(j) = svec(RRt * E * RRt);
    }
    blocks.push_back(M);
  }
  return blocks;
}

VectorXd apply_wtw(const ConeDims& dims, const Scaling& sc, const VectorXd& v) {
  return apply_w(dims, sc, apply_w(dims, sc, v, WOp::w), WOp::wt);
}

VectorXd jordan_product(const ConeDims& dims, const VectorXd& u, const VectorXd& v) {
  const BlockOffsets off = block_offsets(dims);
  VectorXd out(u.size());
  out.head(dims.nonneg) = u.head(dims.nonneg).cwiseProduct(v.head(dims.nonneg));
  for (size_t b = 0; b < dims.soc.size(); ++b) {
    const Index k = dims.soc[b], o = off.soc[b];
    out(o) = u.segment(o, k).dot(v.segment(o, k));
    if (k > 1) out.segment(o + 1, k - 1) = u(o) * v.segment(o + 1, k - 1) + v(o) * u.segment(o + 1, k - 1);
  }
  for (size_t b = 0; b < dims.psd.size(); ++b) {
    const Index k = dims.psd[b], o = off.psd[b], len = svec_size(k);
    MatrixXd U = smat(u.segment(o, len), k), V = smat(v.segment(o, len), k);
    out.segment(o, len) = svec(0.5 * (U * V + V * U));
  }
  return out;
}

VectorXd jordan_divide(const ConeDims& dims, const VectorXd& lambda, const VectorXd& v) {
  const BlockOffsets off = block_offsets(dims);
  VectorXd out(v.size());
  out.head(dims.nonneg) = v.head(dims.nonneg).cwiseQuotient(lambda.head(dims.nonneg));
  for (size_t b = 0; b < dims.soc.size(); ++b) {
    const Index k = dims.soc[b], o = off.soc[b];
    double l0 = lambda(o);
    double det = soc_det(lambda.segment(o, k));
    double u0 = l0 * v(o);
    if (k > 1) u0 -= lambda.segment(o + 1, k - 1).dot(v.segment(o + 1, k - 1));
    u0 /= det;
    out(o) = u0;
    if (k > 1) out.segment(o + 1, k - 1) = (v.segment(o + 1, k - 1) - u0 * lambda.segment(o + 1, k - 1)) / l0;
  }
  for (size_t b = 0; b < dims.psd.size(); ++b) {
    const Index k = dims.psd[b], o = off.psd[b];
    // lambda is diagonal here: entry (i,j) scales by (l_i + l_j)/2
    VectorXd diag(k);
    Index pos = o;
    for (Index j = 0; j < k; ++j) {
      diag(j) = lambda(pos);
      pos += k - j;
    }
    pos = o;
    for (Index j = 0; j < k; ++j)
      for (Index i = j; i < k; ++i, ++pos) out(pos) = v(pos) / (0.5 * (diag(i) + diag(j)));
  }
  return out;
}

VectorXd identity_element(const ConeDims& dims) {
  const BlockOffsets off = block_offsets(dims);
  VectorXd e = VectorXd::Zero(dims.size());
  e.head(dims.nonneg).setOnes();
  for (size_t b = 0; b < dims.soc.size(); ++b) e(off.soc[b]) = 1.0;
  for (size_t b = 0; b < dims.psd.size(); ++b) {
    Index pos = off.psd[b];
    const Index k = dims.psd[b];
    for (Index j = 0; j < k; ++j) {
      e(pos) = 1.0;
      pos += k - j;
    }
  }
  return e;
}

double min_eigenvalue(const ConeDims& dims, const VectorXd& x) {
  const BlockOffsets off = block_offsets(dims);
  double t = kInf;
  if (dims.nonneg > 0) t = x.head(dims.nonneg).minCoeff();
  for (size_t b = 0; b < dims.soc.size(); ++b) {
    const Index k = dims.soc[b], o = off.soc[b];
    double r = k > 1 ? x.segment(o + 1, k - 1).norm() : 0.0;
    t = std::min(t, x(o) - r);
  }
  for (size_t b = 0; b < dims.psd.size(); ++b) {
    const Index k = dims.psd[b], o = off.psd[b];
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(smat(x.segment(o, svec_size(k)), k), Eigen::EigenvaluesOnly);
    t = std::min(t, es.eigenvalues()(0));
  }
  return t;
}

double max_step(const ConeDims& dims, const VectorXd& x, const VectorXd& dx) {
  const BlockOffsets off = block_offsets(dims);
  double alpha = kInf;
  for (Index i = 0; i < dims.nonneg; ++i)
    if (dx(i) < 0) alpha = std::min(alpha, -x(i) / dx(i));
  for (size_t b = 0; b < dims.soc.size(); ++b) {
    const Index k = dims.soc[b], o = off.soc[b];
    const double x0 = x(o), d0 = dx(o);
    double a = d0 * d0, bb = x0 * d0, c = soc_det(x.segment(o, k));
    if (k > 1) {
      auto x1 = x.segment(o + 1, k - 1);
      auto d1 = dx.segment(o + 1, k - 1);
      a -= d1.squaredNorm();
      bb -= x1.dot(d1);
    }
    bb *= 2.0;
    // smallest positive root of a t^2 + bb t + c with c > 0
    double root = kInf;
    if (std::abs(a) < 1e-300) {
      if (bb < 0) root = -c / bb;
    } else {
      double disc = bb * bb - 4.0 * a * c;
      if (disc >= 0) {
        double sq = std::sqrt(disc);
        double qv = -0.5 * (bb + (bb >= 0 ? sq : -sq));
        double r1 = qv / a, r2 = qv != 0 ? c / qv : kInf;
        if (r1 > 0) root = std::min(root, r1);
        if (r2 > 0) root = std::min(root, r2);
      }
    }
    if (d0 < 0) root = std::min(root, -x0 / d0);
    alpha = std::min(alpha, root);
  }
  for (size_t b = 0; b < dims.psd.size(); ++b) {
    const Index k = dims.psd[b], o = off.psd[b], len = svec_size(k);
    Eigen::LLT<MatrixXd> llt(smat(x.segment(o, len), k));
    if (llt.info() != Eigen::Success) return 0.0;
    MatrixXd L = llt.matrixL();
    MatrixXd D = smat(dx.segment(o, len), k);
    MatrixXd M = L.triangularView<Eigen::Lower>().solve(D);
    M = L.triangularView<Eigen::Lower>().solve(M.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (M + M.transpose()), Eigen::EigenvaluesOnly);
    double lmin = es.eigenvalues()(0);
    if (lmin < 0) alpha = std::min(alpha, -1.0 / lmin);
  }
  return alpha;
}

}  // namespace ellipsotope::conic::detail
