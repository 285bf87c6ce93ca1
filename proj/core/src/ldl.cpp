#include "ldl.hpp"

#include <Eigen/OrderingMethods>
#include <algorithm>
#include <cmath>

namespace ellipsotope::conic::detail {

namespace {
constexpr double kPivotFloor = 1e-13;
constexpr double kPivotBump = 1e-7;
}  // namespace

void QuasidefiniteLdl::symbolic(const Sparse& U) {
  etree_.assign(static_cast<size_t>(n_), -1);
  lnz_.assign(static_cast<size_t>(n_), 0);
  std::vector<int> work(static_cast<size_t>(n_), -1);
  const int* Ap = U.outerIndexPtr();
  const int* Ai = U.innerIndexPtr();
  for (int j = 0; j < n_; ++j) {
    work[static_cast<size_t>(j)] = j;
    for (int p = Ap[j]; p < Ap[j + 1]; ++p) {
      int i = Ai[p];
      while (i < j && work[static_cast<size_t>(i)] != j) {
        if (etree_[static_cast<size_t>(i)] == -1) etree_[static_cast<size_t>(i)] = j;
        ++lnz_[static_cast<size_t>(i)];
        work[static_cast<size_t>(i)] = j;
        i = etree_[static_cast<size_t>(i)];
        if (i == -1) break;
      }
    }
  }
  lp_.assign(static_cast<size_t>(n_) + 1, 0);
  for (int i = 0; i < n_; ++i) lp_[static_cast<size_t>(i) + 1] = lp_[static_cast<size_t>(i)] + lnz_[static_cast<size_t>(i)];
  li_.assign(static_cast<size_t>(lp_.back()), 0);
  lx_.assign(static_cast<size_t>(lp_.back()), 0.0);
}

bool QuasidefiniteLdl::factor(const Sparse& lower, const std::vector<signed char>& signs) {
  n_ = static_cast<int>(lower.rows());
  if (!ordered_) {
    Eigen::AMDOrdering<int> amd;
    Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> pinv;
    amd(lower, pinv);
    perm_ = pinv.inverse();
    ordered_ = true;
  }
  Sparse U(n_, n_);
  U.selfadjointView<Eigen::Upper>() = lower.selfadjointView<Eigen::Lower>().twistedBy(perm_);
  U.makeCompressed();
  symbolic(U);

  std::vector<signed char> sg(static_cast<size_t>(n_));
  for (int i = 0; i < n_; ++i) sg[static_cast<size_t>(perm_.indices()(i))] = signs[static_cast<size_t>(i)];

  d_.assign(static_cast<size_t>(n_), 0.0);
  dinv_.assign(static_cast<size_t>(n_), 0.0);
  std::vector<double> y(static_cast<size_t>(n_), 0.0);
  std::vector<char> marked(static_cast<size_t>(n_), 0);
  std::vector<int> yidx(static_cast<size_t>(n_)), buf(static_cast<size_t>(n_)), next(lp_.begin(), lp_.end() - 1);
  const int* Ap = U.outerIndexPtr();
  const int* Ai = U.innerIndexPtr();
  const double* Ax = U.valuePtr();
  bumped_ = 0;
  for (int k = 0; k < n_; ++k) {
    int nnz_y = 0;
    double dk = 0.0;
    for (int p = Ap[k]; p < Ap[k + 1]; ++p) {
      int b = Ai[p];
      if (b == k) {
        dk = Ax[p];
        continue;
      }
      y[static_cast<size_t>(b)] = Ax[p];
      if (marked[static_cast<size_t>(b)]) continue;
      int ne = 0;
      int nx = b;
      while (nx != -1 && nx < k && !marked[static_cast<size_t>(nx)]) {
        marked[static_cast<size_t>(nx)] = 1;
        buf[static_cast<size_t>(ne++)] = nx;
        nx = etree_[static_cast<size_t>(nx)];
      }
      while (ne > 0) yidx[static_cast<size_t>(nnz_y++)] = buf[static_cast<size_t>(--ne)];
    }
    for (int i = nnz_y - 1; i >= 0; --i) {
      const int c = yidx[static_cast<size_t>(i)];
      const double yc = y[static_cast<size_t>(c)];
      const int end = next[static_cast<size_t>(c)];
      for (int j = lp_[static_cast<size_t>(c)]; j < end; ++j) y[static_cast<size_t>(li_[static_cast<size_t>(j)])] -= lx_[static_cast<size_t>(j)] * yc;
      li_[static_cast<size_t>(end)] = k;
      const double l = yc * dinv_[static_cast<size_t>(c)];
      lx_[static_cast<size_t>(end)] = l;
      dk -= yc * l;
      ++next[static_cast<size_t>(c)];
      y[static_cast<size_t>(c)] = 0.0;
      marked[static_cast<size_t>(c)] = 0;
    }
    const double s = sg[static_cast<size_t>(k)];
    if (!(s * dk > kPivotFloor)) {
      dk = s * kPivotBump;
      ++bumped_;
    }
    d_[static_cast<size_t>(k)] = dk;
    dinv_[static_cast<size_t>(k)] = 1.0 / dk;
  }
  return std::all_of(lx_.begin(), lx_.end(), [](double v) { return std::isfinite(v); });
}

Eigen::VectorXd QuasidefiniteLdl::solve(const Eigen::VectorXd& b) const {
  Eigen::VectorXd x(n_);
  for (int i = 0; i < n_; ++i) x(perm_.indices()(i)) = b(i);
  for (int i = 0; i < n_; ++i)
    for (int j = lp_[static_cast<size_t>(i)]; j < lp_[static_cast<size_t>(i) + 1]; ++j)
      x(li_[static_cast<size_t>(j)]) -= lx_[static_cast<size_t>(j)] * x(i);
  for (int i = 0; i < n_; ++i) x(i) *= dinv_[static_cast<size_t>(i)];
  for (int i = n_ - 1; i >= 0; --i)
    for (int j = lp_[static_cast<size_t>(i)]; j < lp_[static_cast<size_t>(i) + 1]; ++j)
      x(i) -= lx_[static_cast<size_t>(j)] * x(li_[static_cast<size_t>(j)]);
  Eigen::VectorXd out(n_);
  for (int i = 0; i < n_; ++i) out(i) = x(perm_.indices()(i));
  return out;
}

}  // namespace ellipsotope::conic::detail
