#pragma once

#include <Eigen/SparseCore>
#include <vector>

namespace ellipsotope::conic::detail {

// LDL^T for quasidefinite matrices: fill-reducing ordering, no pivoting,
// pivots pushed to their expected sign when they break down.
class QuasidefiniteLdl {
 public:
  using Sparse = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

  // lower: lower triangle of K; signs: +1 / -1 expected pivot sign per row
  bool factor(const Sparse& lower, const std::vector<signed char>& signs);
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
  int regularized_pivots() const { return bumped_; }

 private:
  void symbolic(const Sparse& upper);

  Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> perm_;
  bool ordered_ = false;
  int n_ = 0;
  std::vector<int> etree_, lnz_, lp_, li_;
  std::vector<double> lx_, d_, dinv_;
  int bumped_ = 0;
};

}  // namespace ellipsotope::conic::detail
