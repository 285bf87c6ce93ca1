#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ellipsotope/conic/solver.hpp"

namespace ellipsotope::conic::detail {

using Eigen::MatrixXd;
using Eigen::VectorXd;

Eigen::MatrixXd smat(const Eigen::Ref<const VectorXd>& v, Index order);
VectorXd svec(const MatrixXd& M);

// Nesterov-Todd scaling W with W z = W^{-T} s = lambda
struct Scaling {
  VectorXd d;  // nonneg block, W = diag(d)
  std::vector<MatrixXd> soc_w, soc_winv;
  std::vector<MatrixXd> psd_r, psd_rinv;  // W(Z) = R^T Z R
  VectorXd lambda;                        // PSD blocks hold svec of a diagonal matrix
};

Scaling identity_scaling(const ConeDims& dims);
bool compute_scaling(const ConeDims& dims, const VectorXd& s, const VectorXd& z, Scaling& out);

enum class WOp { w, wt, winv, winvt };
VectorXd apply_w(const ConeDims& dims, const Scaling& sc, const VectorXd& v, WOp op);
// dense W^T W per block for KKT assembly (PSD in svec coordinates)
std::vector<MatrixXd> wtw_blocks(const ConeDims& dims, const Scaling& sc);
VectorXd apply_wtw(const ConeDims& dims, const Scaling& sc, const VectorXd& v);

VectorXd jordan_product(const ConeDims& dims, const VectorXd& u, const VectorXd& v);
// solves lambda o u = v; lambda is a scaled point (diagonal PSD blocks)
VectorXd jordan_divide(const ConeDims& dims, const VectorXd& lambda, const VectorXd& v);
VectorXd identity_element(const ConeDims& dims);
// smallest "eigenvalue" t such that x - t e lies on the boundary
double min_eigenvalue(const ConeDims& dims, const VectorXd& x);
// largest alpha (possibly inf) with x + alpha dx in K; x interior
double max_step(const ConeDims& dims, const VectorXd& x, const VectorXd& dx);
// block-wise starting offsets
struct BlockOffsets {
  std::vector<Index> soc, psd;
};
BlockOffsets block_offsets(const ConeDims& dims);

}  // namespace ellipsotope::conic::detail
