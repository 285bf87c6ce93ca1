#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "ellipsotope/exponent.hpp"

namespace ellipsotope {

double vector_norm(const Eigen::Ref<const Eigen::VectorXd>& v, const Exponent& p);

// u with ||u||_{p*} = 1 and u^T y = ||y||_p (a subgradient of the p-norm at y);
// zero when y = 0
Eigen::VectorXd dual_vector(const Eigen::Ref<const Eigen::VectorXd>& y, const Exponent& p);

struct MatrixNormKind {
  enum class Tag { lpq, lpq_transposed, op };
  Tag tag = Tag::lpq;
  Exponent p;
  Exponent q;
};

// q-norm of the vector of column p-norms; transposed applies it to A^T
double lpq_norm(const Eigen::Ref<const Eigen::MatrixXd>& A, const Exponent& p, const Exponent& q,
                bool transposed = false);

struct OperatorNormOptions {
  int restarts = 8;
  int max_iterations = 500;
  int max_enumeration_columns = 20;
  bool require_exact = false;
  std::uint64_t seed = 0;
};

struct OperatorNormEstimate {
  double value = 0.0;  // lower bound, equal to the norm when exact
  Eigen::VectorXd witness;
  bool exact = false;
};

// sup_{||v||_p <= 1} ||Av||_q. Exact for p = 1, q = inf, p = q = 2 and for
// p = inf up to the enumeration limit; otherwise a multistart ascent lower bound.
OperatorNormEstimate operator_norm(const Eigen::Ref<const Eigen::MatrixXd>& A, const Exponent& p, const Exponent& q,
                                   const OperatorNormOptions& options = {});

double matrix_norm(const Eigen::Ref<const Eigen::MatrixXd>& A, const MatrixNormKind& kind,
                   const OperatorNormOptions& options = {});

// k-th root of the k-th absolute moment of a standard normal variable
double gaussian_moment(const Exponent& k);

}  // namespace ellipsotope
