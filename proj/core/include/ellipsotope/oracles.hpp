#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "ellipsotope/norms.hpp"
#include "ellipsotope/sets.hpp"

namespace ellipsotope {

struct OracleBudget {
  int max_enumeration_columns = 20;
  int sample_count = 64;
  int ascent_iterations = 40;
  std::uint64_t seed = 0;
  int threads = 0;  // 0: hardware concurrency
  long max_facet_subsets = 200000;
};

struct OracleResult {
  double value = 0.0;  // +inf when some point leaves the circumbody's affine hull
  Eigen::VectorXd alpha;
  bool exact = false;
};

// max over alpha in {-1,1}^m of ||G alpha + c - d|| in the norm of E_q(H)
OracleResult radius_bruteforce_zonotope_inbody(const Eigen::MatrixXd& G, const Eigen::VectorXd& c,
                                               const Eigen::MatrixXd& H, const Eigen::VectorXd& d,
                                               const Exponent& q, const OracleBudget& budget = {});
OracleResult radius_bruteforce(const Ellipsotope& inbody, const Ellipsotope& circumbody,
                               const OracleBudget& budget = {});

// zonotope circumbody, any inbody exponent: max over facet normals y of
// (||G^T y||_{p*} + |y^T (c - d)|) / h(y); exact
OracleResult radius_zonotope_facets(const Ellipsotope& inbody, const Ellipsotope& circumbody,
                                    const OracleBudget& budget = {});

// random starts followed by linearised ascent; always a lower bound on r
OracleResult radius_sampling_lower_bound(const Ellipsotope& inbody, const Ellipsotope& circumbody,
                                         const OracleBudget& budget = {});

struct BallMaximum {
  double value = 0.0;
  Eigen::VectorXd alpha;
};

// max ||Theta a + theta||_2 over ||a||_2 <= 1
BallMaximum quadratic_over_ball(const Eigen::MatrixXd& Theta, const Eigen::VectorXd& theta);

OperatorNormEstimate opnorm_p_to_1_oracle(const Eigen::MatrixXd& A, const Exponent& p,
                                          const OracleBudget& budget = {});

}  // namespace ellipsotope
