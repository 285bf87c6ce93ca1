#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

#include "ellipsotope/conic/solver.hpp"
#include "ellipsotope/oracles.hpp"
#include "ellipsotope/sets.hpp"

namespace ellipsotope {

enum class Verdict { contained, not_contained, unknown };
// exact: whichever exact algorithm fits the pair (vpoly, ellipsoid_sdp, facets, bruteforce)
enum class Method { automatic, vpoly, ellipsoid_sdp, ellipsoid_eigen, lr, zsr, lr_zsr, sr, fallback, bruteforce, facets, exact, degenerate };

std::string to_string(Verdict v);
std::string to_string(Method m);
Method method_from_string(const std::string& s);

// thrown when the conic backend fails even at the widened tolerance
class SolverFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ContainmentWitness {
  Eigen::MatrixXd X;      // LR primal
  Eigen::MatrixXd Y;      // LR dual
  double rho = 0.0;       // ellipsoid SDP
  double delta = 0.0;
  Eigen::VectorXd v, w;   // ZSR / SR multipliers
  Eigen::VectorXd alpha;  // maximising inbody coefficients
};

struct ContainmentResult {
  double r_lower = 0.0;
  double r_upper = 0.0;
  Method method = Method::automatic;
  Verdict verdict = Verdict::unknown;
  bool exact = false;
  bool lr_certificate = false;
  std::string note;
  ContainmentWitness witness;
};

inline constexpr double kVerdictBand = 1e-9;
Verdict verdict_for(double r_lower, double r_upper);

struct ContainmentOptions {
  Method method = Method::automatic;
  double rank_tol = kRankTolerance;
  double certificate_tol = 1e-6;
  conic::SolverSettings solver;
  OracleBudget oracle;
  bool sampling_lower_bound = true;  // tighten r_lower with the ascent oracle
  bool parallel = true;
};

ContainmentResult containment_radius(const Ellipsotope& inbody, const Ellipsotope& circumbody,
                                     const ContainmentOptions& options = {});

// exact for p = 1: vertices +-g_i
ContainmentResult radius_vpoly_in_ellipsotope(const Eigen::MatrixXd& G, const Eigen::VectorXd& c,
                                              const Eigen::MatrixXd& H, const Eigen::VectorXd& d, const Exponent& q);

// exact for p = q = 2 with H surjective
ContainmentResult radius_ellipsoid_in_ellipsoid(const Eigen::MatrixXd& G, const Eigen::VectorXd& c,
                                                const Eigen::MatrixXd& H, const Eigen::VectorXd& d,
                                                const conic::SolverSettings& settings = {});

// [G, c - d]; the extra column is dropped when the centres agree
Eigen::MatrixXd center_reduction(const Eigen::MatrixXd& G, const Eigen::VectorXd& c, const Eigen::VectorXd& d);

struct LrResult {
  double value = 0.0;
  Eigen::MatrixXd X;
};
struct LrDualResult {
  double value = 0.0;
  Eigen::MatrixXd Y;
};
struct SdpRelaxationResult {
  double value = 0.0;
  Eigen::VectorXd v, w;
};

LrResult lr_relaxation(const Eigen::MatrixXd& G, const Eigen::MatrixXd& H, const Exponent& q,
                       const conic::SolverSettings& settings = {});
LrDualResult lr_dual(const Eigen::MatrixXd& G, const Eigen::MatrixXd& H, const Exponent& q,
                     const conic::SolverSettings& settings = {});
bool lr_exactness_certificate(const Eigen::MatrixXd& Y, double tol = 1e-6);
// ||G^T y||_1 / ||H^T y||_{q*}, a lower bound on r(Z(G), E_q(H)) for any y
double dual_lower_bound(const Eigen::MatrixXd& G, const Eigen::MatrixXd& H, const Exponent& q,
                        const Eigen::VectorXd& y);

SdpRelaxationResult zsr_relaxation(const Eigen::MatrixXd& G, const Eigen::MatrixXd& H, const Exponent& q,
                                   const conic::SolverSettings& settings = {});
SdpRelaxationResult sr_relaxation(const Eigen::MatrixXd& G, const Eigen::MatrixXd& H, const Exponent& p,
                                  const Exponent& q, const conic::SolverSettings& settings = {});

ContainmentResult norm_equivalence_fallback(const Ellipsotope& inbody, const Ellipsotope& circumbody,
                                            const ContainmentOptions& options = {});

// solve, verify independently, retry once at 1e-6; throws SolverFailure
conic::Solution solve_verified(const conic::ConeProgram& program, const conic::SolverSettings& settings,
                               const std::string& what);

}  // namespace ellipsotope
