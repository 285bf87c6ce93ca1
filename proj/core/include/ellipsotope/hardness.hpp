#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "ellipsotope/containment.hpp"
#include "ellipsotope/oracles.hpp"
#include "ellipsotope/sets.hpp"

namespace ellipsotope {

struct LRho {
  double L = 0.0;
  double rho = 0.0;
};

// p = inf gives (n - 1, 1)
LRho compute_L_rho(Index n, const Exponent& p);
// residuals of the two defining equations; zero for p = inf
Eigen::Vector2d L_rho_residuals(Index n, const Exponent& p, const LRho& c);

struct HardnessInstance {
  Index n = 0;
  Exponent p = Exponent::infinity();
  Eigen::MatrixXd A;
  double L = 0.0;
  double rho_star = 0.0;
  Eigen::MatrixXd H;                // (n+1) x 2n, [I -I; 1^T 1^T]
  Eigen::MatrixXd inbody_template;  // [A 0; 0 -L]

  Eigen::VectorXd center() const;   // n e_{n+1}
  Ellipsotope circumbody() const;   // Z(H/2, n e_{n+1})
  Ellipsotope inbody(double xi) const;  // E_p(G_{A/xi}, n e_{n+1})
};

HardnessInstance build_instance(const Eigen::MatrixXd& A, const Exponent& p);

enum class InnerMethod { automatic, bruteforce, facets, lr, containment };

std::string to_string(InnerMethod m);
InnerMethod inner_method_from_string(const std::string& s);

struct SigmaValue {
  double value = 0.0;  // the value used by the bisection (an upper value unless exact)
  double lower = 0.0;
  bool exact = false;
  InnerMethod method = InnerMethod::automatic;
};

// automatic: facet enumeration when small enough, else vertex enumeration for
// p = inf with at most 12 inbody generators, else LR (p = inf) or the containment dispatcher
SigmaValue sigma(const HardnessInstance& inst, double xi, InnerMethod inner = InnerMethod::automatic,
                 const ContainmentOptions& options = {});

struct BisectionConfig {
  double delta = 0.05;
  double mu = 0.0;       // 0: (delta/2) ||A||_{1->1}
  double epsilon = 0.0;  // 0: delta ||A||_{1->1} ||A||_{1->inf} / (2 xi_hat^2)
  int max_iterations = 0;  // 0: enough for the interval floor
};

struct BisectionStep {
  double a = 0.0, b = 0.0, xi = 0.0, approx = 0.0;
};

struct BisectionResult {
  double xi_star = 0.0;
  double xi_hat = 0.0;
  double mu = 0.0;
  double epsilon = 0.0;
  int iterations = 0;
  bool certificate_free = false;  // returned from the 1 < approx < 1 + eps branch
  bool heuristic = false;         // some sigma value was not exact
  std::vector<BisectionStep> trace;
};

// max_j sum_i |A_ij| and max |A_ij|
double norm_1_to_1(const Eigen::MatrixXd& A);
double norm_1_to_inf(const Eigen::MatrixXd& A);

BisectionResult p_to_1_norm_via_bisection(const Eigen::MatrixXd& A, const Exponent& p, const BisectionConfig& config = {},
                                          InnerMethod inner = InnerMethod::automatic,
                                          const ContainmentOptions& options = {});

}  // namespace ellipsotope
