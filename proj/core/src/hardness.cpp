#include "ellipsotope/hardness.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ellipsotope {

using Eigen::MatrixXd;
using Eigen::VectorXd;

LRho compute_L_rho(Index n, const Exponent& p) {
  if (n < 2) throw std::invalid_argument("compute_L_rho: n must be at least 2.");
  if (p.is_one()) throw std::invalid_argument("compute_L_rho: p must exceed 1.");
  const double nd = static_cast<double>(n);
  if (p.is_infinite()) return {nd - 1.0, 1.0};
  const double pv = p.value();
  LRho out;
  out.rho = std::pow(nd, -1.0 / (pv - 1.0));
  // rho^p = n^{-p/(p-1)}
  const double rho_p = std::pow(nd, -pv / (pv - 1.0));
  out.L = (nd - out.rho) / std::pow(1.0 - rho_p, 1.0 / pv);
  return out;
}

Eigen::Vector2d L_rho_residuals(Index n, const Exponent& p, const LRho& c) {
  if (p.is_infinite()) return Eigen::Vector2d(c.L - static_cast<double>(n - 1), c.rho - 1.0);
  const double pv = p.value();
  const double t = (static_cast<double>(n) - c.rho) / c.L;
  const double tp = std::pow(t, pv);
  Eigen::Vector2d r;
  r(0) = 1.0 - std::pow(c.rho, pv) - tp;
  r(1) = c.L - std::pow(1.0 - tp, 1.0 / pv - 1.0) * std::pow(t, pv - 1.0);
  return r;
}

HardnessInstance build_instance(const MatrixXd& A, const Exponent& p) {
  const Index n = A.rows(), m = A.cols();
  if (n < 2) throw std::invalid_argument("build_instance: A needs at least two rows.");
  if (m < 1) throw std::invalid_argument("build_instance: A needs at least one column.");
  if (!A.allFinite()) throw std::invalid_argument("build_instance: A must be finite.");
  const LRho lr = compute_L_rho(n, p);
  HardnessInstance inst;
  inst.n = n;
  inst.p = p;
  inst.A = A;
  inst.L = lr.L;
  inst.rho_star = lr.rho;
  inst.H = MatrixXd::Zero(n + 1, 2 * n);
  inst.H.topLeftCorner(n, n).setIdentity();
  inst.H.topRightCorner(n, n) = -MatrixXd::Identity(n, n);
  inst.H.row(n).setOnes();
  inst.inbody_template = MatrixXd::Zero(n + 1, m + 1);
  inst.inbody_template.topLeftCorner(n, m) = A;
  inst.inbody_template(n, m) = -lr.L;
  return inst;
}

VectorXd HardnessInstance::center() const {
  VectorXd c = VectorXd::Zero(n + 1);
  c(n) = static_cast<double>(n);
  return c;
}

Ellipsotope HardnessInstance::circumbody() const { return Ellipsotope(Exponent::infinity(), 0.5 * H, center()); }

Ellipsotope HardnessInstance::inbody(double xi) const {
  if (!(xi > 0.0) || !std::isfinite(xi)) throw std::invalid_argument("HardnessInstance: xi must be positive.");
  MatrixXd G = inbody_template;
  G.topLeftCorner(n, A.cols()) /= xi;
  return Ellipsotope(p, G, center());
}

std::string to_string(InnerMethod m) {
  switch (m) {
    case InnerMethod::automatic: return "auto";
    case InnerMethod::bruteforce: return "bruteforce";
    case InnerMethod::facets: return "facets";
    case InnerMethod::lr: return "lr";
    case InnerMethod::containment: return "containment";
  }
  return "auto";
}

InnerMethod inner_method_from_string(const std::string& s) {
  for (InnerMethod m : {InnerMethod::automatic, InnerMethod::bruteforce, InnerMethod::facets, InnerMethod::lr,
                        InnerMethod::containment})
    if (to_string(m) == s) return m;
  throw std::invalid_argument("unknown inner method '" + s + "'.");
}

namespace {

double binomial(Index a, Index b) {
  double r = 1.0;
  for (Index i = 0; i < b; ++i) r = r * static_cast<double>(a - i) / static_cast<double>(i + 1);
  return r;
}

InnerMethod resolve(const HardnessInstance& inst, InnerMethod inner, const ContainmentOptions& options) {
  if (inner != InnerMethod::automatic) return inner;
  if (binomial(2 * inst.n, inst.n) <= static_cast<double>(options.oracle.max_facet_subsets)) return InnerMethod::facets;
  if (inst.p.is_infinite() && inst.A.cols() + 1 <= 12) return InnerMethod::bruteforce;
  if (inst.p.is_infinite()) return InnerMethod::lr;
  return InnerMethod::containment;
}

}  // namespace

SigmaValue sigma(const HardnessInstance& inst, double xi, InnerMethod inner, const ContainmentOptions& options) {
  const Ellipsotope in = inst.inbody(xi);
  const Ellipsotope out = inst.circumbody();
  SigmaValue s;
  s.method = resolve(inst, inner, options);
  switch (s.method) {
    case InnerMethod::facets: {
      OracleResult r = radius_zonotope_facets(in, out, options.oracle);
      s.value = s.lower = r.value;
      s.exact = true;
      break;
    }
    case InnerMethod::bruteforce: {
      if (!inst.p.is_infinite()) throw std::invalid_argument("sigma: vertex enumeration needs p = inf.");
      OracleResult r = radius_bruteforce(in, out, options.oracle);
      s.value = s.lower = r.value;
      s.exact = true;
      break;
    }
    case InnerMethod::lr:
    case InnerMethod::containment: {
      ContainmentOptions o = options;
      o.method = s.method == InnerMethod::lr ? Method::lr : Method::automatic;
      ContainmentResult r = containment_radius(in, out, o);
      s.value = r.r_upper;
      s.lower = r.r_lower;
      s.exact = r.exact;
      break;
    }
    case InnerMethod::automatic: break;
  }
  return s;
}

double norm_1_to_1(const MatrixXd& A) { return A.cwiseAbs().colwise().sum().maxCoeff(); }

double norm_1_to_inf(const MatrixXd& A) { return A.cwiseAbs().maxCoeff(); }

BisectionResult p_to_1_norm_via_bisection(const MatrixXd& A, const Exponent& p, const BisectionConfig& config,
                                          InnerMethod inner, const ContainmentOptions& options) {
  if (A.size() == 0 || A.cwiseAbs().maxCoeff() == 0.0)
    throw std::invalid_argument("p_to_1_norm_via_bisection: A must be nonzero.");
  if (!(config.delta > 0.0) || config.mu < 0.0 || config.epsilon < 0.0 || config.max_iterations < 0)
    throw std::invalid_argument("p_to_1_norm_via_bisection: delta must be positive and mu, epsilon, max_iterations nonnegative.");
  const HardnessInstance inst = build_instance(A, p);
  const double n11 = norm_1_to_1(A), n1i = norm_1_to_inf(A);
  BisectionResult res;
  res.xi_hat = std::pow(static_cast<double>(A.cols()), 1.0 - p.reciprocal()) * n11;
  res.mu = config.mu > 0.0 ? config.mu : 0.5 * config.delta * n11;
  res.epsilon = config.epsilon > 0.0 ? config.epsilon : config.delta * n11 * n1i / (2.0 * res.xi_hat * res.xi_hat);
  const int needed = static_cast<int>(std::ceil(std::log2(std::max(1.0, res.xi_hat / (2.0 * res.mu)))));
  const int limit = config.max_iterations > 0 ? config.max_iterations : needed + 2;
  double a = 0.0, b = res.xi_hat;
  while (true) {
    const double mid = 0.5 * (a + b);
    if (b - a <= 2.0 * res.mu) {
      res.xi_star = mid;
      return res;
    }
    if (res.iterations >= limit)
      throw std::runtime_error("p_to_1_norm_via_bisection: no convergence after " + std::to_string(limit) +
                               " halvings (interval [" + std::to_string(a) + ", " + std::to_string(b) + "]).");
    const SigmaValue s = sigma(inst, mid, inner, options);
    if (!s.exact) res.heuristic = true;
    res.trace.push_back({a, b, mid, s.value});
    if (s.value <= 1.0) {
      b = mid;
    } else if (s.value >= 1.0 + res.epsilon) {
      a = mid;
    } else {
      res.xi_star = mid;
      res.certificate_free = true;
      return res;
    }
    ++res.iterations;
  }
}

}  // namespace ellipsotope
