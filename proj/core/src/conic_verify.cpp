#include <cmath>

#include "ellipsotope/conic/solver.hpp"
#include "ellipsotope/norms.hpp"

namespace ellipsotope::conic {

std::vector<Violation> verify_point(const ConeProgram& program, const Eigen::Ref<const Eigen::VectorXd>& x, double tol) {
  std::vector<Violation> report;
  const auto& cons = program.constraints();
  for (size_t k = 0; k < cons.size(); ++k) {
    const Constraint& c = cons[k];
    std::vector<double> v;
    v.reserve(c.exprs.size());
    for (const auto& e : c.exprs) v.push_back(e.evaluate(x));
    double viol = 0.0;
    switch (c.kind) {
      case ConstraintKind::equality: viol = std::abs(v[0]); break;
      case ConstraintKind::nonnegative: viol = -v[0]; break;
      case ConstraintKind::second_order: {
        double r = 0.0;
        for (size_t i = 1; i < v.size(); ++i) r += v[i] * v[i];
        viol = std::sqrt(r) - v[0];
        break;
      }
      case ConstraintKind::psd: {
        Eigen::MatrixXd M(c.order, c.order);
        size_t pos = 0;
        for (Index j = 0; j < c.order; ++j)
          for (Index i = j; i < c.order; ++i, ++pos) M(i, j) = M(j, i) = v[pos];
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
        viol = -es.eigenvalues()(0);
        break;
      }
      case ConstraintKind::geometric_mean: {
        double logsum = 0.0, neg = 0.0;
        for (size_t i = 1; i < v.size(); ++i) {
          neg = std::max(neg, -v[i]);
          logsum += std::log(std::max(v[i], 0.0));
        }
        double gm = std::exp(logsum / static_cast<double>(v.size() - 1));
        viol = std::max(neg, v[0] - gm);
        break;
      }
      case ConstraintKind::power: {
        double neg = std::max(-v[0], -v[1]);
        double bound = std::pow(std::max(v[0], 0.0), c.alpha) * std::pow(std::max(v[1], 0.0), 1.0 - c.alpha);
        viol = std::max(neg, std::abs(v[2]) - bound);
        break;
      }
      case ConstraintKind::pnorm: {
        Eigen::VectorXd w(static_cast<Index>(v.size() - 1));
        for (size_t i = 1; i < v.size(); ++i) w(static_cast<Index>(i - 1)) = v[i];
        viol = vector_norm(w, c.p) - v[0];
        break;
      }
    }
    if (viol > tol) report.push_back({static_cast<Index>(k), c.kind, viol, c.label});
  }
  return report;
}

std::vector<Violation> verify_solution(const ConeProgram& program, const Solution& solution, double tol) {
  if (solution.x.size() < program.num_variables()) {
    return {{0, ConstraintKind::equality, std::numeric_limits<double>::infinity(), "missing primal values"}};
  }
  return verify_point(program, solution.x, tol);
}

}  // namespace ellipsotope::conic
