#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <string>
#include <vector>

#include "ellipsotope/conic/program.hpp"

namespace ellipsotope::conic {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

// Cone K = R_+^nonneg x Q^{soc[0]} x ... x S^{psd[0]} x ..., PSD blocks in
// scaled lower-triangular vectorisation (off-diagonals times sqrt 2).
struct ConeDims {
  Index nonneg = 0;
  std::vector<Index> soc;
  std::vector<Index> psd;
  Index size() const;
  Index degree() const;
};

Index svec_size(Index order);

// min c^T x + c0  s.t.  A x = b,  G x + s = h,  s in K
struct StandardForm {
  Eigen::VectorXd c;
  double c0 = 0.0;
  SparseMatrix A;
  Eigen::VectorXd b;
  SparseMatrix G;
  Eigen::VectorXd h;
  ConeDims dims;
};

struct SolverSettings {
  double feas_tol = 1e-8;
  double gap_tol = 1e-8;
  int max_iterations = 120;
  bool equilibrate = true;
  double regularization = 1e-9;
  int refinement_steps = 10;
};

enum class SolveStatus { optimal, infeasible, unbounded, numerical_failure };

std::string to_string(SolveStatus status);

struct Residuals {
  double primal = 0.0;
  double dual = 0.0;
  double gap = 0.0;
  double relative_gap = 0.0;
};

struct StandardSolution {
  SolveStatus status = SolveStatus::numerical_failure;
  Eigen::VectorXd x, y, z, s;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  Residuals residuals;
  int iterations = 0;
};

StandardSolution solve_standard(const StandardForm& form, const SolverSettings& settings = {});

// where a modelling-layer constraint landed in the standard form
struct ConstraintSlot {
  bool equality = false;
  Index start = 0;   // row in A (equality) or in G
  Index length = 0;
  bool has_dual = true;
};

struct Lowering {
  StandardForm form;
  Index num_variables = 0;  // user variables followed by auxiliaries
  std::vector<ConstraintSlot> slots;
};

Lowering lower(const ConeProgram& program);

struct Solution {
  SolveStatus status = SolveStatus::numerical_failure;
  Eigen::VectorXd x;  // user variables followed by auxiliaries
  // per constraint: equality multiplier (for e(x) in the Lagrangian
  // f + y e), cone multiplier z in K* (f - <z, e>), PSD as a full
  // column-major matrix; empty for lowered cones (geometric mean, power, pnorm)
  std::vector<Eigen::VectorXd> duals;
  double objective = 0.0;       // in the program's own sense
  double dual_objective = 0.0;  // in the program's own sense
  Residuals residuals;
  int iterations = 0;

  double value(const LinExpr& e) const { return e.evaluate(x); }
  double value(Index var) const { return x(var); }
  Eigen::MatrixXd value(const Variable& v) const;
};

Solution solve(const ConeProgram& program, const SolverSettings& settings = {});
// reuse a lowering, e.g. after editing form.b
Solution solve(const ConeProgram& program, const Lowering& lowering, const SolverSettings& settings = {});

struct Violation {
  Index constraint = 0;
  ConstraintKind kind = ConstraintKind::equality;
  double magnitude = 0.0;
  std::string label;
};

// recomputes every constraint of the program at solution.x
std::vector<Violation> verify_solution(const ConeProgram& program, const Solution& solution, double tol = 1e-8);
std::vector<Violation> verify_point(const ConeProgram& program, const Eigen::Ref<const Eigen::VectorXd>& x,
                                    double tol = 1e-8);

}  // namespace ellipsotope::conic
