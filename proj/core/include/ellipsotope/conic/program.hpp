#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

#include "ellipsotope/exponent.hpp"

namespace ellipsotope::conic {

using Index = Eigen::Index;

struct Term {
  Index var;
  double coef;
};

// Affine expression sum_k coef_k x_{var_k} + constant. Duplicate indices are
// allowed and summed when the program is lowered.
class LinExpr {
 public:
  LinExpr() = default;
  LinExpr(double constant) : constant_(constant) {}  // NOLINT: implicit on purpose
  static LinExpr variable(Index var, double coef = 1.0);

  LinExpr& add_term(Index var, double coef);
  LinExpr& operator+=(const LinExpr& other);
  LinExpr& operator-=(const LinExpr& other);
  LinExpr& operator*=(double s);

  const std::vector<Term>& terms() const { return terms_; }
  double constant() const { return constant_; }
  double& constant() { return constant_; }
  double evaluate(const Eigen::Ref<const Eigen::VectorXd>& x) const;

 private:
  std::vector<Term> terms_;
  double constant_ = 0.0;
};

LinExpr operator+(LinExpr a, const LinExpr& b);
LinExpr operator-(LinExpr a, const LinExpr& b);
LinExpr operator-(LinExpr a);
LinExpr operator*(double s, LinExpr a);
LinExpr operator*(LinExpr a, double s);

// handle to a declared block of variables, stored column-major
class Variable {
 public:
  Variable() = default;
  Variable(std::string name, Index offset, Index rows, Index cols)
      : name_(std::move(name)), offset_(offset), rows_(rows), cols_(cols) {}

  LinExpr operator()(Index i, Index j = 0) const;
  Index index(Index i, Index j = 0) const { return offset_ + j * rows_ + i; }
  Index offset() const { return offset_; }
  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index size() const { return rows_ * cols_; }
  const std::string& name() const { return name_; }

 private:
  std::string name_;
  Index offset_ = 0;
  Index rows_ = 0;
  Index cols_ = 0;
};

// dense matrix of affine expressions, column-major
class ExprMatrix {
 public:
  ExprMatrix() = default;
  ExprMatrix(Index rows, Index cols) : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows * cols)) {}
  LinExpr& operator()(Index i, Index j) { return data_[static_cast<size_t>(j * rows_ + i)]; }
  const LinExpr& operator()(Index i, Index j) const { return data_[static_cast<size_t>(j * rows_ + i)]; }
  Index rows() const { return rows_; }
  Index cols() const { return cols_; }

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<LinExpr> data_;
};

enum class ConstraintKind { equality, nonnegative, second_order, psd, geometric_mean, power, pnorm };

std::string to_string(ConstraintKind kind);

// Layout of exprs by kind:
//   equality, nonnegative: one expression, e == 0 / e >= 0
//   second_order: (t, v_1..v_k), ||v||_2 <= t
//   psd: lower triangle of an order-k symmetric matrix, column-major
//   geometric_mean: (t, x_1..x_k), t <= (prod x)^(1/k), x >= 0
//   power: (x, y, z), |z| <= x^a y^(1-a), x, y >= 0
//   pnorm: (t, v_1..v_k), ||v||_p <= t
struct Constraint {
  ConstraintKind kind;
  std::vector<LinExpr> exprs;
  Index order = 0;
  double alpha = 0.0;
  Exponent p;
  std::string label;
};

enum class Sense { minimize, maximize };

class ConeProgram {
 public:
  Variable add_variable(const std::string& name, Index rows = 1, Index cols = 1);
  Index num_variables() const { return num_vars_; }
  const std::vector<Variable>& variables() const { return variables_; }

  void minimize(LinExpr objective);
  void maximize(LinExpr objective);
  Sense sense() const { return sense_; }
  const LinExpr& objective() const { return objective_; }

  Index add_equality(LinExpr e, std::string label = {});
  Index add_nonnegative(LinExpr e, std::string label = {});
  // lhs <= rhs
  Index add_less_equal(const LinExpr& lhs, const LinExpr& rhs, std::string label = {});
  Index add_second_order(LinExpr t, std::vector<LinExpr> v, std::string label = {});
  Index add_psd(const ExprMatrix& symmetric, std::string label = {});
  Index add_geometric_mean(LinExpr t, std::vector<LinExpr> x, std::string label = {});
  Index add_power(LinExpr x, LinExpr y, LinExpr z, double alpha, std::string label = {});
  Index add_pnorm(LinExpr t, std::vector<LinExpr> v, const Exponent& p, std::string label = {});
  const std::vector<Constraint>& constraints() const { return constraints_; }

  // one constraint per line; see dump() in conic_program.cpp for the grammar
  void dump(std::ostream& os) const;

 private:
  void check(const LinExpr& e) const;
  Index push(Constraint c);

  Index num_vars_ = 0;
  std::vector<Variable> variables_;
  Sense sense_ = Sense::minimize;
  LinExpr objective_;
  std::vector<Constraint> constraints_;
};

}  // namespace ellipsotope::conic
