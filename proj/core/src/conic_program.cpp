#include <iomanip>
#include <ostream>
#include <stdexcept>

#include "ellipsotope/conic/program.hpp"

namespace ellipsotope::conic {

LinExpr LinExpr::variable(Index var, double coef) {
  LinExpr e;
  e.terms_.push_back({var, coef});
  return e;
}

LinExpr& LinExpr::add_term(Index var, double coef) {
  if (coef != 0.0) terms_.push_back({var, coef});
  return *this;
}

LinExpr& LinExpr::operator+=(const LinExpr& other) {
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  constant_ += other.constant_;
  return *this;
}

LinExpr& LinExpr::operator-=(const LinExpr& other) {
  for (const Term& t : other.terms_) terms_.push_back({t.var, -t.coef});
  constant_ -= other.constant_;
  return *this;
}

LinExpr& LinExpr::operator*=(double s) {
  for (Term& t : terms_) t.coef *= s;
  constant_ *= s;
  return *this;
}

double LinExpr::evaluate(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  double v = constant_;
  for (const Term& t : terms_) v += t.coef * x(t.var);
  return v;
}

LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
LinExpr operator-(LinExpr a, const LinExpr& b) { return a -= b; }
LinExpr operator-(LinExpr a) { return a *= -1.0; }
LinExpr operator*(double s, LinExpr a) { return a *= s; }
LinExpr operator*(LinExpr a, double s) { return a *= s; }

LinExpr Variable::operator()(Index i, Index j) const {
  if (i < 0 || i >= rows_ || j < 0 || j >= cols_) throw std::out_of_range("Variable: index out of range.");
  return LinExpr::variable(index(i, j));
}

std::string to_string(ConstraintKind kind) {
  switch (kind) {
    case ConstraintKind::equality: return "eq";
    case ConstraintKind::nonnegative: return "nonneg";
    case ConstraintKind::second_order: return "soc";
    case ConstraintKind::psd: return "psd";
    case ConstraintKind::geometric_mean: return "geomean";
    case ConstraintKind::power: return "power";
    default: return "pnorm";
  }
}

Variable ConeProgram::add_variable(const std::string& name, Index rows, Index cols) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("ConeProgram: negative variable dimensions.");
  Variable v(name, num_vars_, rows, cols);
  num_vars_ += rows * cols;
  variables_.push_back(v);
  return v;
}

void ConeProgram::check(const LinExpr& e) const {
  for (const Term& t : e.terms())
    if (t.var < 0 || t.var >= num_vars_) throw std::invalid_argument("ConeProgram: expression references an undeclared variable.");
}

void ConeProgram::minimize(LinExpr objective) {
  check(objective);
  sense_ = Sense::minimize;
  objective_ = std::move(objective);
}

void ConeProgram::maximize(LinExpr objective) {
  check(objective);
  sense_ = Sense::maximize;
  objective_ = std::move(objective);
}

Index ConeProgram::push(Constraint c) {
  for (const LinExpr& e : c.exprs) check(e);
  constraints_.push_back(std::move(c));
  return static_cast<Index>(constraints_.size()) - 1;
}

Index ConeProgram::add_equality(LinExpr e, std::string label) {
  return push({ConstraintKind::equality, {std::move(e)}, 0, 0.0, {}, std::move(label)});
}

Index ConeProgram::add_nonnegative(LinExpr e, std::string label) {
  return push({ConstraintKind::nonnegative, {std::move(e)}, 0, 0.0, {}, std::move(label)});
}

Index ConeProgram::add_less_equal(const LinExpr& lhs, const LinExpr& rhs, std::string label) {
  return add_nonnegative(rhs - lhs, std::move(label));
}

Index ConeProgram::add_second_order(LinExpr t, std::vector<LinExpr> v, std::string label) {
  std::vector<LinExpr> exprs;
  exprs.reserve(v.size() + 1);
  exprs.push_back(std::move(t));
  for (auto& e : v) exprs.push_back(std::move(e));
  return push({ConstraintKind::second_order, std::move(exprs), 0, 0.0, {}, std::move(label)});
}

Index ConeProgram::add_psd(const ExprMatrix& M, std::string label) {
  if (M.rows() != M.cols() || M.rows() == 0) throw std::invalid_argument("ConeProgram: PSD block must be square.");
  std::vector<LinExpr> exprs;
  for (Index j = 0; j < M.cols(); ++j)
    for (Index i = j; i < M.rows(); ++i) exprs.push_back(M(i, j));
  return push({ConstraintKind::psd, std::move(exprs), M.rows(), 0.0, {}, std::move(label)});
}

Index ConeProgram::add_geometric_mean(LinExpr t, std::vector<LinExpr> x, std::string label) {
  if (x.empty()) throw std::invalid_argument("ConeProgram: geometric mean of an empty list.");
  std::vector<LinExpr> exprs;
  exprs.push_back(std::move(t));
  for (auto& e : x) exprs.push_back(std::move(e));
  return push({ConstraintKind::geometric_mean, std::move(exprs), 0, 0.0, {}, std::move(label)});
}

Index ConeProgram::add_power(LinExpr x, LinExpr y, LinExpr z, double alpha, std::string label) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("ConeProgram: power cone exponent must lie in (0, 1).");
  return push({ConstraintKind::power, {std::move(x), std::move(y), std::move(z)}, 0, alpha, {}, std::move(label)});
}

Index ConeProgram::add_pnorm(LinExpr t, std::vector<LinExpr> v, const Exponent& p, std::string label) {
  std::vector<LinExpr> exprs;
  exprs.push_back(std::move(t));
  for (auto& e : v) exprs.push_back(std::move(e));
  return push({ConstraintKind::pnorm, std::move(exprs), 0, 0.0, p, std::move(label)});
}

// Text format, one record per line:
//   var <name> <offset> <rows> <cols>
//   objective min|max <expr>
//   <kind> [order=k] [alpha=a] [p=p] [label=l] : <expr> ; <expr> ; ...
// where <expr> is "<const> + <coef>*x<index> + ...".
void ConeProgram::dump(std::ostream& os) const {
  auto write = [&](const LinExpr& e) {
    os << e.constant();
    for (const Term& t : e.terms()) os << " + " << t.coef << "*x" << t.var;
  };
  const auto old_precision = os.precision(17);
  for (const Variable& v : variables_) os << "var " << v.name() << ' ' << v.offset() << ' ' << v.rows() << ' ' << v.cols() << '\n';
  os << "objective " << (sense_ == Sense::minimize ? "min " : "max ");
  write(objective_);
  os << '\n';
  for (const Constraint& c : constraints_) {
    os << to_string(c.kind);
    if (c.kind == ConstraintKind::psd) os << " order=" << c.order;
    if (c.kind == ConstraintKind::power) os << " alpha=" << c.alpha;
    if (c.kind == ConstraintKind::pnorm) os << " p=" << c.p.to_string();
    if (!c.label.empty()) os << " label=" << c.label;
    os << " :";
    for (size_t k = 0; k < c.exprs.size(); ++k) {
      os << (k == 0 ? " " : " ; ");
      write(c.exprs[k]);
    }
    os << '\n';
  }
  os.precision(old_precision);
}

}  // namespace ellipsotope::conic
