#include <cmath>
#include <numbers>
#include <stdexcept>

#include "cones.hpp"

namespace ellipsotope::conic {

namespace {

using Triplet = Eigen::Triplet<double, int>;

enum class Category { equality, nonneg, soc, psd, none };

class Lowerer {
 public:
  explicit Lowerer(Index user_vars) : next_var_(user_vars) {}

  LinExpr aux() { return LinExpr::variable(next_var_++); }

  void equality(const LinExpr& e) { eq_.push_back(e); }
  void nonneg(const LinExpr& e) { nonneg_.push_back(e); }
  void soc(std::vector<LinExpr> block) { soc_.push_back(std::move(block)); }
  void psd(Index order, std::vector<LinExpr> lower) {
    // svec scaling of off-diagonal entries
    Index pos = 0;
    for (Index j = 0; j < order; ++j)
      for (Index i = j; i < order; ++i, ++pos)
        if (i != j) lower[static_cast<size_t>(pos)] *= std::numbers::sqrt2;
    psd_.push_back({order, std::move(lower)});
  }

  // t <= (prod leaves)^(1/k) with t used as padding up to a power of two
  void geometric_mean(const LinExpr& t, std::vector<LinExpr> leaves) {
    if (leaves.size() == 1) {
      nonneg(leaves[0] - t);
      return;
    }
    size_t width = 1;
    while (width < leaves.size()) width <<= 1;
    while (leaves.size() < width) leaves.push_back(t);
    while (leaves.size() > 1) {
      std::vector<LinExpr> next;
      for (size_t k = 0; k + 1 < leaves.size(); k += 2) {
        LinExpr u = aux();
        // u^2 <= a b with a, b >= 0
        soc({leaves[k] + leaves[k + 1], 2.0 * u, leaves[k] - leaves[k + 1]});
        next.push_back(u);
      }
      leaves = std::move(next);
    }
    nonneg(leaves[0] - t);
  }

  // |z| <= x^alpha y^(1-alpha)
  void power(const LinExpr& x, const LinExpr& y, const LinExpr& z, double alpha) {
    auto frac = as_rational(alpha, 1024, 1e-12);
    if (!frac) throw std::invalid_argument("ConeProgram: power cone exponent is not a small rational.");
    const auto [num, den] = *frac;
    LinExpr w = aux();
    nonneg(w - z);
    nonneg(w + z);
    std::vector<LinExpr> leaves;
    for (std::int64_t k = 0; k < num; ++k) leaves.push_back(x);
    for (std::int64_t k = num; k < den; ++k) leaves.push_back(y);
    geometric_mean(w, std::move(leaves));
  }

  void pnorm(const LinExpr& t, const std::vector<LinExpr>& v, const Exponent& p) {
    if (p.is_infinite()) {
      for (const auto& e : v) {
        nonneg(t - e);
        nonneg(t + e);
      }
      if (v.empty()) nonneg(t);
    } else if (p.is_one()) {
      LinExpr sum;
      for (const auto& e : v) {
        LinExpr a = aux();
        nonneg(a - e);
        nonneg(a + e);
        sum += a;
      }
      nonneg(t - sum);
    } else if (p.is_two()) {
      std::vector<LinExpr> block{t};
      block.insert(block.end(), v.begin(), v.end());
      soc(std::move(block));
    } else {
      // |v_i| <= r_i^{1/p} t^{1-1/p}, sum r <= t
      LinExpr sum;
      for (const auto& e : v) {
        LinExpr r = aux();
        power(r, t, e, p.reciprocal());
        sum += r;
      }
      nonneg(t - sum);
    }
  }

  Index next_var_;
  std::vector<LinExpr> eq_, nonneg_;
  std::vector<std::vector<LinExpr>> soc_;
  std::vector<std::pair<Index, std::vector<LinExpr>>> psd_;
};

}  // namespace

Lowering lower(const ConeProgram& program) {
  Lowerer lw(program.num_variables());
  std::vector<std::pair<Category, Index>> where;
  where.reserve(program.constraints().size());
  for (const Constraint& c : program.constraints()) {
    switch (c.kind) {
      case ConstraintKind::equality:
        where.push_back({Category::equality, static_cast<Index>(lw.eq_.size())});
        lw.equality(c.exprs[0]);
        break;
      case ConstraintKind::nonnegative:
        where.push_back({Category::nonneg, static_cast<Index>(lw.nonneg_.size())});
        lw.nonneg(c.exprs[0]);
        break;
      case ConstraintKind::second_order:
        where.push_back({Category::soc, static_cast<Index>(lw.soc_.size())});
        lw.soc(c.exprs);
        break;
      case ConstraintKind::psd:
        where.push_back({Category::psd, static_cast<Index>(lw.psd_.size())});
        lw.psd(c.order, c.exprs);
        break;
      case ConstraintKind::geometric_mean:
        where.push_back({Category::none, 0});
        lw.geometric_mean(c.exprs[0], std::vector<LinExpr>(c.exprs.begin() + 1, c.exprs.end()));
        break;
      case ConstraintKind::power:
        where.push_back({Category::none, 0});
        lw.power(c.exprs[0], c.exprs[1], c.exprs[2], c.alpha);
        break;
      case ConstraintKind::pnorm:
        where.push_back({Category::none, 0});
        lw.pnorm(c.exprs[0], std::vector<LinExpr>(c.exprs.begin() + 1, c.exprs.end()), c.p);
        break;
    }
  }

  Lowering out;
  out.num_variables = lw.next_var_;
  StandardForm& f = out.form;
  const Index n = lw.next_var_;
  const double sign = program.sense() == Sense::minimize ? 1.0 : -1.0;
  f.c = Eigen::VectorXd::Zero(n);
  for (const Term& t : program.objective().terms()) f.c(t.var) += sign * t.coef;
  f.c0 = sign * program.objective().constant();

  // A x = b from e(x) = a^T x + c0 = 0
  std::vector<Triplet> at;
  f.b.resize(static_cast<Index>(lw.eq_.size()));
  for (size_t i = 0; i < lw.eq_.size(); ++i) {
    for (const Term& t : lw.eq_[i].terms()) at.emplace_back(static_cast<int>(i), static_cast<int>(t.var), t.coef);
    f.b(static_cast<Index>(i)) = -lw.eq_[i].constant();
  }
  f.A.resize(static_cast<Index>(lw.eq_.size()), n);
  f.A.setFromTriplets(at.begin(), at.end());

  // G x + s = h from s = e(x)
  std::vector<Triplet> gt;
  std::vector<double> h;
  auto row = [&](const LinExpr& e) {
    const int r = static_cast<int>(h.size());
    for (const Term& t : e.terms()) gt.emplace_back(r, static_cast<int>(t.var), -t.coef);
    h.push_back(e.constant());
  };
  for (const auto& e : lw.nonneg_) row(e);
  f.dims.nonneg = static_cast<Index>(lw.nonneg_.size());
  std::vector<Index> soc_start, psd_start;
  for (const auto& block : lw.soc_) {
    soc_start.push_back(static_cast<Index>(h.size()));
    for (const auto& e : block) row(e);
    f.dims.soc.push_back(static_cast<Index>(block.size()));
  }
  for (const auto& [order, block] : lw.psd_) {
    psd_start.push_back(static_cast<Index>(h.size()));
    for (const auto& e : block) row(e);
    f.dims.psd.push_back(order);
  }
  f.h = Eigen::Map<Eigen::VectorXd>(h.data(), static_cast<Index>(h.size()));
  f.G.resize(static_cast<Index>(h.size()), n);
  f.G.setFromTriplets(gt.begin(), gt.end());

  for (const auto& [cat, idx] : where) {
    ConstraintSlot slot;
    switch (cat) {
      case Category::equality: slot = {true, idx, 1, true}; break;
      case Category::nonneg: slot = {false, idx, 1, true}; break;
      case Category::soc: slot = {false, soc_start[static_cast<size_t>(idx)], f.dims.soc[static_cast<size_t>(idx)], true}; break;
      case Category::psd:
        slot = {false, psd_start[static_cast<size_t>(idx)], svec_size(f.dims.psd[static_cast<size_t>(idx)]), true};
        break;
      case Category::none: slot = {false, 0, 0, false}; break;
    }
    out.slots.push_back(slot);
  }
  return out;
}

Eigen::MatrixXd Solution::value(const Variable& v) const {
  Eigen::MatrixXd M(v.rows(), v.cols());
  for (Index j = 0; j < v.cols(); ++j)
    for (Index i = 0; i < v.rows(); ++i) M(i, j) = x(v.index(i, j));
  return M;
}

Solution solve(const ConeProgram& program, const Lowering& lw, const SolverSettings& settings) {
  StandardSolution ss = solve_standard(lw.form, settings);
  Solution sol;
  sol.status = ss.status;
  sol.x = ss.x;
  sol.residuals = ss.residuals;
  sol.iterations = ss.iterations;
  const double sign = program.sense() == Sense::minimize ? 1.0 : -1.0;
  sol.objective = sign * ss.primal_objective;
  sol.dual_objective = sign * ss.dual_objective;
  const auto& cons = program.constraints();
  sol.duals.resize(cons.size());
  if (ss.y.size() == lw.form.b.size() && ss.z.size() == lw.form.h.size()) {
    for (size_t k = 0; k < cons.size(); ++k) {
      const ConstraintSlot& slot = lw.slots[k];
      if (!slot.has_dual) continue;
      if (slot.equality) {
        sol.duals[k] = ss.y.segment(slot.start, 1);
      } else if (cons[k].kind == ConstraintKind::psd) {
        Eigen::MatrixXd Z = detail::smat(ss.z.segment(slot.start, slot.length), cons[k].order);
        sol.duals[k] = Eigen::Map<Eigen::VectorXd>(Z.data(), Z.size());
      } else {
        sol.duals[k] = ss.z.segment(slot.start, slot.length);
      }
    }
  }
  return sol;
}

Solution solve(const ConeProgram& program, const SolverSettings& settings) {
  return solve(program, lower(program), settings);
}

}  // namespace ellipsotope::conic
