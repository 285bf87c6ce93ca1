#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>

#include "ellipsotope/exponent.hpp"

namespace ellipsotope {

using Eigen::Index;

inline constexpr double kRankTolerance = 1e-10;

// E_p(G, c) = { c + G a : ||a||_p <= 1 }
struct Ellipsotope {
  Exponent p;
  Eigen::MatrixXd G;
  Eigen::VectorXd c;

  Ellipsotope(const Exponent& p, Eigen::MatrixXd G, Eigen::VectorXd c);
  Ellipsotope(const Exponent& p, Eigen::MatrixXd G);  // origin-centred

  static Ellipsotope zonotope(Eigen::MatrixXd G, Eigen::VectorXd c);
  static Ellipsotope ellipsoid(Eigen::MatrixXd G, Eigen::VectorXd c);
  static Ellipsotope vpolytope(Eigen::MatrixXd G, Eigen::VectorXd c);

  Index dimension() const { return G.rows(); }
  Index num_generators() const { return G.cols(); }
  bool is_nondegenerate(double rel_tol = kRankTolerance) const;
};

// P(Lambda, lambda) = { x : Lambda x <= lambda }
struct HPolyhedron {
  Eigen::MatrixXd Lambda;
  Eigen::VectorXd lambda;

  HPolyhedron(Eigen::MatrixXd Lambda, Eigen::VectorXd lambda);
  static HPolyhedron box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi);
  Index dimension() const { return Lambda.cols(); }
  bool contains(const Eigen::VectorXd& x, double tol = 0.0) const;
};

struct RankReport {
  Index rank = 0;
  Eigen::MatrixXd projector;  // rank x n, orthonormal rows spanning Im(H)
  Eigen::VectorXd singular_values;
};

RankReport rank_and_projection(const Eigen::MatrixXd& H, double rel_tol = kRankTolerance);

// Gauge of E_p(G, 0): min ||a||_p s.t. G a = x. Precomputes the
// factorisations so repeated evaluations only pay the per-point solve.
class EllipsotopeNorm {
 public:
  struct Value {
    double norm = 0.0;
    Eigen::VectorXd coefficients;  // minimiser a
    Eigen::VectorXd dual;          // y with ||G^T y||_{p*} <= 1 and y^T x = norm
  };

  EllipsotopeNorm(const Eigen::MatrixXd& G, const Exponent& p, double rel_tol = kRankTolerance);
  ~EllipsotopeNorm();
  EllipsotopeNorm(EllipsotopeNorm&&) noexcept;
  EllipsotopeNorm& operator=(EllipsotopeNorm&&) noexcept;

  bool in_range(const Eigen::VectorXd& x) const;
  // nullopt when x is outside the column space of G
  std::optional<double> operator()(const Eigen::VectorXd& x) const;
  std::optional<Value> evaluate(const Eigen::VectorXd& x) const;

  const RankReport& rank_report() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

std::optional<double> ellipsotope_norm(const Ellipsotope& E, const Eigen::VectorXd& x);
bool contains_point(const Ellipsotope& E, const Eigen::VectorXd& x, double tol = 0.0);
double support_function(const Ellipsotope& E, const Eigen::VectorXd& direction);
// lambda - (Lambda c + |Lambda G| 1); containment iff all entries >= 0
Eigen::VectorXd zonotope_in_polyhedron(const Ellipsotope& Z, const HPolyhedron& P);

enum class BallApproximation { inner, outer };
// inner: Z(G) inside the unit 2-ball; outer: unit 2-ball inside Z(G)
Eigen::MatrixXd unit_ball_zonotope(Index n, Index m, BallApproximation mode);

}  // namespace ellipsotope
