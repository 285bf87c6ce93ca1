#include "ellipsotope/sets.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ellipsotope/norms.hpp"

namespace ellipsotope {

using Eigen::MatrixXd;
using Eigen::VectorXd;

Ellipsotope::Ellipsotope(const Exponent& p_, MatrixXd G_, VectorXd c_) : p(p_), G(std::move(G_)), c(std::move(c_)) {
  // check dimensions
  if (G.rows() < 1 || G.cols() < 1) throw std::invalid_argument("Ellipsotope: generator matrix must be nonempty.");
  if (c.size() != G.rows()) throw std::invalid_argument("Ellipsotope: inconsistent dimensions.");
  if (!G.allFinite() || !c.allFinite()) throw std::invalid_argument("Ellipsotope: entries must be finite.");
}

Ellipsotope::Ellipsotope(const Exponent& p_, MatrixXd G_) : Ellipsotope(p_, G_, VectorXd::Zero(G_.rows())) {}

Ellipsotope Ellipsotope::zonotope(MatrixXd G, VectorXd c) { return {Exponent::infinity(), std::move(G), std::move(c)}; }
Ellipsotope Ellipsotope::ellipsoid(MatrixXd G, VectorXd c) { return {Exponent::two(), std::move(G), std::move(c)}; }
Ellipsotope Ellipsotope::vpolytope(MatrixXd G, VectorXd c) { return {Exponent::one(), std::move(G), std::move(c)}; }

bool Ellipsotope::is_nondegenerate(double rel_tol) const {
  return G.rows() <= G.cols() && rank_and_projection(G, rel_tol).rank == G.rows();
}

HPolyhedron::HPolyhedron(MatrixXd L, VectorXd l) : Lambda(std::move(L)), lambda(std::move(l)) {
  if (Lambda.rows() != lambda.size()) throw std::invalid_argument("HPolyhedron: inconsistent dimensions.");
}

HPolyhedron HPolyhedron::box(const VectorXd& lo, const VectorXd& hi) {
  const Index n = lo.size();
  if (hi.size() != n) throw std::invalid_argument("HPolyhedron: inconsistent dimensions.");
  MatrixXd L(2 * n, n);
  L << MatrixXd::Identity(n, n), -MatrixXd::Identity(n, n);
  VectorXd l(2 * n);
  l << hi, -lo;
  return {L, l};
}

bool HPolyhedron::contains(const VectorXd& x, double tol) const {
  if (x.size() != dimension()) throw std::invalid_argument("HPolyhedron: inconsistent dimensions.");
  return ((Lambda * x - lambda).array() <= tol).all();
}

RankReport rank_and_projection(const MatrixXd& H, double rel_tol) {
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw std::invalid_argument("rank_and_projection: tolerance must lie in (0, 1).");
  RankReport rep;
  const Index n = H.rows();
  if (H.size() == 0) {
    rep.projector.resize(0, n);
    return rep;
  }
  Eigen::JacobiSVD<MatrixXd> svd(H, Eigen::ComputeFullU);
  rep.singular_values = svd.singularValues();
  const double smax = rep.singular_values.size() > 0 ? rep.singular_values(0) : 0.0;
  for (Index i = 0; i < rep.singular_values.size(); ++i)
    if (smax > 0 && rep.singular_values(i) > rel_tol * smax) ++rep.rank;
  rep.projector = svd.matrixU().leftCols(rep.rank).transpose();
  return rep;
}

std::optional<double> ellipsotope_norm(const Ellipsotope& E, const VectorXd& x) {
  if (x.size() != E.dimension()) throw std::invalid_argument("ellipsotope_norm: inconsistent dimensions.");
  return EllipsotopeNorm(E.G, E.p)(x);
}

bool contains_point(const Ellipsotope& E, const VectorXd& x, double tol) {
  if (x.size() != E.dimension()) throw std::invalid_argument("contains_point: inconsistent dimensions.");
  auto v = ellipsotope_norm(E, x - E.c);
  return v.has_value() && *v <= 1.0 + tol;
}

double support_function(const Ellipsotope& E, const VectorXd& l) {
  if (l.size() != E.dimension()) throw std::invalid_argument("support_function: inconsistent dimensions.");
  return l.dot(E.c) + vector_norm(E.G.transpose() * l, E.p.conjugate());
}

VectorXd zonotope_in_polyhedron(const Ellipsotope& Z, const HPolyhedron& P) {
  if (!Z.p.is_infinite()) throw std::invalid_argument("zonotope_in_polyhedron: inbody must be a zonotope.");
  if (P.dimension() != Z.dimension()) throw std::invalid_argument("zonotope_in_polyhedron: inconsistent dimensions.");
  return P.lambda - (P.Lambda * Z.c + (P.Lambda * Z.G).cwiseAbs().rowwise().sum());
}

namespace {

MatrixXd template_directions(Index n, Index m) {
  MatrixXd D = MatrixXd::Zero(n, m);
  if (n == 1) {
    D.setOnes();
    return D;
  }
  if (n == 2) {
    for (Index j = 0; j < m; ++j) {
      double th = std::numbers::pi * static_cast<double>(j) / static_cast<double>(m);
      D(0, j) = std::cos(th);
      D(1, j) = std::sin(th);
    }
    return D;
  }
  // coordinate axes, then rotations inside consecutive coordinate planes
  D.leftCols(n) = MatrixXd::Identity(n, n);
  const Index extra = m - n, planes = n - 1;
  std::vector<Index> per_plane(static_cast<size_t>(planes), 0);
  for (Index k = 0; k < extra; ++k) ++per_plane[static_cast<size_t>(k % planes)];
  std::vector<Index> used(static_cast<size_t>(planes), 0);
  for (Index k = 0; k < extra; ++k) {
    const Index plane = k % planes;
    const Index cnt = per_plane[static_cast<size_t>(plane)];
    const Index t = used[static_cast<size_t>(plane)]++;
    double th = std::numbers::pi / 4.0 + std::numbers::pi * static_cast<double>(t) / static_cast<double>(std::max<Index>(cnt, 2));
    D(plane, n + k) = std::cos(th);
    D(plane + 1, n + k) = std::sin(th);
  }
  return D;
}

// largest vertex 2-norm of Z(D); exact by enumeration for few generators
double max_vertex_norm(const MatrixXd& D) {
  const Index m = D.cols();
  if (m <= 20) return operator_norm(D, Exponent::infinity(), Exponent::two()).value;
  return std::sqrt(static_cast<double>(m)) * Eigen::JacobiSVD<MatrixXd>(D).singularValues()(0);
}

// radius of the largest centred ball inside Z(D) (a lower bound when the
// facet enumeration would be too large)
double inradius(const MatrixXd& D) {
  const Index n = D.rows(), m = D.cols();
  if (n == 1) return D.cwiseAbs().sum();
  // facets are spanned by n-1 generators
  double count = 1.0;
  for (Index k = 0; k < n - 1; ++k) count = count * static_cast<double>(m - k) / static_cast<double>(k + 1);
  if (count <= 2e5) {
    double best = std::numeric_limits<double>::infinity();
    std::vector<Index> idx(static_cast<size_t>(n - 1));
    for (Index k = 0; k < n - 1; ++k) idx[static_cast<size_t>(k)] = k;
    while (true) {
      MatrixXd S(n, n - 1);
      for (Index k = 0; k < n - 1; ++k) S.col(k) = D.col(idx[static_cast<size_t>(k)]);
      Eigen::FullPivLU<MatrixXd> lu(S.transpose());
      if (lu.rank() == n - 1) {
        VectorXd l = lu.kernel().col(0).normalized();
        best = std::min(best, (D.transpose() * l).cwiseAbs().sum());
      }
      Index k = n - 2;
      while (k >= 0 && idx[static_cast<size_t>(k)] == m - (n - 1) + k) --k;
      if (k < 0) break;
      ++idx[static_cast<size_t>(k)];
      for (Index j = k + 1; j < n - 1; ++j) idx[static_cast<size_t>(j)] = idx[static_cast<size_t>(j - 1)] + 1;
    }
    return best;
  }
  // Z(D) contains the parallelotope of any n independent generators
  Eigen::JacobiSVD<MatrixXd> svd(D.leftCols(n));
  return svd.singularValues()(n - 1);
}

}  // namespace

MatrixXd unit_ball_zonotope(Index n, Index m, BallApproximation mode) {
  if (n < 1 || m < n) throw std::invalid_argument("unit_ball_zonotope: need m >= n >= 1.");
  MatrixXd D = template_directions(n, m);
  if (mode == BallApproximation::inner) return D / max_vertex_norm(D);
  return D / inradius(D);
}

}  // namespace ellipsotope
