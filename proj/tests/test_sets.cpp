#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ellipsotope/norms.hpp"
#include "ellipsotope/rng.hpp"
#include "ellipsotope/sets.hpp"

using namespace ellipsotope;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

const Exponent kOne = Exponent::one();
const Exponent kTwo = Exponent::two();
const Exponent kInf = Exponent::infinity();

MatrixXd mat(std::initializer_list<std::initializer_list<double>> rows) {
  MatrixXd M(static_cast<Index>(rows.size()), static_cast<Index>(rows.begin()->size()));
  Index i = 0;
  for (auto& r : rows) {
    Index j = 0;
    for (double v : r) M(i, j++) = v;
    ++i;
  }
  return M;
}

VectorXd vec(std::initializer_list<double> v) {
  VectorXd x(static_cast<Index>(v.size()));
  Index i = 0;
  for (double e : v) x(i++) = e;
  return x;
}

// min ||a0 + t k||_p over t by dense bracketing plus golden section; the
// solution set of G a = x is one-dimensional when G has one more column than rows
double line_min(const VectorXd& a0, const VectorXd& k, const Exponent& p) {
  auto f = [&](double t) { return vector_norm(a0 + t * k, p); };
  double span = 10.0 * (1.0 + a0.cwiseAbs().maxCoeff()) / k.cwiseAbs().maxCoeff();
  double best_t = 0.0, best = f(0.0);
  const int grid = 4000;
  for (int i = -grid; i <= grid; ++i) {
    double t = span * i / grid;
    if (f(t) < best) best = f(t), best_t = t;
  }
  double lo = best_t - span / grid, hi = best_t + span / grid;
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 200; ++it) {
    double a = hi - phi * (hi - lo), b = lo + phi * (hi - lo);
    if (f(a) < f(b)) hi = b; else lo = a;
  }
  return std::min(best, f(0.5 * (lo + hi)));
}

}  // namespace

TEST(EllipsotopeType, Validation) {
  EXPECT_THROW(Ellipsotope(kTwo, MatrixXd(0, 0), VectorXd()), std::invalid_argument);
  EXPECT_THROW(Ellipsotope(kTwo, MatrixXd::Identity(2, 2), VectorXd::Zero(3)), std::invalid_argument);
  MatrixXd bad = MatrixXd::Identity(2, 2);
  bad(0, 1) = NAN;
  EXPECT_THROW(Ellipsotope(kTwo, bad, VectorXd::Zero(2)), std::invalid_argument);
  EXPECT_TRUE(Ellipsotope(kTwo, MatrixXd::Identity(2, 3)).is_nondegenerate());
  EXPECT_FALSE(Ellipsotope(kTwo, mat({{1, 1}, {1, 1}})).is_nondegenerate());
  EXPECT_FALSE(Ellipsotope(kTwo, MatrixXd::Identity(3, 2)).is_nondegenerate());
  EXPECT_THROW(HPolyhedron(MatrixXd::Identity(2, 2), VectorXd::Zero(3)), std::invalid_argument);
}

TEST(EllipsotopeNormExamples, ClosedForms) {
  EXPECT_NEAR(*ellipsotope_norm(Ellipsotope(kTwo, MatrixXd::Identity(2, 2)), vec({3, 4})), 5.0, 1e-12);
  EXPECT_NEAR(*ellipsotope_norm(Ellipsotope(kInf, MatrixXd::Identity(2, 2)), vec({3, 4})), 4.0, 1e-12);
  // alpha = G^{-1} x = (1, 1)
  MatrixXd G = mat({{1, 1}, {1, -1}});
  VectorXd alpha = G.fullPivLu().solve(vec({2, 0}));
  EXPECT_NEAR(*ellipsotope_norm(Ellipsotope(kInf, G), vec({2, 0})), alpha.cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(alpha.cwiseAbs().maxCoeff(), 1.0, 1e-12);
}

TEST(EllipsotopeNormExamples, Infeasible) {
  Ellipsotope E(kInf, mat({{1, 1}, {1, 1}}));
  EXPECT_FALSE(ellipsotope_norm(E, vec({1, 0})).has_value());
  EXPECT_NEAR(*ellipsotope_norm(E, vec({1, 1})), 0.5, 1e-8);
  Ellipsotope Z(kTwo, MatrixXd::Zero(2, 3));
  EXPECT_NEAR(*ellipsotope_norm(Z, VectorXd::Zero(2)), 0.0, 0.0);
  EXPECT_FALSE(ellipsotope_norm(Z, vec({1e-3, 0})).has_value());
  EXPECT_FALSE(contains_point(E, vec({1, 0}), 1.0));
}

TEST(EllipsotopeNormExamples, WideMatchesLineSearch) {
  CounterRng rng(11);
  for (double pv : {1.0, 1.5, 2.0, 3.0, double(INFINITY)}) {
    Exponent p = std::isinf(pv) ? kInf : Exponent(pv);
    for (int trial = 0; trial < 5; ++trial) {
      MatrixXd G = rng.normal_matrix(3, 4);
      VectorXd x = rng.normal_vector(3);
      VectorXd a0 = G.fullPivLu().solve(x);
      a0 = G.transpose() * (G * G.transpose()).ldlt().solve(x);
      VectorXd k = G.fullPivLu().kernel().col(0);
      double expect = line_min(a0, k, p);
      EllipsotopeNorm nrm(G, p);
      auto v = nrm.evaluate(x);
      ASSERT_TRUE(v.has_value());
      EXPECT_NEAR(v->norm, expect, 1e-6 * (1 + expect)) << p.to_string();
      // certificate: feasible minimiser and a dual vector attaining the value
      EXPECT_LT((G * v->coefficients - x).norm(), 1e-6);
      EXPECT_LE(vector_norm(G.transpose() * v->dual, p.conjugate()), 1.0 + 1e-12);
      EXPECT_NEAR(v->dual.dot(x), expect, 1e-6 * (1 + expect));
    }
  }
}

TEST(EllipsotopeNormProperties, NormAxioms) {
  CounterRng rng(5);
  for (double pv : {1.0, 1.3, 2.0, 4.0, double(INFINITY)}) {
    Exponent p = std::isinf(pv) ? kInf : Exponent(pv);
    for (int trial = 0; trial < 6; ++trial) {
      const Index n = rng.integer(1, 4), m = n + rng.integer(0, 3);
      MatrixXd G = rng.normal_matrix(n, m);
      EllipsotopeNorm nrm(G, p);
      VectorXd x = rng.normal_vector(n), y = rng.normal_vector(n);
      double nx = *nrm(x), ny = *nrm(y);
      double s = rng.uniform(-3, 3);
      EXPECT_NEAR(*nrm(s * x), std::abs(s) * nx, 1e-7 * (1 + nx));
      EXPECT_LE(*nrm(x + y), nx + ny + 1e-8 * (1 + nx + ny));
      VectorXd a = rng.normal_vector(m);
      EXPECT_LE(*nrm(G * a), vector_norm(a, p) + 1e-8 * (1 + vector_norm(a, p)));
    }
  }
}

TEST(EllipsotopeNormProperties, DegenerateProjection) {
  CounterRng rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    MatrixXd G = rng.normal_matrix(4, 2) * rng.normal_matrix(2, 5);
    VectorXd a = rng.normal_vector(5);
    for (const Exponent& p : {kOne, kTwo, kInf}) {
      EllipsotopeNorm nrm(G, p);
      EXPECT_EQ(nrm.rank_report().rank, 2);
      auto v = nrm(G * a);
      ASSERT_TRUE(v.has_value());
      EXPECT_LE(*v, vector_norm(a, p) + 1e-8);
      EXPECT_FALSE(nrm(G * a + 1e-3 * rng.normal_vector(4)).has_value());
    }
  }
}

TEST(ContainsPoint, Examples) {
  Ellipsotope B(kTwo, MatrixXd::Identity(2, 2));
  EXPECT_TRUE(contains_point(B, vec({1, 0}), 0.0));
  EXPECT_FALSE(contains_point(B, vec({1.1, 0}), 0.0));
  EXPECT_TRUE(contains_point(Ellipsotope(kInf, mat({{1, 1}, {1, -1}})), vec({2, 0}), 1e-12));
  EXPECT_THROW(contains_point(B, vec({1, 0, 0}), 0.0), std::invalid_argument);
}

TEST(ContainsPoint, SampledMembers) {
  CounterRng rng(21);
  for (double pv : {1.0, 2.0, 3.0, double(INFINITY)}) {
    Exponent p = std::isinf(pv) ? kInf : Exponent(pv);
    for (int trial = 0; trial < 4; ++trial) {
      const Index n = rng.integer(1, 3), m = n + rng.integer(0, 2);
      Ellipsotope E(p, rng.normal_matrix(n, m), rng.normal_vector(n));
      for (int s = 0; s < 5; ++s) {
        VectorXd a = rng.normal_vector(m);
        a /= vector_norm(a, p) * rng.uniform(1.0, 2.0);
        EXPECT_TRUE(contains_point(E, E.c + E.G * a, 1e-8));
      }
    }
  }
}

TEST(RankProjection, Examples) {
  RankReport r = rank_and_projection(mat({{1, 0}, {0, 0}}));
  EXPECT_EQ(r.rank, 1);
  EXPECT_NEAR(std::abs(r.projector(0, 0)), 1.0, 1e-14);
  EXPECT_NEAR(r.projector(0, 1), 0.0, 1e-14);
  r = rank_and_projection(MatrixXd::Identity(3, 3));
  EXPECT_EQ(r.rank, 3);
  EXPECT_LT((r.projector * r.projector.transpose() - MatrixXd::Identity(3, 3)).norm(), 1e-14);
  r = rank_and_projection(mat({{1, 1}, {1, 1}}));
  EXPECT_EQ(r.rank, 1);
  EXPECT_NEAR(r.singular_values(0), 2.0, 1e-14);
  EXPECT_NEAR(r.singular_values(1), 0.0, 1e-14);
  EXPECT_THROW(rank_and_projection(MatrixXd::Identity(2, 2), 0.0), std::invalid_argument);
  EXPECT_THROW(rank_and_projection(MatrixXd::Identity(2, 2), 1.0), std::invalid_argument);
}

TEST(RankProjection, OrthonormalAndSorted) {
  CounterRng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = rng.integer(1, 6), k = rng.integer(1, n);
    MatrixXd H = rng.normal_matrix(n, k) * rng.normal_matrix(k, rng.integer(k, 7));
    RankReport r = rank_and_projection(H);
    EXPECT_EQ(r.rank, k);
    EXPECT_LT((r.projector * r.projector.transpose() - MatrixXd::Identity(k, k)).norm(), 1e-12);
    for (Index i = 1; i < r.singular_values.size(); ++i) EXPECT_GE(r.singular_values(i - 1), r.singular_values(i));
    // H is unchanged by projecting onto its own range
    EXPECT_LT((r.projector.transpose() * r.projector * H - H).norm(), 1e-10 * (1 + H.norm()));
  }
}

TEST(SupportFunction, Examples) {
  EXPECT_NEAR(support_function(Ellipsotope(kTwo, MatrixXd::Identity(2, 2)), vec({1, 0})), 1.0, 1e-15);
  EXPECT_NEAR(support_function(Ellipsotope(kInf, MatrixXd::Identity(2, 2), vec({1, 1})), vec({1, 1})), 4.0, 1e-15);
  CounterRng rng(4);
  MatrixXd G = rng.normal_matrix(3, 5);
  VectorXd l = rng.normal_vector(3);
  double expect = 0.0;
  for (Index j = 0; j < 5; ++j) expect = std::max(expect, std::abs(G.col(j).dot(l)));
  EXPECT_NEAR(support_function(Ellipsotope(kOne, G), l), expect, 1e-14);
}

TEST(SupportFunction, CentralSymmetryAndSampling) {
  CounterRng rng(8);
  for (double pv : {1.0, 1.5, 2.0, 5.0, double(INFINITY)}) {
    Exponent p = std::isinf(pv) ? kInf : Exponent(pv);
    Ellipsotope E(p, rng.normal_matrix(3, 4), rng.normal_vector(3));
    Ellipsotope R(p, -E.G, E.c);
    for (int s = 0; s < 10; ++s) {
      VectorXd l = rng.normal_vector(3);
      double h = support_function(E, l);
      EXPECT_NEAR(h, support_function(R, -l) + 2 * l.dot(E.c), 1e-12 * (1 + std::abs(h)));
      VectorXd a = rng.normal_vector(4);
      a /= vector_norm(a, p);
      EXPECT_LE(l.dot(E.c + E.G * a), h + 1e-12 * (1 + std::abs(h)));
    }
  }
}

TEST(ZonotopeInPolyhedron, Examples) {
  Ellipsotope Z = Ellipsotope::zonotope(MatrixXd::Identity(2, 2), VectorXd::Zero(2));
  VectorXd m = zonotope_in_polyhedron(Z, HPolyhedron::box(-2 * VectorXd::Ones(2), 2 * VectorXd::Ones(2)));
  EXPECT_LT((m - VectorXd::Ones(4)).norm(), 1e-15);
  m = zonotope_in_polyhedron(Z, HPolyhedron::box(-VectorXd::Ones(2), VectorXd::Ones(2)));
  EXPECT_LT(m.norm(), 1e-15);
  Ellipsotope Zs = Ellipsotope::zonotope(MatrixXd::Identity(2, 2), vec({3, 0}));
  m = zonotope_in_polyhedron(Zs, HPolyhedron::box(-VectorXd::Ones(2), VectorXd::Ones(2)));
  EXPECT_LT(m(0), 0.0);  // x1 <= 1 face
  EXPECT_THROW(zonotope_in_polyhedron(Ellipsotope(kTwo, MatrixXd::Identity(2, 2)),
                                      HPolyhedron::box(-VectorXd::Ones(2), VectorXd::Ones(2))),
               std::invalid_argument);
  EXPECT_THROW(zonotope_in_polyhedron(Z, HPolyhedron::box(-VectorXd::Ones(3), VectorXd::Ones(3))),
               std::invalid_argument);
}

TEST(UnitBallZonotope, Examples) {
  EXPECT_LT((unit_ball_zonotope(2, 2, BallApproximation::outer) - MatrixXd::Identity(2, 2)).norm(), 1e-14);
  MatrixXd g = unit_ball_zonotope(1, 1, BallApproximation::inner);
  EXPECT_NEAR(g(0, 0), 1.0, 1e-15);
  EXPECT_THROW(unit_ball_zonotope(3, 2, BallApproximation::inner), std::invalid_argument);

  // 4 generators at 45 degree steps; largest vertex by explicit enumeration
  MatrixXd G = unit_ball_zonotope(2, 4, BallApproximation::inner);
  double vmax = 0.0;
  for (int mask = 0; mask < 16; ++mask) {
    VectorXd s(4);
    for (int j = 0; j < 4; ++j) s(j) = (mask >> j) & 1 ? 1.0 : -1.0;
    vmax = std::max(vmax, (G * s).norm());
  }
  EXPECT_NEAR(vmax, 1.0, 1e-12);
  for (int j = 0; j < 4; ++j) {
    double ang = std::atan2(G(1, j), G(0, j));
    EXPECT_NEAR(ang, std::numbers::pi * j / 4.0, 1e-12);
  }
  EXPECT_NEAR(G.col(0).norm(), G.col(3).norm(), 1e-14);
}

TEST(UnitBallZonotope, InnerAndOuterVerified) {
  CounterRng rng(13);
  for (auto [n, m] : std::vector<std::pair<Index, Index>>{{2, 2}, {2, 5}, {3, 3}, {3, 6}, {4, 8}, {5, 5}, {6, 9}}) {
    MatrixXd Gi = unit_ball_zonotope(n, m, BallApproximation::inner);
    MatrixXd Go = unit_ball_zonotope(n, m, BallApproximation::outer);
    EXPECT_EQ(Gi.cols(), m);
    for (int s = 0; s < 300; ++s) {
      VectorXd l = rng.sphere(n);
      // inner: support value of Z at most that of the unit ball
      EXPECT_LE((Gi.transpose() * l).cwiseAbs().sum(), 1.0 + 1e-10);
      // outer: support value of Z at least 1
      EXPECT_GE((Go.transpose() * l).cwiseAbs().sum(), 1.0 - 1e-10);
      // a boundary point of the ball lies in the outer zonotope
      EXPECT_TRUE(contains_point(Ellipsotope(kInf, Go), l, 1e-7));
    }
  }
}
