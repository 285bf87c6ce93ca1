#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ellipsotope/containment.hpp"
#include "ellipsotope/rng.hpp"

using namespace ellipsotope;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

const Exponent kOne = Exponent::one();
const Exponent kTwo = Exponent::two();
const Exponent kInf = Exponent::infinity();

MatrixXd example_generators() {
  MatrixXd G(2, 8);
  G << 40, -54, 44, 98, -30, 12, -20, 62, -42, 12, -14, 38, 46, 88, 48, 64;
  return G / 100.0;
}

VectorXd vec2(double a, double b) {
  VectorXd v(2);
  v << a, b;
  return v;
}

// k-th root of E|N(0,1)|^k from the Gamma function, independent of the library
double gamma_moment(double k) {
  return std::pow(std::pow(2.0, k / 2.0) * std::tgamma((k + 1.0) / 2.0) / std::sqrt(std::numbers::pi), 1.0 / k);
}

MatrixXd well_conditioned(CounterRng& rng, Index n, Index l) {
  MatrixXd H = rng.normal_matrix(n, l);
  H.leftCols(std::min(n, l)) += 2.0 * MatrixXd::Identity(n, std::min(n, l));
  return H;
}

}  // namespace

TEST(ContainmentRadius, Examples) {
  Ellipsotope B(kTwo, MatrixXd::Identity(2, 2));
  auto r = containment_radius(B, B);
  EXPECT_NEAR(r.r_lower, 1.0, 1e-7);
  EXPECT_NEAR(r.r_upper, 1.0, 1e-7);

  r = containment_radius(Ellipsotope(kInf, MatrixXd::Identity(2, 2)), Ellipsotope(kInf, 2 * MatrixXd::Identity(2, 2)));
  EXPECT_NEAR(r.r_lower, 0.5, 1e-7);
  EXPECT_NEAR(r.r_upper, 0.5, 1e-7);
  EXPECT_EQ(r.verdict, Verdict::contained);

  MatrixXd h(2, 1);
  h << 1, 0;
  r = containment_radius(Ellipsotope(kTwo, MatrixXd::Identity(2, 2), vec2(1, 0)), Ellipsotope(kTwo, h));
  EXPECT_TRUE(std::isinf(r.r_lower));
  EXPECT_TRUE(std::isinf(r.r_upper));
  EXPECT_EQ(r.verdict, Verdict::not_contained);
  EXPECT_EQ(r.method, Method::degenerate);

  EXPECT_THROW(containment_radius(B, Ellipsotope(kTwo, MatrixXd::Identity(3, 3))), std::invalid_argument);
}

TEST(ContainmentRadius, DegenerateProjectionPreservesRadius) {
  CounterRng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    // both bodies inside a random 2-plane of R^3
    MatrixXd B = rng.normal_matrix(3, 2);
    MatrixXd Gi = B * rng.normal_matrix(2, 4), Hc = B * well_conditioned(rng, 2, 3);
    VectorXd c = B * rng.normal_vector(2), d = B * rng.normal_vector(2);
    Exponent q = trial % 2 ? kTwo : kInf;
    auto r = containment_radius(Ellipsotope(kInf, Gi, c), Ellipsotope(q, Hc, d));
    double exact = radius_bruteforce(Ellipsotope(kInf, Gi, c), Ellipsotope(q, Hc, d)).value;
    EXPECT_LE(r.r_lower, exact * (1 + 1e-6) + 1e-9);
    EXPECT_GE(r.r_upper, exact * (1 - 1e-6) - 1e-9);
    // leaving the plane gives an infinite radius
    Eigen::Vector3d b0 = B.col(0), b1 = B.col(1);
    VectorXd off = b0.cross(b1);
    auto r2 = containment_radius(Ellipsotope(kInf, Gi, c + 1e-3 * off), Ellipsotope(q, Hc, d));
    EXPECT_TRUE(std::isinf(r2.r_lower));
  }
}

TEST(VPoly, Examples) {
  const VectorXd z = VectorXd::Zero(2);
  EXPECT_NEAR(radius_vpoly_in_ellipsotope(MatrixXd::Identity(2, 2), z, MatrixXd::Identity(2, 2), z, kTwo).r_upper, 1.0, 1e-14);
  EXPECT_NEAR(radius_vpoly_in_ellipsotope(2 * MatrixXd::Identity(2, 2), z, MatrixXd::Identity(2, 2), z, kTwo).r_upper, 2.0, 1e-14);
  // the four vertices +-e_i + (1,0): largest is (2,0)
  double expect = 0.0;
  for (VectorXd v : {vec2(2, 0), vec2(0, 0), vec2(1, 1), vec2(1, -1)}) expect = std::max(expect, v.norm());
  auto r = radius_vpoly_in_ellipsotope(MatrixXd::Identity(2, 2), vec2(1, 0), MatrixXd::Identity(2, 2), z, kTwo);
  EXPECT_NEAR(r.r_upper, expect, 1e-14);
  EXPECT_NEAR(r.r_lower, 2.0, 1e-14);
  EXPECT_TRUE(r.exact);
  EXPECT_EQ(r.witness.alpha(0), 1.0);
}

TEST(EllipsoidSdp, Examples) {
  const VectorXd z = VectorXd::Zero(2);
  EXPECT_NEAR(radius_ellipsoid_in_ellipsoid(MatrixXd::Identity(2, 2), z, 2 * MatrixXd::Identity(2, 2), z).r_upper, 0.5, 1e-7);
  // aligned case: (||theta|| + ||Theta||) = (1 + 1) / 2
  auto r = radius_ellipsoid_in_ellipsoid(MatrixXd::Identity(2, 2), vec2(1, 0), 2 * MatrixXd::Identity(2, 2), z);
  EXPECT_NEAR(r.r_upper, 1.0, 1e-7);
  EXPECT_NEAR(r.r_upper, quadratic_over_ball(0.5 * MatrixXd::Identity(2, 2), vec2(0.5, 0)).value, 1e-7);
  MatrixXd D = MatrixXd::Zero(2, 2);
  D(0, 0) = 1;
  D(1, 1) = 2;
  EXPECT_NEAR(radius_ellipsoid_in_ellipsoid(D, z, MatrixXd::Identity(2, 2), z).r_upper, 2.0, 1e-7);
}

TEST(EllipsoidSdp, MatchesEigenOracle) {
  CounterRng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = rng.integer(1, 4), m = rng.integer(1, 5), l = n + rng.integer(0, 2);
    MatrixXd G = rng.normal_matrix(n, m), H = well_conditioned(rng, n, l);
    VectorXd c = rng.normal_vector(n), d = trial % 3 ? rng.normal_vector(n) : c;
    auto r = radius_ellipsoid_in_ellipsoid(G, c, H, d);
    MatrixXd Hp = H.completeOrthogonalDecomposition().pseudoInverse();
    double oracle = quadratic_over_ball(Hp * G, Hp * (c - d)).value;
    EXPECT_NEAR(r.r_upper * r.r_upper, oracle * oracle, 1e-6 * std::max(1.0, oracle * oracle)) << trial;
  }
}

TEST(CenterReduction, Examples) {
  MatrixXd G = MatrixXd::Identity(2, 2);
  EXPECT_EQ(center_reduction(G, vec2(1, 1), vec2(1, 1)).cols(), 2);
  MatrixXd expect(2, 3);
  expect << 1, 0, 1, 0, 1, 0;
  EXPECT_EQ(center_reduction(G, vec2(1, 0), vec2(0, 0)), expect);
  CounterRng rng(19);
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = rng.integer(1, 3), m = rng.integer(1, 7);
    MatrixXd Gr = rng.normal_matrix(n, m), H = well_conditioned(rng, n, n + 1);
    VectorXd c = rng.normal_vector(n), d = rng.normal_vector(n);
    Exponent q = trial % 2 ? kTwo : Exponent(1.5);
    double shifted = radius_bruteforce_zonotope_inbody(Gr, c, H, d, q).value;
    double reduced = radius_bruteforce_zonotope_inbody(center_reduction(Gr, c, d), VectorXd::Zero(n), H,
                                                       VectorXd::Zero(n), q).value;
    EXPECT_NEAR(shifted, reduced, 1e-6 * (1 + shifted));
  }
}

TEST(LinearRelaxation, Examples) {
  MatrixXd H(2, 2);
  H << 2, 1, -1, 3;
  auto lr = lr_relaxation(H, H, kInf);
  EXPECT_NEAR(lr.value, 1.0, 1e-7);
  EXPECT_LT((lr.X - MatrixXd::Identity(2, 2)).norm(), 1e-6);

  MatrixXd G(2, 2);
  G << 1, 1, 1, -1;
  lr = lr_relaxation(G, MatrixXd::Identity(2, 2), kInf);
  EXPECT_NEAR(lr.value, G.cwiseAbs().rowwise().sum().maxCoeff(), 1e-7);
  auto dual = lr_dual(G, MatrixXd::Identity(2, 2), kInf);
  EXPECT_NEAR(dual.value, 2.0, 1e-7);

  // upper bound on the exact value 3.67
  double exact = radius_bruteforce_zonotope_inbody(example_generators(), VectorXd::Zero(2), MatrixXd::Identity(2, 2),
                                                   VectorXd::Zero(2), kTwo).value;
  EXPECT_NEAR(exact, 3.67, 0.005);
  lr = lr_relaxation(example_generators(), MatrixXd::Identity(2, 2), kTwo);
  EXPECT_GE(lr.value, exact - 1e-7);

  MatrixXd Hd(2, 2);
  Hd << 1, 1, 1, 1;
  EXPECT_THROW(lr_relaxation(G, Hd, kInf), std::invalid_argument);
}

TEST(LinearRelaxation, DualExamples) {
  for (Index n : {1, 2, 3, 4}) {
    MatrixXd I = MatrixXd::Identity(n, n);
    auto d = lr_dual(I, I, kInf);
    EXPECT_NEAR(d.Y.trace(), 1.0, 1e-7);
    // Y = I/n is feasible: rows of H^T Y have max entry 1/n, summed they give 1
    MatrixXd Y = I / static_cast<double>(n);
    EXPECT_NEAR((I.transpose() * Y).cwiseAbs().rowwise().maxCoeff().sum(), 1.0, 1e-15);
    EXPECT_NEAR(Y.trace(), lr_relaxation(I, I, kInf).value, 1e-7);
  }
  conic::SolverSettings tight;
  tight.feas_tol = tight.gap_tol = 1e-10;
  CounterRng rng(29);
  for (int trial = 0; trial < 15; ++trial) {
    const Index n = rng.integer(1, 3), m = rng.integer(1, 5), l = n + rng.integer(0, 2);
    MatrixXd H = well_conditioned(rng, n, l);
    for (const Exponent& q : {kTwo, kInf, kOne}) {
      // rank-one inbody
      MatrixXd G = rng.normal_vector(n) * rng.normal_vector(m).cwiseSign().transpose();
      if (trial % 2) G = rng.normal_matrix(n, m);
      double primal = lr_relaxation(G, H, q, tight).value;
      auto dual = lr_dual(G, H, q, tight);
      EXPECT_NEAR(primal, dual.value, 1e-8 * std::max(1.0, primal)) << trial << " q=" << q.value();
      // weak duality for a random feasible Y
      MatrixXd Yr = rng.normal_matrix(n, m);
      Yr /= vector_norm((H.transpose() * Yr).cwiseAbs().rowwise().maxCoeff(), q.conjugate());
      EXPECT_LE((G.transpose() * Yr).trace(), primal + 1e-9);
    }
  }
}

TEST(LinearRelaxation, CertificateExamples) {
  VectorXd y(3);
  y << 1, -2, 0.5;
  VectorXd s(4);
  s << 1, -1, -1, 1;
  EXPECT_TRUE(lr_exactness_certificate(y * s.transpose(), 1e-6));
  EXPECT_FALSE(lr_exactness_certificate(MatrixXd::Identity(2, 2), 1e-6));
  CounterRng rng(37);
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = rng.integer(1, 4), m = rng.integer(1, 8);
    MatrixXd G = rng.normal_matrix(n, m), H = well_conditioned(rng, n, n);
    auto dual = lr_dual(G, H, kInf);
    EXPECT_TRUE(lr_exactness_certificate(dual.Y, 1e-6)) << trial;
    double lr = lr_relaxation(G, H, kInf).value;
    double exact = radius_bruteforce_zonotope_inbody(G, VectorXd::Zero(n), H, VectorXd::Zero(n), kInf).value;
    EXPECT_NEAR(lr, exact, 1e-6 * (1 + exact));
  }
}

TEST(Zsr, Examples) {
  auto z = zsr_relaxation(example_generators(), MatrixXd::Identity(2, 2), kTwo);
  EXPECT_NEAR(z.value, 3.89, 0.02);
  double exact = radius_bruteforce_zonotope_inbody(example_generators(), VectorXd::Zero(2), MatrixXd::Identity(2, 2),
                                                   VectorXd::Zero(2), kTwo).value;
  EXPECT_LE(std::sqrt(2.0 / std::numbers::pi) * z.value, exact + 1e-7);

  z = zsr_relaxation(MatrixXd::Identity(2, 2), MatrixXd::Identity(2, 2), kTwo);
  EXPECT_GE(z.value, std::sqrt(2.0) - 1e-7);
  EXPECT_LE(z.value, std::sqrt(2.0) * gamma_moment(2) / gamma_moment(1) + 1e-7);
  EXPECT_THROW(zsr_relaxation(MatrixXd::Identity(2, 2), MatrixXd::Identity(2, 2), kInf), std::invalid_argument);
  EXPECT_THROW(zsr_relaxation(MatrixXd::Identity(2, 2), MatrixXd::Identity(2, 2), Exponent(3.0)), std::invalid_argument);
}

TEST(Zsr, SandwichAgainstOracle) {
  CounterRng rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = rng.integer(1, 3), m = rng.integer(1, 8), l = n + rng.integer(0, 2);
    MatrixXd G = rng.normal_matrix(n, m), H = well_conditioned(rng, n, l);
    const double qv = trial % 2 ? 2.0 : 1.5;
    Exponent q(qv);
    double z = zsr_relaxation(G, H, q).value;
    double exact = radius_bruteforce_zonotope_inbody(G, VectorXd::Zero(n), H, VectorXd::Zero(n), q).value;
    double ratio = gamma_moment(qv / (qv - 1.0)) / gamma_moment(1.0);
    EXPECT_GE(z, exact * (1 - 1e-6) - 1e-9) << trial;
    EXPECT_LE(z, ratio * exact * (1 + 1e-6) + 1e-9) << trial;
  }
}

TEST(Sr, Examples) {
  for (Index n : {1, 2, 3}) {
    MatrixXd I = MatrixXd::Identity(n, n);
    EXPECT_NEAR(sr_relaxation(I, I, kTwo, kTwo).value, 1.0, 1e-6);
  }
  CounterRng rng(43);
  for (int trial = 0; trial < 10; ++trial) {
    MatrixXd G = rng.normal_matrix(2, 3), H = well_conditioned(rng, 2, 3);
    Exponent p(3.0), q(1.5);
    double sr = sr_relaxation(G, H, p, q).value;
    double lam = rng.uniform(0.2, 5.0);
    EXPECT_NEAR(sr_relaxation(lam * G, H, p, q).value, lam * sr, 1e-6 * lam * sr);
    OracleBudget b;
    b.seed = static_cast<std::uint64_t>(trial);
    double lb = radius_sampling_lower_bound(Ellipsotope(p, G), Ellipsotope(q, H), b).value;
    EXPECT_LE(lb, sr * (1 + 1e-6));
    EXPECT_LE(sr, gamma_moment(3.0) * gamma_moment(3.0) * lb * (1 + 1e-6));
  }
  EXPECT_THROW(sr_relaxation(MatrixXd::Identity(2, 2), MatrixXd::Identity(2, 2), Exponent(1.5), kTwo), std::invalid_argument);
  EXPECT_THROW(sr_relaxation(MatrixXd::Identity(2, 2), MatrixXd::Identity(2, 2), kInf, kTwo), std::invalid_argument);
  EXPECT_THROW(sr_relaxation(MatrixXd::Identity(2, 2), MatrixXd::Identity(2, 2), Exponent(3.0), kInf), std::invalid_argument);
  ContainmentOptions o;
  o.method = Method::sr;
  EXPECT_THROW(containment_radius(Ellipsotope(Exponent(3.0), MatrixXd::Identity(2, 2), vec2(1, 0)),
                                  Ellipsotope(kTwo, MatrixXd::Identity(2, 2)), o),
               std::invalid_argument);
}

TEST(Fallback, Examples) {
  for (double pv : {3.0, 1.5, 6.0}) {
    Ellipsotope E(Exponent(pv), MatrixXd::Identity(3, 3));
    auto r = norm_equivalence_fallback(E, E);
    EXPECT_LE(r.r_lower, 1.0 + 1e-7);
    EXPECT_GE(r.r_upper, 1.0 - 1e-7);
  }
  // p = 4 against the exact p = 2 value: widening m^(1/2 - 1/4) on the inbody side
  CounterRng rng(47);
  MatrixXd G = rng.normal_matrix(2, 4), H = well_conditioned(rng, 2, 2);
  auto r = norm_equivalence_fallback(Ellipsotope(Exponent(4.0), G), Ellipsotope(kTwo, H));
  double r22 = radius_ellipsoid_in_ellipsoid(G, VectorXd::Zero(2), H, VectorXd::Zero(2)).r_upper;
  EXPECT_LE(r.r_upper, r22 * std::pow(4.0, 0.25) * (1 + 1e-6));
  EXPECT_GE(r.r_upper, r22 * (1 - 1e-6));
}

TEST(Fallback, ContainsSamplingValue) {
  CounterRng rng(53);
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = rng.integer(1, 3), m = rng.integer(1, 4);
    std::vector<double> ps = {1.5, 3.0, 2.5}, qs = {3.0, 4.0, 1.3};
    Exponent p(ps[static_cast<size_t>(trial % 3)]), q(qs[static_cast<size_t>((trial / 3) % 3)]);
    Ellipsotope in(p, rng.normal_matrix(n, m), trial % 2 ? rng.normal_vector(n) : VectorXd::Zero(n));
    Ellipsotope out(q, well_conditioned(rng, n, n + 1), VectorXd::Zero(n));
    auto r = norm_equivalence_fallback(in, out);
    OracleBudget b;
    b.seed = 1000 + static_cast<std::uint64_t>(trial);
    double lb = radius_sampling_lower_bound(in, out, b).value;
    EXPECT_LE(r.r_lower, r.r_upper);
    EXPECT_LE(lb, r.r_upper * (1 + 1e-6)) << trial;
    EXPECT_GE(r.r_upper, r.r_lower);
  }
}

TEST(ContainmentInvariants, OracleInsideBoundsForEveryMethod) {
  CounterRng rng(59);
  for (int trial = 0; trial < 40; ++trial) {
    const Index n = rng.integer(1, 3), m = rng.integer(1, 7), l = n + rng.integer(0, 2);
    Ellipsotope Z(kInf, rng.normal_matrix(n, m), rng.normal_vector(n));
    std::vector<Exponent> qs = {kOne, Exponent(1.5), kTwo, Exponent(3.0), kInf};
    Exponent q = qs[static_cast<size_t>(trial % 5)];
    Ellipsotope E(q, well_conditioned(rng, n, l), trial % 2 ? rng.normal_vector(n) : Z.c);
    double exact = radius_bruteforce(Z, E).value;
    for (Method m : {Method::automatic, Method::lr, Method::fallback}) {
      ContainmentOptions o;
      o.method = m;
      auto r = containment_radius(Z, E, o);
      EXPECT_LE(r.r_lower, r.r_upper);
      EXPECT_LE(r.r_lower, exact * (1 + 1e-6) + 1e-9) << trial << " " << to_string(m);
      EXPECT_GE(r.r_upper, exact * (1 - 1e-6) - 1e-9) << trial << " " << to_string(m);
    }
  }
}

TEST(ContainmentInvariants, LrSandwich) {
  CounterRng rng(61);
  for (int trial = 0; trial < 40; ++trial) {
    const Index n = rng.integer(1, 3), m = rng.integer(1, 8), l = n + rng.integer(0, 2);
    MatrixXd G = rng.normal_matrix(n, m), H = well_conditioned(rng, n, l);
    const bool two = trial % 2;
    double lr = lr_relaxation(G, H, two ? kTwo : kInf).value;
    double exact = radius_bruteforce_zonotope_inbody(G, VectorXd::Zero(n), H, VectorXd::Zero(n), two ? kTwo : kInf).value;
    double factor = gamma_moment(two ? 2.0 : 1.0) * std::sqrt(static_cast<double>(m)) / gamma_moment(1.0);
    EXPECT_GE(lr, exact * (1 - 1e-6) - 1e-9);
    EXPECT_LE(lr, factor * exact * (1 + 1e-6) + 1e-9);
  }
}

TEST(ContainmentInvariants, HomogeneityAndScaling) {
  CounterRng rng(67);
  for (int trial = 0; trial < 15; ++trial) {
    const Index n = rng.integer(1, 3);
    std::vector<Exponent> ps = {kOne, kTwo, kInf};
    Exponent p = ps[static_cast<size_t>(trial % 3)], q = trial % 2 ? kTwo : kInf;
    Ellipsotope in(p, rng.normal_matrix(n, 3), rng.normal_vector(n));
    Ellipsotope out(q, well_conditioned(rng, n, n), in.c);
    ContainmentOptions o;
    o.sampling_lower_bound = false;
    auto r = containment_radius(in, out, o);
    const double lam = rng.uniform(0.3, 3.0);
    auto rs = containment_radius(Ellipsotope(p, lam * in.G, in.c), out, o);
    EXPECT_NEAR(rs.r_upper, lam * r.r_upper, 1e-6 * lam * r.r_upper);
    EXPECT_NEAR(rs.r_lower, lam * r.r_lower, 1e-6 * lam * r.r_upper);
    auto rc = containment_radius(in, Ellipsotope(q, lam * out.G, out.c), o);
    EXPECT_NEAR(rc.r_upper, r.r_upper / lam, 1e-6 * r.r_upper / lam);
  }
}

TEST(ContainmentInvariants, ContainedVerdictsHoldPointwise) {
  CounterRng rng(71);
  int contained = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const Index n = rng.integer(1, 3);
    std::vector<Exponent> ps = {kOne, kTwo, kInf, Exponent(3.0)};
    Exponent p = ps[static_cast<size_t>(trial % 4)];
    Ellipsotope in(p, 0.3 * rng.normal_matrix(n, 3), 0.1 * rng.normal_vector(n));
    Ellipsotope out(trial % 2 ? kTwo : Exponent(1.5), well_conditioned(rng, n, n + 1), VectorXd::Zero(n));
    auto r = containment_radius(in, out);
    if (r.verdict != Verdict::contained) continue;
    ++contained;
    for (int s = 0; s < 50; ++s) {
      VectorXd a = rng.normal_vector(3);
      a /= vector_norm(a, p);
      EXPECT_TRUE(contains_point(out, in.c + in.G * a, 1e-6));
    }
  }
  EXPECT_GT(contained, 5);
}

TEST(ContainmentInvariants, VerdictBand) {
  EXPECT_EQ(verdict_for(0.5, 1.0 + 5e-10), Verdict::contained);
  EXPECT_EQ(verdict_for(1.0 + 5e-10, 2.0), Verdict::unknown);
  EXPECT_EQ(verdict_for(1.0 + 2e-9, 2.0), Verdict::not_contained);
  EXPECT_EQ(method_from_string("lr+zsr"), Method::lr_zsr);
  EXPECT_THROW(method_from_string("nope"), std::invalid_argument);
}
