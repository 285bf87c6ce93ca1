#include <gtest/gtest.h>

#include <cmath>

#include "ellipsotope/norms.hpp"
#include "ellipsotope/rng.hpp"
#include "ellipsotope/safeset.hpp"

using namespace ellipsotope;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

MatrixXd series_exp(const MatrixXd& M, int terms = 40) {
  MatrixXd out = MatrixXd::Identity(M.rows(), M.cols()), term = out;
  for (int j = 1; j < terms; ++j) {
    term = term * M / j;
    out += term;
  }
  return out;
}

// P <- A'PA - A'PB (Rw + B'PB)^{-1} B'PA + Q until it stops moving
MatrixXd riccati_fixed_point(const MatrixXd& A, const MatrixXd& B, const MatrixXd& Q, const MatrixXd& Rw) {
  MatrixXd P = Q;
  for (int it = 0; it < 200000; ++it) {
    MatrixXd BtPA = B.transpose() * P * A;
    MatrixXd Pn = A.transpose() * P * A - BtPA.transpose() * (Rw + B.transpose() * P * B).inverse() * BtPA + Q;
    if ((Pn - P).norm() <= 1e-15 * Pn.norm()) return Pn;
    P = Pn;
  }
  return P;
}

LtiSystem double_integrator(double chi = 0.0) {
  MatrixXd A(2, 2), B(2, 1);
  A << 0, 1, 0, 0;
  B << 0, 1;
  return LtiSystem(A, B, B, VectorXd::Constant(2, chi));
}

SafeSetProblem double_integrator_problem(TemplateKind kind, double w = 0.1, double umax = 2.0) {
  SafeSetProblem p(double_integrator(), HPolyhedron::box(VectorXd::Constant(2, -5.0), VectorXd::Constant(2, 5.0)),
                   HPolyhedron::box(VectorXd::Constant(1, -umax), VectorXd::Constant(1, umax)),
                   MatrixXd::Constant(1, 1, w));
  p.N_ts = 10;
  p.t_end = 1.0;
  p.template_kind = kind;
  return p;
}

VectorXd random_theta(const ReachModel& rm, CounterRng& rng) {
  VectorXd theta = rng.normal_vector(rm.layout.size());
  for (Index j = 0; j < rm.layout.ns; ++j) theta(rm.layout.s() + j) = rng.uniform(0.2, 2.0);
  return theta;
}

double inf_bound(const Ellipsotope& Z) {
  return (Z.c.cwiseAbs() + Z.G.cwiseAbs().rowwise().sum()).maxCoeff();
}

}  // namespace

TEST(Lqr, ScalarRecursion) {
  // A = 0, B = I, dt = 1: p = p - p^2/(1+p) + 1, the golden ratio
  LtiSystem sys(MatrixXd::Zero(2, 2), MatrixXd::Identity(2, 2), MatrixXd::Zero(2, 0), VectorXd::Zero(2));
  double p = 0.0;
  for (int it = 0; it < 200; ++it) p = p - p * p / (1.0 + p) + 1.0;
  auto r = lqr_gain(sys, MatrixXd::Identity(2, 2), MatrixXd::Identity(2, 2), 1.0);
  EXPECT_LT((r.P - p * MatrixXd::Identity(2, 2)).norm(), 1e-12);
  EXPECT_LE(r.residual, 1e-10);
  EXPECT_LT(r.spectral_radius, 1.0);
  EXPECT_LT((r.K + p / (1.0 + p) * MatrixXd::Identity(2, 2)).norm(), 1e-12);
  EXPECT_LT((r.R * r.R * r.P - MatrixXd::Identity(2, 2)).norm(), 1e-10);
}

TEST(Lqr, DoubleIntegratorMatchesRecursion) {
  const LtiSystem sys = double_integrator();
  const double dt = 0.1;
  auto r = lqr_gain(sys, MatrixXd(), MatrixXd(), dt);
  MatrixXd Ad(2, 2), Bd(2, 1);
  Ad << 1, dt, 0, 1;
  Bd << dt * dt / 2, dt;
  MatrixXd P = riccati_fixed_point(Ad, Bd, MatrixXd::Identity(2, 2), MatrixXd::Identity(1, 1));
  EXPECT_LT((r.P - P).norm() / P.norm(), 1e-9);
  EXPECT_LE(r.residual, 1e-10);
  EXPECT_LT(r.spectral_radius, 1.0);
  MatrixXd K = -(MatrixXd::Identity(1, 1) + Bd.transpose() * P * Bd).inverse() * Bd.transpose() * P * Ad;
  EXPECT_LT((r.K - K).norm(), 1e-8);
  EXPECT_LT((r.R * r.R - P.inverse()).norm(), 1e-10);
  EXPECT_LT((r.R - r.R.transpose()).norm(), 1e-14);
}

TEST(Lqr, Errors) {
  const LtiSystem sys = double_integrator();
  EXPECT_THROW(lqr_gain(sys, MatrixXd(), -MatrixXd::Identity(1, 1), 0.1), std::invalid_argument);
  EXPECT_THROW(lqr_gain(sys, MatrixXd::Identity(3, 3), MatrixXd(), 0.1), std::invalid_argument);
  LtiSystem frozen(MatrixXd::Identity(2, 2), MatrixXd::Zero(2, 1), MatrixXd::Zero(2, 0), VectorXd::Zero(2));
  EXPECT_THROW(lqr_gain(frozen, MatrixXd(), MatrixXd(), 0.1), std::runtime_error);
}

TEST(Zoh, DoubleIntegratorClosedForm) {
  auto d = zero_order_hold(double_integrator(), 0.3);
  MatrixXd Ad(2, 2), Bd(2, 1), Gamma(2, 2);
  Ad << 1, 0.3, 0, 1;
  Bd << 0.045, 0.3;
  Gamma << 0.3, 0.045, 0, 0.3;
  EXPECT_LT((d.Ad - Ad).norm(), 1e-14);
  EXPECT_LT((d.Bd - Bd).norm(), 1e-14);
  EXPECT_LT((d.Gamma - Gamma).norm(), 1e-14);
  EXPECT_THROW(zero_order_hold(double_integrator(), 0.0), std::invalid_argument);
}

TEST(Zoh, MatchesSeries) {
  CounterRng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = rng.integer(1, 5);
    MatrixXd A = rng.normal_matrix(n, n), B = rng.normal_matrix(n, 2);
    const double dt = rng.uniform(0.01, 0.5);
    auto d = zero_order_hold(LtiSystem(A, B, MatrixXd::Zero(n, 0), VectorXd::Zero(n)), dt);
    EXPECT_LT((d.Ad - series_exp(A * dt)).norm(), 1e-12 * d.Ad.norm());
    // Gamma = dt sum_j (A dt)^j/(j+1)!
    MatrixXd G = MatrixXd::Zero(n, n), term = MatrixXd::Identity(n, n) * dt;
    for (int j = 0; j < 40; ++j) {
      G += term;
      term = term * A * dt / (j + 2);
    }
    EXPECT_LT((d.Gamma - G).norm(), 1e-12 * G.norm());
    EXPECT_LT((d.Bd - G * B).norm(), 1e-12 * (1.0 + d.Bd.norm()));
  }
}

TEST(Reach, TaylorRemainderBoundsTheTail) {
  CounterRng rng(5);
  for (int trial = 0; trial < 60; ++trial) {
    const Index n = rng.integer(1, 4);
    const int eta = rng.integer(1, 4);
    MatrixXd A = rng.normal_matrix(n, n);
    const double dt = rng.uniform(0.01, 0.4) / std::max(1.0, A.cwiseAbs().rowwise().sum().maxCoeff());
    const double bound = taylor_remainder(A, dt, eta);
    for (int k = 0; k <= 10; ++k) {
      const double s = dt * k / 10.0;
      MatrixXd T = MatrixXd::Zero(n, n), term = MatrixXd::Identity(n, n);
      for (int j = 0; j <= eta; ++j) {
        T += term;
        term = term * A * s / (j + 1);
      }
      const double err = (series_exp(A * s) - T).cwiseAbs().rowwise().sum().maxCoeff();
      EXPECT_LE(err, bound * (1.0 + 1e-12) + 1e-16);
    }
  }
  EXPECT_THROW(taylor_remainder(MatrixXd::Identity(2, 2) * 10.0, 1.0, 2), std::runtime_error);
  EXPECT_THROW(taylor_remainder(MatrixXd::Identity(2, 2), 0.1, 0), std::invalid_argument);
}

TEST(Reach, AffineMatrixAlgebra) {
  CounterRng rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const Index r = rng.integer(1, 4), c = rng.integer(1, 4), nt = rng.integer(1, 6);
    AffineMatrix M(r, c, nt), N(r, c, nt);
    M.constant = rng.normal_matrix(r, c);
    M.jacobian = rng.normal_matrix(r * c, nt);
    N.constant = rng.normal_matrix(r, c);
    N.jacobian = rng.normal_matrix(r * c, nt);
    MatrixXd L = rng.normal_matrix(3, r);
    VectorXd theta = rng.normal_vector(nt);
    EXPECT_LT((M.left_multiply(L).evaluate(theta) - L * M.evaluate(theta)).norm(), 1e-12);
    MatrixXd sum = M.evaluate(theta) + N.evaluate(theta);
    M += N;
    EXPECT_LT((M.evaluate(theta) - sum).norm(), 1e-12);
  }
}

TEST(Reach, WithoutDisturbanceOrInputsIsTheLinearImage) {
  for (TemplateKind kind : {TemplateKind::zonotope, TemplateKind::ellipsoid}) {
    SafeSetProblem p = double_integrator_problem(kind);
    p.GW = MatrixXd::Zero(1, 0);
    auto lqr = lqr_gain(p.system, MatrixXd(), MatrixXd(), p.dt());
    auto rm = parametric_reach(p, lqr);
    CounterRng rng(1);
    VectorXd theta = VectorXd::Zero(rm.layout.size());
    theta.head(rm.layout.nx + rm.layout.ns) = random_theta(rm, rng).head(rm.layout.nx + rm.layout.ns);
    const Ellipsotope X0 = rm.states.front().evaluate(theta);
    const Ellipsotope XN = rm.states.back().evaluate(theta);
    MatrixXd PhiN = MatrixXd::Identity(2, 2);
    for (int i = 0; i < p.N_ts; ++i) PhiN = rm.Phi * PhiN;
    EXPECT_EQ(XN.num_generators(), p.template_generators());
    EXPECT_EQ(rm.terminal_generator_count(), p.template_generators());
    EXPECT_LT((XN.G - PhiN * X0.G).norm(), 1e-12 * (1.0 + X0.G.norm()));
    EXPECT_LT((XN.c - PhiN * X0.c).norm(), 1e-12 * (1.0 + X0.c.norm()));
  }
}

TEST(Reach, PlatoonGeneratorCount) {
  for (TemplateKind kind : {TemplateKind::zonotope, TemplateKind::ellipsoid}) {
    SafeSetProblem p = platoon_benchmark(2, kind);
    auto rm = parametric_reach(p, lqr_gain(p.system, MatrixXd(), MatrixXd(), p.dt()));
    const Index nx = 4, nw = 2;
    EXPECT_EQ(rm.terminal_generator_count(), p.m + p.N_ts * nw * (p.eta + 1) * nx);
    EXPECT_EQ(rm.terminal_disturbance.cols(), p.N_ts * nw * (p.eta + 1) * nx);
  }
}

TEST(Reach, ConstantDisturbanceSingleStep) {
  // A = 0, B = 0, E = I, W the unit box: one step adds dt times the box
  LtiSystem sys(MatrixXd::Zero(2, 2), MatrixXd::Zero(2, 1), MatrixXd::Identity(2, 2), VectorXd::Zero(2));
  SafeSetProblem p(sys, HPolyhedron(MatrixXd::Zero(0, 2), VectorXd::Zero(0)),
                   HPolyhedron::box(VectorXd::Constant(1, -1.0), VectorXd::Constant(1, 1.0)), MatrixXd::Identity(2, 2));
  p.N_ts = 1;
  p.t_end = 0.25;
  LqrResult lqr;
  lqr.K = MatrixXd::Zero(1, 2);
  lqr.R = MatrixXd::Identity(2, 2);
  auto rm = parametric_reach(p, lqr);
  EXPECT_LE((rm.disturbance_box - VectorXd::Constant(2, 0.25)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(rm.interval_bloat, 0.0);
  CounterRng rng(2);
  VectorXd theta = random_theta(rm, rng);
  const Ellipsotope X0 = rm.states.front().evaluate(theta), X1 = rm.states.back().evaluate(theta);
  // support functions add up exactly
  for (int k = 0; k < 20; ++k) {
    VectorXd l = rng.normal_vector(2);
    EXPECT_NEAR(support_function(X1, l), support_function(X0, l) + 0.25 * l.lpNorm<1>(), 1e-12);
  }
  EXPECT_LE((rm.terminal_disturbance.cwiseAbs().rowwise().sum() - VectorXd::Constant(2, 0.25)).cwiseAbs().maxCoeff(),
            1e-12);
}

TEST(Reach, RolloutsStayInside) {
  // exact sampled-data rollouts with piecewise-constant disturbances
  for (TemplateKind kind : {TemplateKind::zonotope, TemplateKind::ellipsoid}) {
    SafeSetProblem p = double_integrator_problem(kind, 0.5);
    p.system.chi << 0.05, -0.1;
    auto lqr = lqr_gain(p.system, MatrixXd(), MatrixXd(), p.dt());
    auto rm = parametric_reach(p, lqr);
    CounterRng rng(kind == TemplateKind::zonotope ? 21 : 22);
    const VectorXd theta = random_theta(rm, rng);
    std::vector<Ellipsotope> X, U, Y, XE;
    for (Index i = 0; i <= p.N_ts; ++i) X.push_back(rm.states[static_cast<size_t>(i)].evaluate(theta));
    for (Index i = 0; i < p.N_ts; ++i) {
      U.push_back(rm.inputs[static_cast<size_t>(i)].evaluate(theta));
      Y.push_back(rm.rates[static_cast<size_t>(i)].evaluate(theta));
      Ellipsotope xe = X[static_cast<size_t>(i)];
      xe.c += rm.dt * Y.back().c;
      xe.G += rm.dt * Y.back().G;
      XE.push_back(xe);
    }
    const int substeps = 7;
    const auto dsub = zero_order_hold(p.system, p.dt() / substeps);
    const Index m = rm.G_fixed.cols();
    std::vector<VectorXd> dirs;
    for (int k = 0; k < 12; ++k) dirs.push_back(rng.normal_vector(2));
    for (int trial = 0; trial < 200; ++trial) {
      VectorXd bh = trial % 3 == 0 ? VectorXd(rng.uniform_vector(m, -1, 1).cwiseSign()) : rng.uniform_vector(m, -1, 1);
      const VectorXd beta = rm.beta_map * bh;
      VectorXd x = X[0].c + X[0].G.leftCols(m) * bh;
      for (Index i = 0; i < p.N_ts; ++i) {
        const auto& Xi = X[static_cast<size_t>(i)];
        if (trial < 20) EXPECT_TRUE(contains_point(Xi, x, 1e-7));
        for (const auto& l : dirs) EXPECT_LE(l.dot(x), support_function(Xi, l) + 1e-9);
        MatrixXd Ui = Eigen::Map<const MatrixXd>(theta.data() + rm.layout.U(i), rm.layout.nu, rm.layout.mb);
        VectorXd u = lqr.K * x + theta.segment(rm.layout.c_u(i), rm.layout.nu) + Ui * beta.head(rm.layout.mb);
        for (const auto& l : {VectorXd::Ones(1).eval(), (-VectorXd::Ones(1)).eval()})
          EXPECT_LE(l.dot(u), support_function(U[static_cast<size_t>(i)], l) + 1e-9);
        // the enclosure between samples
        const double nu_i = inf_bound(Y[static_cast<size_t>(i)]);
        for (int k = 0; k < substeps; ++k) {
          VectorXd w = p.GW * rng.uniform_vector(1, -1, 1);
          x = dsub.Ad * x + dsub.Bd * u + dsub.Gamma * (p.system.E * w + p.system.chi);
          for (const auto& l : dirs) {
            const double h = std::max(support_function(Xi, l), support_function(XE[static_cast<size_t>(i)], l)) +
                             l.cwiseAbs().dot(rm.disturbance_box) + l.lpNorm<1>() * rm.interval_bloat * nu_i;
            EXPECT_LE(l.dot(x), h + 1e-9);
          }
        }
      }
      EXPECT_TRUE(contains_point(X.back(), x, 1e-7));
    }
  }
}

TEST(Program, TrivialSystemAndShrinkingX) {
  LtiSystem sys(MatrixXd::Zero(2, 2), MatrixXd::Identity(2, 2), MatrixXd::Zero(2, 0), VectorXd::Zero(2));
  SafeSetProblem p(sys, HPolyhedron::box(VectorXd::Constant(2, -10.0), VectorXd::Constant(2, 10.0)),
                   HPolyhedron::box(VectorXd::Constant(2, -10.0), VectorXd::Constant(2, 10.0)), MatrixXd());
  p.N_ts = 3;
  p.t_end = 0.3;
  auto big = synthesize_safe_set(p);
  ASSERT_TRUE(big.found) << big.message;
  EXPECT_GT(big.s.minCoeff(), 0.0);
  p.X = HPolyhedron::box(VectorXd::Constant(2, -5.0), VectorXd::Constant(2, 5.0));
  auto small = synthesize_safe_set(p);
  ASSERT_TRUE(small.found) << small.message;
  EXPECT_LE(small.diagnostics.objective, big.diagnostics.objective * (1.0 + 1e-6));
}

TEST(Program, ShapeAndValidation) {
  SafeSetProblem p = double_integrator_problem(TemplateKind::zonotope);
  auto lqr = lqr_gain(p.system, MatrixXd(), MatrixXd(), p.dt());
  auto rm = parametric_reach(p, lqr);
  ProgramHandles h;
  auto P = assemble_program(p, rm, &h);
  EXPECT_EQ(h.n_theta, rm.layout.size());
  EXPECT_EQ(h.theta.size(), rm.layout.size());
  EXPECT_EQ(P.sense(), conic::Sense::maximize);
  SafeSetProblem bad = p;
  bad.N_ts = 0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = p;
  bad.eta = 0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = p;
  bad.m = 1;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = p;
  bad.GW = MatrixXd::Identity(2, 2);
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  EXPECT_THROW(template_from_string("box"), std::invalid_argument);
}

TEST(Synthesis, DoubleIntegratorBothTemplates) {
  for (TemplateKind kind : {TemplateKind::zonotope, TemplateKind::ellipsoid}) {
    SafeSetProblem p = double_integrator_problem(kind);
    auto r = synthesize_safe_set(p);
    ASSERT_TRUE(r.found) << r.message;
    ASSERT_TRUE(r.T.has_value());
    EXPECT_GT(r.s.minCoeff(), 0.0);
    EXPECT_LE(r.diagnostics.verify_radius, 1.0 + 1e-6);
    EXPECT_LE(r.diagnostics.hull_radius, 1.0 + 1e-6);
    EXPECT_GE(r.diagnostics.min_polyhedron_margin, -1e-8);
    EXPECT_EQ(static_cast<int>(r.controller.c_u.size()), p.N_ts);
    EXPECT_EQ(static_cast<int>(r.controller.U_blocks.size()), p.N_ts);
    if (kind == TemplateKind::ellipsoid) {
      EXPECT_TRUE(r.controller.q.is_two());
      EXPECT_EQ(r.controller.G_T.rows(), r.controller.G_T.cols());
      // T inside T_hat along sampled directions
      CounterRng rng(4);
      for (int k = 0; k < 50; ++k) {
        VectorXd l = rng.normal_vector(2);
        EXPECT_LE(support_function(*r.T, l), support_function(*r.T_hat, l) + 1e-9);
      }
    }
    for (std::uint64_t t = 0; t < 20; ++t) {
      SimulationOptions o;
      o.seed = 100 + t;
      auto tr = simulate_closed_loop(p, r, sample_boundary_point(r, t), o);
      EXPECT_EQ(tr.state_violations, 0);
      EXPECT_EQ(tr.input_violations, 0);
      EXPECT_TRUE(tr.terminal_in_T);
    }
  }
}

TEST(Synthesis, OverwhelmingDisturbanceIsReported) {
  SafeSetProblem p = double_integrator_problem(TemplateKind::zonotope, 10.0, 1.0);
  auto r = synthesize_safe_set(p);
  EXPECT_FALSE(r.found);
  EXPECT_EQ(r.message, "no safe set found with this template");
  EXPECT_FALSE(r.T.has_value());
}

TEST(Controller, EvaluationExamples) {
  for (TemplateKind kind : {TemplateKind::zonotope, TemplateKind::ellipsoid}) {
    SafeSetProblem p = double_integrator_problem(kind);
    auto r = synthesize_safe_set(p);
    ASSERT_TRUE(r.found);
    const Controller& c = r.controller;
    VectorXd beta = controller_parameter(c, c.c_T);
    EXPECT_LT(beta.norm(), 1e-9);
    EXPECT_LT((evaluate_controller(c, c.c_T, 0.0) - (c.K * c.c_T + c.c_u[0])).norm(), 1e-9);
    for (std::uint64_t t = 0; t < 20; ++t) {
      VectorXd x0 = sample_boundary_point(r, t);
      VectorXd b = controller_parameter(c, x0);
      EXPECT_LT((c.c_T + c.G_T * b - x0).norm(), 1e-7 * (1.0 + x0.norm()));
      EXPECT_LE(vector_norm(b, c.q), 1.0 + 1e-6);
      // t = t_end uses the last block
      VectorXd u = evaluate_controller(c, b, x0, c.t_end);
      EXPECT_LT((u - (c.K * x0 + c.c_u.back() + c.U_blocks.back() * b.head(c.U_blocks.back().cols()))).norm(), 1e-12);
    }
    VectorXd far = c.c_T + 3.0 * c.G_T.col(0);
    EXPECT_THROW(controller_parameter(c, far), std::invalid_argument);
    EXPECT_THROW(evaluate_controller(c, beta, c.c_T, -0.1), std::invalid_argument);
    EXPECT_THROW(evaluate_controller(c, beta, c.c_T, c.t_end + 0.1), std::invalid_argument);
  }
}

TEST(Simulation, ZeroDisturbanceAndAdversarialScaling) {
  SafeSetProblem p = double_integrator_problem(TemplateKind::ellipsoid);
  auto r = synthesize_safe_set(p);
  ASSERT_TRUE(r.found);
  SimulationOptions calm;
  calm.disturbance_scale = 0.0;
  auto tr = simulate_closed_loop(p, r, r.controller.c_T, calm);
  EXPECT_TRUE(tr.terminal_in_T);
  EXPECT_EQ(tr.state_violations + tr.input_violations, 0);
  EXPECT_EQ(tr.x.size(), static_cast<size_t>(p.N_ts * calm.substeps + 1));

  int flagged = 0;
  for (std::uint64_t t = 0; t < 10; ++t) {
    SimulationOptions wild;
    wild.seed = t;
    wild.disturbance_scale = 200.0;
    auto w = simulate_closed_loop(p, r, sample_boundary_point(r, t), wild);
    // the report agrees with the recorded samples
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& x : w.x) worst = std::min(worst, (p.X.lambda - p.X.Lambda * x).minCoeff());
    EXPECT_DOUBLE_EQ(worst, w.worst_state_margin);
    flagged += (w.state_violations > 0 || !w.terminal_in_T) ? 1 : 0;
  }
  EXPECT_GT(flagged, 0);
  VectorXd outside = r.controller.c_T + 2.0 * r.controller.G_T.col(0);
  EXPECT_THROW(simulate_closed_loop(p, r, outside), std::invalid_argument);
}

TEST(Platoon, Structure) {
  auto p = platoon_benchmark(2);
  MatrixXd A(4, 4), B(4, 2);
  A << 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0;
  // x4' = u1 - u2
  B << 0, 0, 1, 0, 0, 0, 1, -1;
  EXPECT_EQ(p.system.A, A);
  EXPECT_EQ(p.system.B, B);
  EXPECT_EQ(p.system.E, B);
  EXPECT_EQ(p.N_ts, 30);
  EXPECT_NEAR(p.dt(), 0.1, 1e-15);
  EXPECT_EQ(p.m, 10);
  EXPECT_EQ(platoon_benchmark(2, TemplateKind::ellipsoid).m, 4);
  // only x3 >= 0
  ASSERT_EQ(p.X.Lambda.rows(), 1);
  EXPECT_EQ(p.X.Lambda.row(0), Eigen::RowVector4d(0, 0, -1, 0));
  EXPECT_EQ(p.X.lambda(0), 0.0);
  EXPECT_TRUE(p.U.contains(VectorXd::Constant(2, 10.0)));
  EXPECT_FALSE(p.U.contains(VectorXd::Constant(2, 10.5)));
  EXPECT_EQ(p.GW, MatrixXd::Identity(2, 2));

  auto p3 = platoon_benchmark(3);
  EXPECT_EQ(p3.system.A.rows(), 6);
  EXPECT_EQ(p3.N_ts, 40);
  EXPECT_EQ(p3.system.B(5, 1), 1.0);
  EXPECT_EQ(p3.system.B(5, 2), -1.0);
  EXPECT_EQ(p3.X.Lambda.rows(), 2);
  EXPECT_THROW(platoon_benchmark(1), std::invalid_argument);
}

TEST(Platoon, EllipsoidSynthesis) {
  auto p = platoon_benchmark(2, TemplateKind::ellipsoid);
  auto r = synthesize_safe_set(p);
  ASSERT_TRUE(r.found) << r.message;
  EXPECT_LE(r.diagnostics.verify_radius, 1.0 + 1e-6);
  EXPECT_GE(r.diagnostics.min_polyhedron_margin, -1e-8);
  for (std::uint64_t t = 0; t < 20; ++t) {
    SimulationOptions o;
    o.seed = t;
    auto tr = simulate_closed_loop(p, r, sample_boundary_point(r, 1000 + t), o);
    EXPECT_EQ(tr.state_violations + tr.input_violations, 0);
    EXPECT_TRUE(tr.terminal_in_T);
  }
}
