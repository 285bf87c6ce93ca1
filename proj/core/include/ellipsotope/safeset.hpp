#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ellipsotope/conic/solver.hpp"
#include "ellipsotope/sets.hpp"

namespace ellipsotope {

// dx/dt = A x + B u + E w + chi
struct LtiSystem {
  Eigen::MatrixXd A, B, E;
  Eigen::VectorXd chi;

  LtiSystem(Eigen::MatrixXd A, Eigen::MatrixXd B, Eigen::MatrixXd E, Eigen::VectorXd chi);
  Index nx() const { return A.rows(); }
  Index nu() const { return B.cols(); }
  Index nw() const { return E.cols(); }
};

// zero-order hold over dt: x+ = Ad x + Bd u + Gamma (E w + chi) for constant u, w
struct Discretization {
  Eigen::MatrixXd Ad, Bd;
  Eigen::MatrixXd Gamma;  // integral of exp(A s) over [0, dt]
};

Discretization zero_order_hold(const LtiSystem& sys, double dt);

struct LqrResult {
  Eigen::MatrixXd K;  // u = K x
  Eigen::MatrixXd P;  // stabilising solution of the discrete Riccati equation
  Eigen::MatrixXd R;  // P^{-1/2}
  double residual = 0.0;
  double spectral_radius = 0.0;  // of Ad + Bd K
};

LqrResult lqr_gain(const LtiSystem& sys, const Eigen::MatrixXd& Q, const Eigen::MatrixXd& Rw, double dt);

enum class TemplateKind { zonotope, ellipsoid };

std::string to_string(TemplateKind t);
TemplateKind template_from_string(const std::string& s);

struct SafeSetProblem {
  LtiSystem system;
  HPolyhedron X;
  HPolyhedron U;
  Eigen::MatrixXd GW;  // disturbance set Z(GW), centred at the origin
  double t_end = 1.0;
  int N_ts = 10;
  int eta = 2;
  TemplateKind template_kind = TemplateKind::zonotope;
  Index m = 0;    // template generators (G_fixed columns); 0: 2 n_x (zonotope) or n_x (ellipsoid)
  Index m_u = 0;  // columns of each U_i; 0: dimension of the parameter beta
  Eigen::MatrixXd lqr_Q, lqr_Rw;  // empty: identity

  SafeSetProblem(LtiSystem system, HPolyhedron X, HPolyhedron U, Eigen::MatrixXd GW);
  double dt() const { return t_end / N_ts; }
  Index template_generators() const;
  // throws on inconsistent data
  void validate() const;
};

// Affine matrix M(theta) = M0 + reshape(J theta), column-major
struct AffineMatrix {
  Eigen::MatrixXd constant;
  Eigen::MatrixXd jacobian;  // (rows*cols) x n_theta

  AffineMatrix() = default;
  AffineMatrix(Index rows, Index cols, Index n_theta);
  Index rows() const { return constant.rows(); }
  Index cols() const { return constant.cols(); }
  Eigen::MatrixXd evaluate(const Eigen::VectorXd& theta) const;
  // M(theta) -> L M(theta)
  AffineMatrix left_multiply(const Eigen::MatrixXd& L) const;
  AffineMatrix& operator+=(const AffineMatrix& other);
};

// decision vector layout: [c_T, s, vec(U_0) .. vec(U_{N-1}), c_u0 .. c_u{N-1}]
struct DecisionLayout {
  Index nx = 0, ns = 0, nu = 0, mb = 0, N = 0;
  Index c_T() const { return 0; }
  Index s() const { return nx; }
  Index U(Index i) const { return nx + ns + i * nu * mb; }
  Index c_u(Index i) const { return nx + ns + N * nu * mb + i * nu; }
  Index size() const { return nx + ns + N * nu * mb + N * nu; }
};

// a zonotope whose centre and parameter generators are affine in the decisions;
// the parameter is the template coefficient vector, the rest are constant generators
struct AffineZonotope {
  AffineMatrix center;      // n x 1
  AffineMatrix generators;  // n x m_beta
  Eigen::MatrixXd fixed;    // n x k, constant

  Ellipsotope evaluate(const Eigen::VectorXd& theta) const;
};

struct ReachModel {
  DecisionLayout layout;
  double dt = 0.0;
  Eigen::MatrixXd Phi;         // Ad + Bd K
  Eigen::MatrixXd Bd, Ad, Gamma;
  Eigen::MatrixXd K;
  Eigen::MatrixXd G_template;  // template generators without scaling: R G_fixed or R
  Eigen::MatrixXd G_fixed;
  Eigen::MatrixXd beta_map;    // controller parameter = beta_map * reach parameter
  Eigen::VectorXd disturbance_box;  // per-step axis-aligned radius (Taylor terms + remainder)
  double interval_bloat = 0.0;      // radius factor applied to ||dx/dt||_inf within a step
  std::vector<AffineZonotope> states;     // time points t_0 .. t_N, merged disturbance generators
  std::vector<AffineZonotope> rates;      // dx/dt at t_i before disturbance, i < N
  std::vector<AffineZonotope> inputs;     // u on [t_i, t_{i+1})
  Eigen::MatrixXd terminal_disturbance;   // full axis-split generators at t_N
  Index terminal_generator_count() const { return states.back().generators.cols() + terminal_disturbance.cols(); }
};

// rigorous one-step remainder of the order-eta Taylor series of exp(A s), s <= dt;
// throws if ||A||_inf dt >= eta + 2
double taylor_remainder(const Eigen::MatrixXd& A, double dt, int eta);

ReachModel parametric_reach(const SafeSetProblem& problem, const LqrResult& lqr);

struct ProgramHandles {
  conic::Variable theta;
  conic::Variable s_geo;  // geometric-mean epigraph
  Index n_theta = 0;
};

conic::ConeProgram assemble_program(const SafeSetProblem& problem, const ReachModel& reach, ProgramHandles* handles = nullptr);

struct Controller {
  Eigen::MatrixXd K;
  std::vector<Eigen::VectorXd> c_u;
  std::vector<Eigen::MatrixXd> U_blocks;
  Exponent q = Exponent::infinity();
  Eigen::MatrixXd G_T;
  Eigen::VectorXd c_T;
  double t_end = 1.0;
};

struct SafeSetDiagnostics {
  std::string status;
  double objective = 0.0;
  int iterations = 0;
  double primal_residual = 0.0, dual_residual = 0.0, relative_gap = 0.0;
  double solve_seconds = 0.0;
  Index variables = 0, constraints = 0;
  double verify_radius = 0.0;       // LR value of the numeric terminal containment
  double hull_radius = 0.0;         // radius of T in T_hat (ellipsoid template)
  double min_polyhedron_margin = 0.0;
  double lqr_spectral_radius = 0.0;
  std::string lqr_weights;
};

struct SafeSetResult {
  bool found = false;
  std::string message;
  std::optional<Ellipsotope> T;
  std::optional<Ellipsotope> T_hat;
  Eigen::VectorXd s;
  Controller controller;
  ReachModel reach;
  Eigen::VectorXd theta;
  SafeSetDiagnostics diagnostics;
};

SafeSetResult synthesize_safe_set(const SafeSetProblem& problem, const conic::SolverSettings& settings = {});

// beta with x0 = c_T + G_T beta and ||beta||_q <= 1; throws if x0 is outside T
Eigen::VectorXd controller_parameter(const Controller& c, const Eigen::VectorXd& x0);
Eigen::VectorXd evaluate_controller(const Controller& c, const Eigen::VectorXd& beta, const Eigen::VectorXd& x,
                                    double t);
// the first sample: beta from x0 and x = x0
Eigen::VectorXd evaluate_controller(const Controller& c, const Eigen::VectorXd& x0, double t);

struct Trajectory {
  std::vector<double> t;
  std::vector<Eigen::VectorXd> x;
  std::vector<Eigen::VectorXd> u;  // held input at each recorded time
  int state_violations = 0;
  int input_violations = 0;
  double worst_state_margin = 0.0;  // min over samples of lambda - Lambda x
  double worst_input_margin = 0.0;
  bool terminal_in_T = false;
};

struct SimulationOptions {
  std::uint64_t seed = 0;
  int substeps = 10;
  double disturbance_scale = 1.0;  // > 1 leaves W on purpose
  double tol = 1e-6;
};

Trajectory simulate_closed_loop(const SafeSetProblem& problem, const SafeSetResult& result, const Eigen::VectorXd& x0,
                                const SimulationOptions& options = {});

// random point on the boundary of T
Eigen::VectorXd sample_boundary_point(const SafeSetResult& result, std::uint64_t seed);

SafeSetProblem platoon_benchmark(int k, TemplateKind kind = TemplateKind::zonotope);

}  // namespace ellipsotope
