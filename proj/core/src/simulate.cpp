#include <cmath>
#include <limits>
#include <stdexcept>

#include "ellipsotope/rng.hpp"
#include "ellipsotope/safeset.hpp"

namespace ellipsotope {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

double min_margin(const HPolyhedron& P, const VectorXd& x) {
  if (P.Lambda.rows() == 0) return std::numeric_limits<double>::infinity();
  return (P.lambda - P.Lambda * x).minCoeff();
}

}  // namespace

Trajectory simulate_closed_loop(const SafeSetProblem& problem, const SafeSetResult& result, const VectorXd& x0,
                                const SimulationOptions& options) {
  if (!result.T) throw std::invalid_argument("simulate_closed_loop: result has no safe set.");
  if (options.substeps < 1) throw std::invalid_argument("simulate_closed_loop: substeps must be positive.");
  const LtiSystem& sys = problem.system;
  const Controller& ctrl = result.controller;
  const Index N = static_cast<Index>(ctrl.c_u.size());
  if (N != problem.N_ts) throw std::invalid_argument("simulate_closed_loop: controller does not match the horizon.");

  const VectorXd beta = controller_parameter(ctrl, x0);
  const double dt = problem.dt();
  const double h = dt / options.substeps;
  const Discretization d = zero_order_hold(sys, h);
  CounterRng rng(options.seed);

  Trajectory tr;
  tr.worst_state_margin = std::numeric_limits<double>::infinity();
  tr.worst_input_margin = std::numeric_limits<double>::infinity();
  auto record_state = [&](double t, const VectorXd& x, const VectorXd& u) {
    tr.t.push_back(t);
    tr.x.push_back(x);
    tr.u.push_back(u);
    const double mx = min_margin(problem.X, x);
    tr.worst_state_margin = std::min(tr.worst_state_margin, mx);
    if (mx < -options.tol) ++tr.state_violations;
  };

  VectorXd x = x0;
  for (Index i = 0; i < N; ++i) {
    // midpoint of the hold interval picks the block without rounding trouble
    const VectorXd u = evaluate_controller(ctrl, beta, x, std::min((static_cast<double>(i) + 0.5) * dt, ctrl.t_end));
    const double mu = min_margin(problem.U, u);
    tr.worst_input_margin = std::min(tr.worst_input_margin, mu);
    if (mu < -options.tol) ++tr.input_violations;
    if (i == 0) record_state(0.0, x, u);
    for (int k = 0; k < options.substeps; ++k) {
      VectorXd w = problem.GW * rng.uniform_vector(problem.GW.cols(), -1.0, 1.0) * options.disturbance_scale;
      x = d.Ad * x + d.Bd * u + d.Gamma * (sys.E * w + sys.chi);
      record_state(static_cast<double>(i) * dt + (k + 1) * h, x, u);
    }
  }
  tr.terminal_in_T = contains_point(*result.T, x, options.tol);
  return tr;
}

VectorXd sample_boundary_point(const SafeSetResult& result, std::uint64_t seed) {
  if (!result.T) throw std::invalid_argument("sample_boundary_point: result has no safe set.");
  const Ellipsotope& T = *result.T;
  CounterRng rng(seed);
  if (T.p.is_two()) return T.c + T.G * rng.sphere(T.num_generators());
  EllipsotopeNorm norm(T.G, T.p);
  for (int attempt = 0; attempt < 100; ++attempt) {
    VectorXd dir = T.G * rng.uniform_vector(T.num_generators(), -1.0, 1.0);
    auto v = norm(dir);
    if (v && *v > 0.0) return T.c + dir / *v;
  }
  throw std::runtime_error("sample_boundary_point: degenerate safe set.");
}

}  // namespace ellipsotope
