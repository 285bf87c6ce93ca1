#include "cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <numbers>
#include <optional>
#include <sstream>

#include "ellipsotope/containment.hpp"
#include "ellipsotope/documents.hpp"
#include "ellipsotope/hardness.hpp"
#include "ellipsotope/norms.hpp"
#include "ellipsotope/safeset.hpp"

namespace ellipsotope::cli {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

Exponent parse_exponent(const std::string& s, const std::string& flag) {
  if (s == "inf") return Exponent::infinity();
  try {
    size_t used = 0;
    double v = std::stod(s, &used);
    if (used == s.size()) return Exponent(v);
  } catch (const std::exception&) {
  }
  throw std::invalid_argument(flag + " must be a number in [1, inf] or \"inf\".");
}

double default_tolerance() {
  if (const char* env = std::getenv(kSolverTolEnv)) {
    char* end = nullptr;
    double v = std::strtod(env, &end);
    if (end == env || *end != '\0' || !(v > 0.0) || !(v <= 1e-2))
      throw std::invalid_argument(std::string(kSolverTolEnv) + " must be a number in (0, 1e-2].");
    return v;
  }
  return conic::SolverSettings{}.feas_tol;
}

std::string format_csv(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

int verdict_code(Verdict v) {
  switch (v) {
    case Verdict::contained: return kExitContained;
    case Verdict::not_contained: return kExitNotContained;
    default: return kExitUnknown;
  }
}

struct ContainArgs {
  std::string inbody, circumbody;
  std::string method = "auto";
  std::optional<double> tol;
  int oracle_limit = 20;
  std::uint64_t seed = 0;
  bool timing = false;
};

int cmd_contain(const ContainArgs& a, std::ostream& out) {
  const Ellipsotope in = parse_set_document(read_text_file(a.inbody)).set;
  const Ellipsotope circ = parse_set_document(read_text_file(a.circumbody)).set;
  ContainmentOptions opt;
  opt.method = method_from_string(a.method);
  opt.solver.feas_tol = opt.solver.gap_tol = a.tol ? *a.tol : default_tolerance();
  opt.oracle.max_enumeration_columns = a.oracle_limit;
  opt.oracle.seed = a.seed;
  const auto t0 = std::chrono::steady_clock::now();
  ResultDocument d{containment_radius(in, circ, opt), opt.solver, std::nullopt};
  if (a.timing) d.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out << serialize(d);
  return verdict_code(d.result.verdict);
}

struct NormArgs {
  std::string matrix;
  std::string kind = "lpq";
  std::string p = "2", q = "2";
  std::uint64_t seed = 0;
};

int cmd_norm(const NormArgs& a, std::ostream& out) {
  const MatrixXd A = parse_matrix_document(read_text_file(a.matrix)).A;
  if (A.size() == 0) throw std::invalid_argument("matrix is empty.");
  NormDocument d;
  d.kind.p = parse_exponent(a.p, "--p");
  d.kind.q = parse_exponent(a.q, "--q");
  if (a.kind == "op") {
    d.kind.tag = MatrixNormKind::Tag::op;
    OperatorNormOptions o;
    o.seed = a.seed;
    OperatorNormEstimate e = operator_norm(A, d.kind.p, d.kind.q, o);
    d.value = e.value;
    d.exact = e.exact;
  } else {
    const bool transposed = a.kind == "lpq_transposed";
    d.kind.tag = transposed ? MatrixNormKind::Tag::lpq_transposed : MatrixNormKind::Tag::lpq;
    d.value = lpq_norm(A, d.kind.p, d.kind.q, transposed);
    d.exact = true;
  }
  out << serialize(d);
  return 0;
}

struct SafeSetArgs {
  std::string problem;
  std::string template_kind;
  std::string out_dir;
  std::optional<double> tol;
  std::vector<int> dims = {0, 1};
  int trajectories = 0;
  std::uint64_t seed = 0;
  bool timing = false;
};

// boundary of the projection onto dims, traced by support points
void append_boundary(std::ostream& csv, const std::string& label, const Ellipsotope& E, int i, int j) {
  const int directions = 256;
  const Exponent pc = E.p.conjugate();
  for (int k = 0; k < directions; ++k) {
    const double phi = 2.0 * std::numbers::pi * k / directions;
    VectorXd y = std::cos(phi) * E.G.row(i).transpose() + std::sin(phi) * E.G.row(j).transpose();
    VectorXd x = E.c + E.G * dual_vector(y, pc);
    csv << label << ',' << format_csv(x(i)) << ',' << format_csv(x(j)) << '\n';
  }
}

int cmd_safeset(const SafeSetArgs& a, std::ostream& out, std::ostream& err) {
  std::optional<TemplateKind> override_kind;
  if (!a.template_kind.empty()) override_kind = template_from_string(a.template_kind);
  const SafeSetProblem problem = parse_problem_document(read_text_file(a.problem), override_kind);
  const Index nx = problem.system.nx();
  if (a.dims.size() != 2 || a.dims[0] < 0 || a.dims[1] < 0 || a.dims[0] >= nx || a.dims[1] >= nx || a.dims[0] == a.dims[1])
    throw std::invalid_argument("--dims must name two distinct state indices.");
  if (a.trajectories < 0) throw std::invalid_argument("--trajectories must be nonnegative.");

  conic::SolverSettings settings;
  if (a.tol || std::getenv(kSolverTolEnv)) settings.feas_tol = settings.gap_tol = a.tol ? *a.tol : default_tolerance();
  const SafeSetResult result = synthesize_safe_set(problem, settings);

  namespace fs = std::filesystem;
  fs::create_directories(a.out_dir);
  const fs::path dir(a.out_dir);
  SafeSetReportDocument report{result.found, result.message, problem.template_kind, result.s, result.diagnostics,
                               a.timing};
  const std::string report_text = serialize(report);
  write_text_file((dir / "report.json").string(), report_text);

  if (result.T) {
    write_text_file((dir / "T.json").string(), serialize(SetDocument{"T", *result.T}));
    if (result.T_hat) write_text_file((dir / "T_hat.json").string(), serialize(SetDocument{"T_hat", *result.T_hat}));
    write_text_file((dir / "controller.json").string(), serialize(ControllerDocument{result.controller}));

    std::ostringstream reach;
    reach << "step,t,dim,lo,hi\n";
    for (size_t i = 0; i < result.reach.states.size(); ++i) {
      const Ellipsotope Z = result.reach.states[i].evaluate(result.theta);
      const VectorXd radius = Z.G.cwiseAbs().rowwise().sum();
      for (Index r = 0; r < nx; ++r)
        reach << i << ',' << format_csv(static_cast<double>(i) * problem.dt()) << ',' << r << ','
              << format_csv(Z.c(r) - radius(r)) << ',' << format_csv(Z.c(r) + radius(r)) << '\n';
    }
    write_text_file((dir / "reach.csv").string(), reach.str());

    const int i = a.dims[0], j = a.dims[1];
    std::ostringstream boundary;
    boundary << "set,x" << i << ",x" << j << '\n';
    append_boundary(boundary, "T", *result.T, i, j);
    if (result.T_hat) append_boundary(boundary, "T_hat", *result.T_hat, i, j);
    write_text_file((dir / "boundary.csv").string(), boundary.str());

    if (a.trajectories > 0) {
      std::ostringstream traj;
      traj << "run,t";
      for (Index r = 0; r < nx; ++r) traj << ",x" << r;
      for (Index r = 0; r < problem.system.nu(); ++r) traj << ",u" << r;
      traj << '\n';
      for (int run = 0; run < a.trajectories; ++run) {
        const std::uint64_t seed = a.seed + static_cast<std::uint64_t>(run);
        SimulationOptions so;
        so.seed = seed;
        const Trajectory tr = simulate_closed_loop(problem, result, sample_boundary_point(result, seed), so);
        for (size_t k = 0; k < tr.t.size(); ++k) {
          traj << run << ',' << format_csv(tr.t[k]);
          for (Index r = 0; r < tr.x[k].size(); ++r) traj << ',' << format_csv(tr.x[k](r));
          for (Index r = 0; r < tr.u[k].size(); ++r) traj << ',' << format_csv(tr.u[k](r));
          traj << '\n';
        }
      }
      write_text_file((dir / "trajectories.csv").string(), traj.str());
    }
  }

  out << report_text;
  if (!result.found) {
    err << "error: " << result.message << '\n';
    return kExitInfeasible;
  }
  return 0;
}

struct HardnessArgs {
  std::string matrix;
  std::string p = "inf";
  double delta = 0.05;
  std::string inner = "auto";
};

int cmd_hardness(const HardnessArgs& a, std::ostream& out) {
  const MatrixXd A = parse_matrix_document(read_text_file(a.matrix)).A;
  if (A.size() == 0) throw std::invalid_argument("matrix is empty.");
  HardnessDocument d;
  d.p = parse_exponent(a.p, "--p");
  if (d.p.is_one()) throw std::invalid_argument("--p must exceed 1.");
  d.delta = a.delta;
  d.inner = inner_method_from_string(a.inner);
  BisectionConfig config;
  config.delta = a.delta;
  d.bisection = p_to_1_norm_via_bisection(A, d.p, config, d.inner);
  OperatorNormEstimate ref = operator_norm(A, d.p, Exponent::one());
  if (ref.exact) d.reference = ref.value;
  out << serialize(d);
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Containment radii of ellipsotopes and safe-set synthesis."};
  app.require_subcommand(1);

  ContainArgs ca;
  auto* contain = app.add_subcommand("contain", "Containment radius of an inbody in a circumbody.");
  contain->add_option("inbody", ca.inbody, "inbody set document")->required();
  contain->add_option("circumbody", ca.circumbody, "circumbody set document")->required();
  contain->add_option("--method", ca.method, "containment method")
      ->check(CLI::IsMember({"auto", "vpoly", "ellipsoid_sdp", "ellipsoid_eigen", "lr", "zsr", "lr+zsr", "sr",
                             "fallback", "bruteforce", "facets", "exact"}));
  contain->add_option("--tol", ca.tol, "solver tolerance")->check(CLI::Range(1e-14, 1e-2));
  contain->add_option("--oracle-limit", ca.oracle_limit, "largest generator count for enumeration")
      ->check(CLI::Range(1, 30));
  contain->add_option("--seed", ca.seed, "seed of the sampling lower bound");
  contain->add_flag("--timing", ca.timing, "include wall-clock seconds");

  NormArgs na;
  auto* norm = app.add_subcommand("norm", "Matrix norms.");
  norm->add_option("matrix", na.matrix, "matrix document")->required();
  norm->add_option("--kind", na.kind, "lpq, lpq_transposed or op")
      ->check(CLI::IsMember({"lpq", "lpq_transposed", "op"}));
  norm->add_option("--p", na.p, "inner exponent");
  norm->add_option("--q", na.q, "outer exponent");
  norm->add_option("--seed", na.seed, "seed of the ascent starts");

  SafeSetArgs sa;
  auto* safeset = app.add_subcommand("safeset", "Safe set and controller synthesis.");
  safeset->add_option("problem", sa.problem, "problem document")->required();
  safeset->add_option("--template", sa.template_kind, "zonotope or ellipsoid")
      ->check(CLI::IsMember({"zonotope", "ellipsoid"}));
  safeset->add_option("--out", sa.out_dir, "output directory")->required();
  safeset->add_option("--tol", sa.tol, "solver tolerance")->check(CLI::Range(1e-14, 1e-2));
  safeset->add_option("--dims", sa.dims, "projection dimensions")->expected(2)->delimiter(',');
  safeset->add_option("--trajectories", sa.trajectories, "closed-loop runs from boundary points");
  safeset->add_option("--seed", sa.seed, "seed of the first run");
  safeset->add_flag("--timing", sa.timing, "include solve seconds");

  HardnessArgs ha;
  auto* hardness = app.add_subcommand("hardness-demo", "p-to-1 norm through containment bisection.");
  hardness->add_option("matrix", ha.matrix, "matrix document")->required();
  hardness->add_option("--p", ha.p, "exponent in (1, inf]");
  hardness->add_option("--delta", ha.delta, "relative accuracy")->check(CLI::Range(1e-6, 0.5));
  hardness->add_option("--inner", ha.inner, "inner radius method")
      ->check(CLI::IsMember({"auto", "bruteforce", "facets", "lr", "containment"}));

  std::vector<const char*> argv{"ellipsotope"};
  for (const std::string& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kExitBadInput;
  }

  try {
    if (*contain) return cmd_contain(ca, out);
    if (*norm) return cmd_norm(na, out);
    if (*safeset) return cmd_safeset(sa, out, err);
    return cmd_hardness(ha, out);
  } catch (const DocumentError& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const SolverFailure& e) {
    err << "solver failure: " << e.what() << '\n';
    return kExitSolverFailure;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << '\n';
    return kExitSolverFailure;
  }
}

}  // namespace ellipsotope::cli
