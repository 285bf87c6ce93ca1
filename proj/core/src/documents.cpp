#include "ellipsotope/documents.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace ellipsotope {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using Json = nlohmann::ordered_json;

namespace {

std::string format_double(double x) {
  if (std::isnan(x)) return "\"nan\"";
  if (std::isinf(x)) return x > 0 ? "\"inf\"" : "\"-inf\"";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  std::string s(buf);
  // keep floats floats, and -0 negative
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

bool is_flat_array(const Json& j) {
  for (const auto& e : j)
    if (e.is_array() || e.is_object()) return false;
  return true;
}

void emit(const Json& j, std::string& out, int depth) {
  const std::string pad(2 * (depth + 1), ' ');
  const std::string close(2 * depth, ' ');
  if (j.is_object()) {
    if (j.empty()) {
      out += "{}";
      return;
    }
    out += "{\n";
    bool first = true;
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!first) out += ",\n";
      first = false;
      out += pad + Json(it.key()).dump() + ": ";
      emit(it.value(), out, depth + 1);
    }
    out += "\n" + close + "}";
  } else if (j.is_array()) {
    if (j.empty()) {
      out += "[]";
    } else if (is_flat_array(j)) {
      out += "[";
      for (size_t i = 0; i < j.size(); ++i) {
        if (i) out += ", ";
        emit(j[i], out, depth + 1);
      }
      out += "]";
    } else {
      out += "[\n";
      for (size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        emit(j[i], out, depth + 1);
      }
      out += "\n" + close + "]";
    }
  } else if (j.is_number_float()) {
    out += format_double(j.get<double>());
  } else {
    out += j.dump();
  }
}

std::string dump(const Json& j) {
  std::string out;
  emit(j, out, 0);
  out += '\n';
  return out;
}

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw DocumentError("malformed JSON at byte " + std::to_string(e.byte) + ".");
  }
}

template <class F>
auto guarded(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    throw DocumentError(e.what());
  }
}

const Json& field(const Json& j, const std::string& key) {
  if (!j.is_object()) throw DocumentError("expected a JSON object.");
  auto it = j.find(key);
  if (it == j.end()) throw DocumentError("missing field '" + key + "'.");
  return *it;
}

const Json* optional_field(const Json& j, const std::string& key) {
  auto it = j.find(key);
  return it == j.end() || it->is_null() ? nullptr : &*it;
}

void expect_kind(const Json& j, const std::string& kind) {
  const Json& k = field(j, "kind");
  if (!k.is_string() || k.get<std::string>() != kind)
    throw DocumentError("expected a document of kind '" + kind + "'.");
}

double to_number(const Json& j, const std::string& what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw DocumentError("field '" + what + "' must be a number.");
}

double number(const Json& j, const std::string& key) { return to_number(field(j, key), key); }

long long integer(const Json& j, const std::string& key) {
  const Json& v = field(j, key);
  if (!v.is_number_integer()) throw DocumentError("field '" + key + "' must be an integer.");
  return v.get<long long>();
}

bool boolean(const Json& j, const std::string& key) {
  const Json& v = field(j, key);
  if (!v.is_boolean()) throw DocumentError("field '" + key + "' must be true or false.");
  return v.get<bool>();
}

std::string text(const Json& j, const std::string& key) {
  const Json& v = field(j, key);
  if (!v.is_string()) throw DocumentError("field '" + key + "' must be a string.");
  return v.get<std::string>();
}

Json exponent_json(const Exponent& p) {
  if (p.is_infinite()) return "inf";
  return p.value();
}

Exponent exponent(const Json& j, const std::string& key) {
  const double v = number(j, key);
  return guarded([&] { return Exponent(v); });
}

Json vector_json(const VectorXd& v) {
  Json a = Json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

VectorXd to_vector(const Json& j, const std::string& key) {
  if (!j.is_array()) throw DocumentError("field '" + key + "' must be an array of numbers.");
  VectorXd v(static_cast<Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = to_number(j[i], key);
  return v;
}

VectorXd vector(const Json& j, const std::string& key) { return to_vector(field(j, key), key); }

// outer list indexes rows, or columns when by_column
Json matrix_json(const MatrixXd& M, bool by_column) {
  Json a = Json::array();
  const Index outer = by_column ? M.cols() : M.rows();
  for (Index i = 0; i < outer; ++i) a.push_back(vector_json(by_column ? VectorXd(M.col(i)) : VectorXd(M.row(i))));
  return a;
}

MatrixXd to_matrix(const Json& j, const std::string& key, bool by_column) {
  if (!j.is_array()) throw DocumentError("field '" + key + "' must be an array of arrays.");
  if (j.empty()) return MatrixXd(0, 0);
  const Index outer = static_cast<Index>(j.size());
  Index inner = -1;
  MatrixXd M;
  for (Index i = 0; i < outer; ++i) {
    VectorXd v = to_vector(j[static_cast<size_t>(i)], key);
    if (inner < 0) {
      inner = v.size();
      M = by_column ? MatrixXd(inner, outer) : MatrixXd(outer, inner);
    }
    if (v.size() != inner) throw DocumentError("field '" + key + "' has entries of unequal length.");
    if (by_column) M.col(i) = v;
    else M.row(i) = v.transpose();
  }
  return M;
}

MatrixXd rows(const Json& j, const std::string& key) { return to_matrix(field(j, key), key, false); }

Json polyhedron_json(const HPolyhedron& P) {
  Json j;
  j["Lambda"] = matrix_json(P.Lambda, false);
  j["lambda"] = vector_json(P.lambda);
  return j;
}

HPolyhedron polyhedron(const Json& j, const std::string& key, Index dim) {
  const Json& p = field(j, key);
  MatrixXd L = rows(p, "Lambda");
  VectorXd l = vector(p, "lambda");
  if (L.size() == 0 && L.cols() != dim) L.resize(L.rows(), dim);
  if (L.cols() != dim) throw DocumentError("field '" + key + "' has the wrong dimension.");
  return guarded([&] { return HPolyhedron(L, l); });
}

Verdict verdict_from_string(const std::string& s) {
  for (Verdict v : {Verdict::contained, Verdict::not_contained, Verdict::unknown})
    if (to_string(v) == s) return v;
  throw DocumentError("unknown verdict '" + s + "'.");
}

MatrixNormKind::Tag norm_tag_from_string(const std::string& s) {
  if (s == "lpq") return MatrixNormKind::Tag::lpq;
  if (s == "lpq_transposed") return MatrixNormKind::Tag::lpq_transposed;
  if (s == "op") return MatrixNormKind::Tag::op;
  throw DocumentError("unknown norm kind '" + s + "'.");
}

std::string to_string(MatrixNormKind::Tag t) {
  switch (t) {
    case MatrixNormKind::Tag::lpq: return "lpq";
    case MatrixNormKind::Tag::lpq_transposed: return "lpq_transposed";
    default: return "op";
  }
}

}  // namespace

std::string serialize(const SetDocument& d) {
  Json j;
  j["kind"] = "ellipsotope";
  if (!d.name.empty()) j["name"] = d.name;
  j["p"] = exponent_json(d.set.p);
  j["center"] = vector_json(d.set.c);
  j["generators"] = matrix_json(d.set.G, true);
  return dump(j);
}

SetDocument parse_set_document(const std::string& s) {
  const Json j = parse_json(s);
  expect_kind(j, "ellipsotope");
  std::string name;
  if (const Json* n = optional_field(j, "name")) {
    if (!n->is_string()) throw DocumentError("field 'name' must be a string.");
    name = n->get<std::string>();
  }
  const Exponent p = exponent(j, "p");
  VectorXd c = vector(j, "center");
  MatrixXd G = to_matrix(field(j, "generators"), "generators", true);
  if (G.size() == 0) G.resize(c.size(), 0);
  if (G.rows() != c.size()) throw DocumentError("generators and center have different dimensions.");
  return SetDocument{name, guarded([&] { return Ellipsotope(p, G, c); })};
}

std::string serialize(const MatrixDocument& d) {
  Json j;
  j["kind"] = "matrix";
  j["rows"] = matrix_json(d.A, false);
  return dump(j);
}

MatrixDocument parse_matrix_document(const std::string& s) {
  const Json j = parse_json(s);
  if (j.is_array()) return {to_matrix(j, "rows", false)};
  expect_kind(j, "matrix");
  return {rows(j, "rows")};
}

std::string serialize(const ResultDocument& d) {
  const ContainmentResult& r = d.result;
  Json j;
  j["kind"] = "containment_result";
  j["r_lower"] = r.r_lower;
  j["r_upper"] = r.r_upper;
  j["verdict"] = to_string(r.verdict);
  j["method"] = to_string(r.method);
  j["exact"] = r.exact;
  j["lr_certificate"] = r.lr_certificate;
  j["note"] = r.note;
  Json w;
  w["X"] = matrix_json(r.witness.X, false);
  w["Y"] = matrix_json(r.witness.Y, false);
  w["rho"] = r.witness.rho;
  w["delta"] = r.witness.delta;
  w["v"] = vector_json(r.witness.v);
  w["w"] = vector_json(r.witness.w);
  w["alpha"] = vector_json(r.witness.alpha);
  j["witness"] = w;
  Json sv;
  sv["feas_tol"] = d.solver.feas_tol;
  sv["gap_tol"] = d.solver.gap_tol;
  sv["max_iterations"] = d.solver.max_iterations;
  j["solver"] = sv;
  if (d.seconds) j["seconds"] = *d.seconds;
  return dump(j);
}

ResultDocument parse_result_document(const std::string& s) {
  const Json j = parse_json(s);
  expect_kind(j, "containment_result");
  ResultDocument d;
  ContainmentResult& r = d.result;
  r.r_lower = number(j, "r_lower");
  r.r_upper = number(j, "r_upper");
  r.verdict = verdict_from_string(text(j, "verdict"));
  r.method = guarded([&] { return method_from_string(text(j, "method")); });
  r.exact = boolean(j, "exact");
  r.lr_certificate = boolean(j, "lr_certificate");
  r.note = text(j, "note");
  const Json& w = field(j, "witness");
  r.witness.X = rows(w, "X");
  r.witness.Y = rows(w, "Y");
  r.witness.rho = number(w, "rho");
  r.witness.delta = number(w, "delta");
  r.witness.v = vector(w, "v");
  r.witness.w = vector(w, "w");
  r.witness.alpha = vector(w, "alpha");
  const Json& sv = field(j, "solver");
  d.solver.feas_tol = number(sv, "feas_tol");
  d.solver.gap_tol = number(sv, "gap_tol");
  d.solver.max_iterations = static_cast<int>(integer(sv, "max_iterations"));
  if (const Json* t = optional_field(j, "seconds")) d.seconds = to_number(*t, "seconds");
  return d;
}

std::string serialize(const NormDocument& d) {
  Json j;
  j["kind"] = "norm";
  j["norm"] = to_string(d.kind.tag);
  j["p"] = exponent_json(d.kind.p);
  j["q"] = exponent_json(d.kind.q);
  j["value"] = d.value;
  j["exact"] = d.exact;
  return dump(j);
}

NormDocument parse_norm_document(const std::string& s) {
  const Json j = parse_json(s);
  expect_kind(j, "norm");
  NormDocument d;
  d.kind.tag = norm_tag_from_string(text(j, "norm"));
  d.kind.p = exponent(j, "p");
  d.kind.q = exponent(j, "q");
  d.value = number(j, "value");
  d.exact = boolean(j, "exact");
  return d;
}

std::string serialize(const HardnessDocument& d) {
  const BisectionResult& b = d.bisection;
  Json j;
  j["kind"] = "hardness_report";
  j["p"] = exponent_json(d.p);
  j["delta"] = d.delta;
  j["inner"] = to_string(d.inner);
  j["xi_star"] = b.xi_star;
  j["xi_hat"] = b.xi_hat;
  j["mu"] = b.mu;
  j["epsilon"] = b.epsilon;
  j["iterations"] = b.iterations;
  j["certificate_free"] = b.certificate_free;
  j["heuristic"] = b.heuristic;
  if (d.reference) {
    j["reference"] = *d.reference;
    j["relative_error"] = std::abs(b.xi_star - *d.reference) / *d.reference;
  }
  Json trace = Json::array();
  for (const BisectionStep& st : b.trace) {
    Json e;
    e["a"] = st.a;
    e["b"] = st.b;
    e["xi"] = st.xi;
    e["sigma"] = st.approx;
    trace.push_back(e);
  }
  j["trace"] = trace;
  return dump(j);
}

HardnessDocument parse_hardness_document(const std::string& s) {
  const Json j = parse_json(s);
  expect_kind(j, "hardness_report");
  HardnessDocument d;
  d.p = exponent(j, "p");
  d.delta = number(j, "delta");
  d.inner = guarded([&] { return inner_method_from_string(text(j, "inner")); });
  BisectionResult& b = d.bisection;
  b.xi_star = number(j, "xi_star");
  b.xi_hat = number(j, "xi_hat");
  b.mu = number(j, "mu");
  b.epsilon = number(j, "epsilon");
  b.iterations = static_cast<int>(integer(j, "iterations"));
  b.certificate_free = boolean(j, "certificate_free");
  b.heuristic = boolean(j, "heuristic");
  if (const Json* r = optional_field(j, "reference")) d.reference = to_number(*r, "reference");
  const Json& trace = field(j, "trace");
  if (!trace.is_array()) throw DocumentError("field 'trace' must be an array.");
  for (const Json& e : trace) b.trace.push_back({number(e, "a"), number(e, "b"), number(e, "xi"), number(e, "sigma")});
  return d;
}

std::string serialize(const ControllerDocument& d) {
  const Controller& c = d.controller;
  Json j;
  j["kind"] = "controller";
  j["t_end"] = c.t_end;
  j["q"] = exponent_json(c.q);
  j["K"] = matrix_json(c.K, false);
  j["G_T"] = matrix_json(c.G_T, false);
  j["c_T"] = vector_json(c.c_T);
  Json steps = Json::array();
  for (size_t i = 0; i < c.c_u.size(); ++i) {
    Json e;
    e["c_u"] = vector_json(c.c_u[i]);
    e["U"] = matrix_json(i < c.U_blocks.size() ? c.U_blocks[i] : MatrixXd(), false);
    steps.push_back(e);
  }
  j["steps"] = steps;
  return dump(j);
}

ControllerDocument parse_controller_document(const std::string& s) {
  const Json j = parse_json(s);
  expect_kind(j, "controller");
  ControllerDocument d;
  Controller& c = d.controller;
  c.t_end = number(j, "t_end");
  c.q = exponent(j, "q");
  c.K = rows(j, "K");
  c.G_T = rows(j, "G_T");
  c.c_T = vector(j, "c_T");
  const Json& steps = field(j, "steps");
  if (!steps.is_array()) throw DocumentError("field 'steps' must be an array.");
  for (const Json& e : steps) {
    c.c_u.push_back(vector(e, "c_u"));
    c.U_blocks.push_back(rows(e, "U"));
  }
  if (c.G_T.rows() != c.c_T.size()) throw DocumentError("G_T and c_T have different dimensions.");
  return d;
}

std::string serialize(const SafeSetReportDocument& d) {
  const SafeSetDiagnostics& g = d.diagnostics;
  Json j;
  j["kind"] = "safeset_report";
  j["found"] = d.found;
  j["message"] = d.message;
  j["template"] = to_string(d.template_kind);
  j["s"] = vector_json(d.s);
  Json dj;
  dj["status"] = g.status;
  dj["objective"] = g.objective;
  dj["iterations"] = g.iterations;
  dj["primal_residual"] = g.primal_residual;
  dj["dual_residual"] = g.dual_residual;
  dj["relative_gap"] = g.relative_gap;
  if (d.timing) dj["solve_seconds"] = g.solve_seconds;
  dj["variables"] = static_cast<long long>(g.variables);
  dj["constraints"] = static_cast<long long>(g.constraints);
  dj["verify_radius"] = g.verify_radius;
  dj["hull_radius"] = g.hull_radius;
  dj["min_polyhedron_margin"] = g.min_polyhedron_margin;
  dj["lqr_spectral_radius"] = g.lqr_spectral_radius;
  dj["lqr_weights"] = g.lqr_weights;
  j["diagnostics"] = dj;
  return dump(j);
}

SafeSetReportDocument parse_safeset_report_document(const std::string& s) {
  const Json j = parse_json(s);
  expect_kind(j, "safeset_report");
  SafeSetReportDocument d;
  d.found = boolean(j, "found");
  d.message = text(j, "message");
  d.template_kind = guarded([&] { return template_from_string(text(j, "template")); });
  d.s = vector(j, "s");
  const Json& dj = field(j, "diagnostics");
  SafeSetDiagnostics& g = d.diagnostics;
  g.status = text(dj, "status");
  g.objective = number(dj, "objective");
  g.iterations = static_cast<int>(integer(dj, "iterations"));
  g.primal_residual = number(dj, "primal_residual");
  g.dual_residual = number(dj, "dual_residual");
  g.relative_gap = number(dj, "relative_gap");
  if (const Json* t = optional_field(dj, "solve_seconds")) {
    d.timing = true;
    g.solve_seconds = to_number(*t, "solve_seconds");
  }
  g.variables = integer(dj, "variables");
  g.constraints = integer(dj, "constraints");
  g.verify_radius = number(dj, "verify_radius");
  g.hull_radius = number(dj, "hull_radius");
  g.min_polyhedron_margin = number(dj, "min_polyhedron_margin");
  g.lqr_spectral_radius = number(dj, "lqr_spectral_radius");
  g.lqr_weights = text(dj, "lqr_weights");
  return d;
}

std::string serialize(const SafeSetProblem& p) {
  Json j;
  j["kind"] = "safeset_problem";
  j["A"] = matrix_json(p.system.A, false);
  j["B"] = matrix_json(p.system.B, false);
  j["E"] = matrix_json(p.system.E, false);
  j["chi"] = vector_json(p.system.chi);
  j["X"] = polyhedron_json(p.X);
  j["U"] = polyhedron_json(p.U);
  Json w;
  w["generators"] = matrix_json(p.GW, true);
  j["W"] = w;
  j["t_end"] = p.t_end;
  j["N_ts"] = p.N_ts;
  j["eta"] = p.eta;
  j["template"] = to_string(p.template_kind);
  j["m"] = static_cast<long long>(p.m);
  j["m_u"] = static_cast<long long>(p.m_u);
  if (p.lqr_Q.size() != 0) j["lqr_Q"] = matrix_json(p.lqr_Q, false);
  if (p.lqr_Rw.size() != 0) j["lqr_Rw"] = matrix_json(p.lqr_Rw, false);
  return dump(j);
}

SafeSetProblem parse_problem_document(const std::string& s, std::optional<TemplateKind> template_override) {
  const Json j = parse_json(s);
  const std::string kind = text(j, "kind");
  if (kind == "platoon") {
    const long long k = integer(j, "k");
    if (k < 1 || k > 64) throw DocumentError("platoon size must lie in [1, 64].");
    TemplateKind t = TemplateKind::zonotope;
    if (optional_field(j, "template")) t = guarded([&] { return template_from_string(text(j, "template")); });
    if (template_override) t = *template_override;
    return platoon_benchmark(static_cast<int>(k), t);
  }
  expect_kind(j, "safeset_problem");
  MatrixXd A = rows(j, "A");
  MatrixXd B = rows(j, "B");
  MatrixXd E = optional_field(j, "E") ? rows(j, "E") : MatrixXd(0, 0);
  VectorXd chi = optional_field(j, "chi") ? vector(j, "chi") : VectorXd(0);
  LtiSystem sys = guarded([&] { return LtiSystem(A, B, E, chi); });
  HPolyhedron X = polyhedron(j, "X", sys.nx());
  HPolyhedron U = polyhedron(j, "U", sys.nu());
  MatrixXd GW = to_matrix(field(field(j, "W"), "generators"), "generators", true);
  if (GW.size() == 0) GW.resize(sys.nw(), 0);
  SafeSetProblem p(sys, X, U, GW);
  if (optional_field(j, "t_end")) p.t_end = number(j, "t_end");
  if (optional_field(j, "N_ts")) p.N_ts = static_cast<int>(integer(j, "N_ts"));
  if (optional_field(j, "eta")) p.eta = static_cast<int>(integer(j, "eta"));
  if (optional_field(j, "template"))
    p.template_kind = guarded([&] { return template_from_string(text(j, "template")); });
  if (optional_field(j, "m")) p.m = integer(j, "m");
  if (optional_field(j, "m_u")) p.m_u = integer(j, "m_u");
  if (optional_field(j, "lqr_Q")) p.lqr_Q = rows(j, "lqr_Q");
  if (optional_field(j, "lqr_Rw")) p.lqr_Rw = rows(j, "lqr_Rw");
  if (template_override && *template_override != p.template_kind) {
    p.template_kind = *template_override;
    p.m = 0;
    p.m_u = 0;
  }
  guarded([&] { p.validate(); });
  return p;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DocumentError("cannot read '" + path + "'.");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'.");
  out << contents;
  if (!out) throw std::runtime_error("cannot write '" + path + "'.");
}

}  // namespace ellipsotope
