#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ellipsotope/containment.hpp"
#include "ellipsotope/hardness.hpp"
#include "ellipsotope/norms.hpp"
#include "ellipsotope/safeset.hpp"
#include "ellipsotope/sets.hpp"

namespace ellipsotope {

// JSON text that does not describe a valid document
class DocumentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numbers are written with 17 significant digits; infinities and NaN as the
// strings "inf", "-inf" and "nan". Set generators are lists of columns, every
// other matrix is a list of rows.

struct SetDocument {
  std::string name;  // omitted when empty
  Ellipsotope set;
};

struct MatrixDocument {
  Eigen::MatrixXd A;
};

struct ResultDocument {
  ContainmentResult result;
  conic::SolverSettings solver;
  std::optional<double> seconds;
};

struct NormDocument {
  MatrixNormKind kind;
  double value = 0.0;
  bool exact = true;
};

struct HardnessDocument {
  Exponent p = Exponent::infinity();
  double delta = 0.05;
  InnerMethod inner = InnerMethod::automatic;
  BisectionResult bisection;
  std::optional<double> reference;  // enumerated ||A||_{p->1} when available
};

struct ControllerDocument {
  Controller controller;
};

struct SafeSetReportDocument {
  bool found = false;
  std::string message;
  TemplateKind template_kind = TemplateKind::zonotope;
  Eigen::VectorXd s;
  SafeSetDiagnostics diagnostics;
  bool timing = false;  // solve_seconds is written only when set
};

std::string serialize(const SetDocument& d);
std::string serialize(const MatrixDocument& d);
std::string serialize(const ResultDocument& d);
std::string serialize(const NormDocument& d);
std::string serialize(const HardnessDocument& d);
std::string serialize(const ControllerDocument& d);
std::string serialize(const SafeSetReportDocument& d);
std::string serialize(const SafeSetProblem& problem);

SetDocument parse_set_document(const std::string& text);
// also accepts a bare list of rows
MatrixDocument parse_matrix_document(const std::string& text);
ResultDocument parse_result_document(const std::string& text);
NormDocument parse_norm_document(const std::string& text);
HardnessDocument parse_hardness_document(const std::string& text);
ControllerDocument parse_controller_document(const std::string& text);
SafeSetReportDocument parse_safeset_report_document(const std::string& text);
// also accepts {"kind": "platoon", "k": ..., "template": ...}. A template
// override that differs from the document resets m to its default.
SafeSetProblem parse_problem_document(const std::string& text, std::optional<TemplateKind> template_override = {});

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace ellipsotope
