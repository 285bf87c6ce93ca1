#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ellipsotope::cli {

// exit codes; 0-2 mirror the containment verdict
inline constexpr int kExitContained = 0;
inline constexpr int kExitNotContained = 1;
inline constexpr int kExitUnknown = 2;
inline constexpr int kExitInfeasible = 3;
inline constexpr int kExitBadInput = 64;
inline constexpr int kExitSolverFailure = 70;

// overrides the default solver tolerance when --tol is absent
inline constexpr const char* kSolverTolEnv = "ELLIPSOTOPE_SOLVER_TOL";

// args excludes the program name
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ellipsotope::cli
