#pragma once

#include <optional>
#include <string>

#include "cexpr/domain.hpp"
#include "cexpr/expr.hpp"
#include "cexpr/pde.hpp"

namespace cexpr {

struct ToleranceConfig {
  double boundary = 1e-9;
  double compatibility = 1e-9;
};

// A parsed problem description: the domain, the boundary conditions, the
// free function, and optionally a differential equation to solve.
struct LoadedConfig {
  Domain domain;
  ConstraintSet constraints;
  Expr free_function;
  std::optional<PdeProblem> pde;
  ToleranceConfig tolerances;
};

/// Parses a JSON problem description. Sections: "domain" (list of axes with
/// lo/hi and optional names), "constraints" (list of {axis, point, order,
/// expr, pre_sliced}), "free_function" (expression string, default "0"),
/// optional "pde" ({operator: [{delta, coeff}], source, degree,
/// collocation}), optional "tolerances" ({boundary, compatibility}).
/// `origin` names the source in error messages.
LoadedConfig parse_config(const std::string& text, const std::string& origin);

/// parse_config over a file's contents.
LoadedConfig load_config(const std::string& path);

}  // namespace cexpr
