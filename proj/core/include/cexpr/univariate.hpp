#pragma once

#include <string>
#include <vector>

#include "cexpr/expr.hpp"

namespace cexpr {

/// One constraint along a single axis: the order-th derivative in `var` at
/// `point` must equal `target`. Targets may be constants or expressions in
/// the other variables (manifold data).
struct UnivariateConstraint {
  double point = 0.0;
  int order = 0;
  Expr target;
};

struct UnivariateSpec {
  std::string var;
  std::vector<UnivariateConstraint> constraints;
  /// Support functions p_k(var). Empty means monomials 1, var, var^2, ...
  std::vector<Expr> support;
  Expr g;
};

struct UnivariateCe {
  Expr f;                                   ///< g + sum_k eta_k * p_k
  std::vector<Expr> eta;                    ///< coefficient functions (order matches constraints)
  std::vector<std::vector<double>> b_inverse; ///< inverse constraint matrix, eta = B^-1 r
  double rcond = 0.0;                       ///< reciprocal condition estimate of B
};

/// Solves the linear system pinning the support coefficients so every
/// constraint holds for the given free function. Throws SolveError when the
/// constraint matrix over the support functions is singular; the message
/// names the offending column and suggests the shifted power basis.
UnivariateCe build_univariate_ce(const UnivariateSpec& spec);

/// Interpolation-form constrained expression over distinct nodes:
///   f = g + sum_k (target_k - g|_(var=w_k)) * prod_{j!=k} (var-w_j)/(w_k-w_j)
Expr waring_ce(const std::string& var, const std::vector<double>& nodes,
               const std::vector<Expr>& targets, const Expr& g);

} // namespace cexpr
