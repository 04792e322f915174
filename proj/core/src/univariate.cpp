#include "cexpr/univariate.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "cexpr/errors.hpp"

namespace cexpr {

namespace {

Expr functional(const Expr& e, const std::string& var, double p, int d) {
  return substitute(diff(e, var, d), var, p);
}

} // namespace

UnivariateCe build_univariate_ce(const UnivariateSpec& spec) {
  const std::size_t n = spec.constraints.size();
  if (n == 0) throw InvalidSpec("need at least one constraint");
  if (spec.var.empty()) throw InvalidSpec("constrained variable name must not be empty");
  for (std::size_t i = 0; i < n; ++i) {
    if (spec.constraints[i].order < 0) throw InvalidSpec("constraint order must be non-negative");
    for (std::size_t j = i + 1; j < n; ++j)
      if (spec.constraints[i].point == spec.constraints[j].point &&
          spec.constraints[i].order == spec.constraints[j].order)
        throw InvalidSpec("duplicate constraint (point, order)");
  }

  std::vector<Expr> support = spec.support;
  if (support.empty()) {
    for (std::size_t k = 0; k < n; ++k)
      support.push_back(pow(Expr::variable(spec.var), static_cast<double>(k)));
  }
  if (support.size() != n)
    throw InvalidSpec("support function count must match constraint count");

  Eigen::MatrixXd B(n, n);
  for (std::size_t m = 0; m < n; ++m) {
    for (std::size_t k = 0; k < n; ++k) {
      Expr v = functional(support[k], spec.var, spec.constraints[m].point,
                          spec.constraints[m].order);
      if (!v.is_constant())
        throw InvalidSpec("support function " + std::to_string(k + 1) +
                          " must depend only on '" + spec.var + "'");
      B(m, k) = v.constant_value();
    }
  }

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
  Eigen::MatrixXd inv = lu.inverse();
  double rcond = 0.0;
  if (inv.allFinite())
    rcond = 1.0 / (B.cwiseAbs().colwise().sum().maxCoeff() *
                   inv.cwiseAbs().colwise().sum().maxCoeff());
  if (!(rcond >= 1e-12)) {
    // name the column that dies first under elimination
    Eigen::FullPivLU<Eigen::MatrixXd> full(B);
    std::size_t bad = n - 1;
    if (full.rank() < static_cast<Eigen::Index>(n)) {
      // the first column outside the pivot set
      const auto perm = full.permutationQ().indices();
      std::vector<bool> pivoted(n, false);
      for (Eigen::Index r = 0; r < full.rank(); ++r) pivoted[perm[r]] = true;
      for (std::size_t k = 0; k < n; ++k)
        if (!pivoted[k]) { bad = k; break; }
    }
    throw SolveError("constraint matrix over the support functions is singular; column " +
                     std::to_string(bad + 1) + " (" + support[bad].str() +
                     ") is degenerate under these functionals. Derivative-only constraint "
                     "sets annihilate constant support; shifting to p_k = " + spec.var +
                     "^k usually fixes this.");
  }

  UnivariateCe out;
  out.rcond = rcond;
  out.b_inverse.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out.b_inverse[i][j] = inv(i, j);

  // residual targets: r_m = target_m - (functional_m applied to g)
  std::vector<Expr> r;
  r.reserve(n);
  for (std::size_t m = 0; m < n; ++m)
    r.push_back(spec.constraints[m].target -
                functional(spec.g, spec.var, spec.constraints[m].point,
                           spec.constraints[m].order));

  Expr f = spec.g;
  out.eta.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    Expr eta = Expr::constant(0.0);
    for (std::size_t m = 0; m < n; ++m) eta = eta + Expr::constant(inv(k, m)) * r[m];
    f = f + eta * support[k];
    out.eta.push_back(std::move(eta));
  }
  out.f = std::move(f);
  return out;
}

Expr waring_ce(const std::string& var, const std::vector<double>& nodes,
               const std::vector<Expr>& targets, const Expr& g) {
  if (nodes.empty()) throw InvalidSpec("need at least one node");
  if (nodes.size() != targets.size())
    throw InvalidSpec("node and target counts must match");
  for (std::size_t i = 0; i < nodes.size(); ++i)
    for (std::size_t j = i + 1; j < nodes.size(); ++j)
      if (nodes[i] == nodes[j]) throw InvalidSpec("interpolation nodes must be distinct");

  Expr f = g;
  const Expr t = Expr::variable(var);
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    Expr num = Expr::constant(1.0);
    double den = 1.0;
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      if (j == k) continue;
      num = num * (t - Expr::constant(nodes[j]));
      den *= nodes[k] - nodes[j];
    }
    f = f + (targets[k] - substitute(g, var, nodes[k])) * (num / Expr::constant(den));
  }
  return f;
}

} // namespace cexpr
