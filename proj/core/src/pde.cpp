#include "cexpr/pde.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <utility>

#include "cexpr/errors.hpp"

namespace cexpr {

namespace {

// Monomial coefficient rows for T_0 .. T_n via T_{k+1} = 2 t T_k - T_{k-1}.
std::vector<std::vector<double>> chebyshev_rows(int n) {
  std::vector<std::vector<double>> rows{{1.0}};
  if (n >= 1) rows.push_back({0.0, 1.0});
  for (int k = 2; k <= n; ++k) {
    std::vector<double> row(static_cast<std::size_t>(k) + 1, 0.0);
    for (std::size_t i = 0; i < rows[k - 1].size(); ++i) row[i + 1] += 2.0 * rows[k - 1][i];
    for (std::size_t i = 0; i < rows[k - 2].size(); ++i) row[i] -= rows[k - 2][i];
    rows.push_back(std::move(row));
  }
  return rows;
}

Expr horner(const std::vector<double>& coeff, const Expr& u) {
  Expr acc = Expr::constant(coeff.back());
  for (std::size_t i = coeff.size() - 1; i-- > 0;)
    acc = acc * u + Expr::constant(coeff[i]);
  return acc;
}

Expr affine_to_unit(const Expr& var, double lo, double hi) {
  // Maps [lo, hi] onto [-1, 1].
  return Expr::constant(2.0 / (hi - lo)) * var + Expr::constant(-(hi + lo) / (hi - lo));
}

}  // namespace

std::vector<Expr> make_basis(const Domain& dom, int degree) {
  if (dom.dim() != 2) throw InvalidSpec("the collocation solver works on 2-D domains");
  if (degree < 1) throw InvalidSpec("basis degree must be at least 1");

  const auto rows = chebyshev_rows(degree);
  const Expr xu = affine_to_unit(Expr::variable(dom.axis(0).name), dom.axis(0).lo, dom.axis(0).hi);
  const Expr yu = affine_to_unit(Expr::variable(dom.axis(1).name), dom.axis(1).lo, dom.axis(1).hi);

  std::vector<Expr> tx, ty;
  for (int k = 0; k <= degree; ++k) {
    tx.push_back(horner(rows[k], xu));
    ty.push_back(horner(rows[k], yu));
  }

  std::vector<Expr> basis;
  basis.reserve(static_cast<std::size_t>((degree + 1) * (degree + 2) / 2));
  for (int total = 0; total <= degree; ++total)
    for (int a = total; a >= 0; --a) basis.push_back(tx[a] * ty[total - a]);
  return basis;
}

std::vector<double> cgl_nodes(double lo, double hi, std::size_t m) {
  if (m < 2) throw InvalidSpec("need at least two collocation nodes per axis");
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  std::vector<double> nodes(m);
  for (std::size_t i = 0; i < m; ++i)
    nodes[i] = mid - half * std::cos(3.14159265358979323846 * static_cast<double>(i) /
                                     static_cast<double>(m - 1));
  nodes.front() = lo;
  nodes.back() = hi;
  return nodes;
}

PdeSolution solve(const PdeProblem& problem) {
  const Domain& dom = problem.constraints.domain();
  if (dom.dim() != 2) throw InvalidSpec("the collocation solver works on 2-D domains");
  if (problem.op_terms.empty()) throw InvalidSpec("the differential operator has no terms");
  for (const PdeTerm& t : problem.op_terms) {
    if (t.delta.size() != 2) throw InvalidSpec("operator multi-index must have one order per axis");
    for (int d : t.delta)
      if (d < 0 || d > 2) throw InvalidSpec("operator order per axis must be between 0 and 2");
  }

  const CompatReport compat = validate_compatibility(problem.constraints);
  if (!compat.ok)
    throw InvalidSpec("boundary conditions disagree where their planes cross");

  const std::vector<Expr> basis = make_basis(dom, problem.degree);
  const std::size_t nbasis = basis.size();

  std::size_t nx = problem.colloc.nx, ny = problem.colloc.ny;
  const auto default_m = static_cast<std::size_t>(
      std::ceil(std::sqrt(2.0 * static_cast<double>(nbasis))));
  if (nx == 0) nx = default_m;
  if (ny == 0) ny = default_m;
  if (nx < 2 || ny < 2) throw InvalidSpec("need at least two collocation nodes per axis");
  if (nx * ny < nbasis)
    throw InvalidSpec("collocation grid smaller than the basis: " + std::to_string(nx * ny) +
                      " nodes for " + std::to_string(nbasis) + " coefficients");

  const std::vector<double> xs = cgl_nodes(dom.axis(0).lo, dom.axis(0).hi, nx);
  const std::vector<double> ys = cgl_nodes(dom.axis(1).lo, dom.axis(1).hi, ny);
  const std::vector<std::string> vars = dom.var_names();

  // The surface is linear in the basis coefficients:
  //   f(xi) = u0 + sum_j xi_j * w_j,
  // where u0 carries the boundary data and each w_j is the j-th basis
  // function with its boundary trace removed, so f(xi) meets the boundary
  // conditions for every xi.
  ConstraintSet zero_set(dom);
  for (std::size_t k = 0; k < dom.dim(); ++k)
    for (const AxisConstraint& c : problem.constraints.on_axis(k))
      add_constraint(zero_set, k, c.point, c.order, Expr::constant(0.0), /*pre_sliced=*/true);

  const ConstrainedExpression u0 = assemble(problem.constraints, Expr::constant(0.0));
  std::vector<ConstrainedExpression> w;
  w.reserve(nbasis);
  for (const Expr& phi : basis) w.push_back(assemble(zero_set, phi));

  std::vector<CompiledExpr> coeff_prog;
  coeff_prog.reserve(problem.op_terms.size());
  for (const PdeTerm& t : problem.op_terms) coeff_prog.emplace_back(t.coeff, vars);
  CompiledExpr source_prog(problem.source, vars);

  const std::size_t npts = nx * ny;
  Eigen::MatrixXd A(static_cast<Eigen::Index>(npts), static_cast<Eigen::Index>(nbasis));
  Eigen::VectorXd b(static_cast<Eigen::Index>(npts));
  std::vector<double> pt(2);
  std::size_t row = 0;
  for (std::size_t iy = 0; iy < ny; ++iy)
    for (std::size_t ix = 0; ix < nx; ++ix, ++row) {
      pt[0] = xs[ix];
      pt[1] = ys[iy];
      double rhs = source_prog.eval(pt);
      for (std::size_t j = 0; j < nbasis; ++j) A(row, j) = 0.0;
      for (std::size_t ti = 0; ti < problem.op_terms.size(); ++ti) {
        const double cv = coeff_prog[ti].eval(pt);
        if (cv == 0.0) continue;
        const std::vector<int>& delta = problem.op_terms[ti].delta;
        rhs -= cv * u0.eval_partial(pt, delta);
        for (std::size_t j = 0; j < nbasis; ++j)
          A(row, j) += cv * w[j].eval_partial(pt, delta);
      }
      b(row) = rhs;
    }

  // The boundary blend reproduces part of the basis exactly (with value data
  // on all four edges, every polynomial of total degree 3: the leftover of
  // any other candidate is divisible by the corner bubble), so A is
  // rank-deficient by construction and no grid refinement changes that. Take
  // the minimum-norm least-squares solution over whatever directions survive.
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
  cod.setThreshold(1e-10);
  cod.compute(A);
  const auto rank = static_cast<std::size_t>(cod.rank());

  // A direction can also vanish because the grid cannot see it. That is the
  // grid's fault: compare against the rank on the denser midpoint grid used
  // for verification and refuse to ship a fit the grid never measured.
  const std::size_t vx = nx + 3, vy = ny + 3;
  const auto midpoint = [&](std::size_t i, std::size_t n, std::size_t axis) {
    return dom.axis(axis).lo + (static_cast<double>(i) + 0.5) / static_cast<double>(n) *
                                   (dom.axis(axis).hi - dom.axis(axis).lo);
  };
  Eigen::MatrixXd Af(static_cast<Eigen::Index>(vx * vy), static_cast<Eigen::Index>(nbasis));
  row = 0;
  for (std::size_t iy = 0; iy < vy; ++iy)
    for (std::size_t ix = 0; ix < vx; ++ix, ++row) {
      pt[0] = midpoint(ix, vx, 0);
      pt[1] = midpoint(iy, vy, 1);
      for (std::size_t j = 0; j < nbasis; ++j) Af(row, j) = 0.0;
      for (std::size_t ti = 0; ti < problem.op_terms.size(); ++ti) {
        const double cv = coeff_prog[ti].eval(pt);
        if (cv == 0.0) continue;
        for (std::size_t j = 0; j < nbasis; ++j)
          Af(row, j) += cv * w[j].eval_partial(pt, problem.op_terms[ti].delta);
      }
    }
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod_fine;
  cod_fine.setThreshold(1e-10);
  cod_fine.compute(Af);
  const auto rank_fine = static_cast<std::size_t>(cod_fine.rank());
  if (rank < rank_fine)
    throw SolveError("collocation grid is rank-deficient: it resolves " + std::to_string(rank) +
                     " of " + std::to_string(rank_fine) +
                     " independent operator directions; densify the grid");

  const Eigen::VectorXd xi = rank == 0
                                 ? Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nbasis))
                                 : Eigen::VectorXd(cod.solve(b));
  const double colloc_residual_norm = (A * xi - b).norm();

  Expr g = Expr::constant(0.0);
  for (std::size_t j = 0; j < nbasis; ++j) {
    if (xi(static_cast<Eigen::Index>(j)) == 0.0) continue;
    g = g + Expr::constant(xi(static_cast<Eigen::Index>(j))) * basis[j];
  }
  ConstrainedExpression ce = assemble(problem.constraints, g);

  // Independent check: midpoints of a uniform grid never coincide with the
  // Chebyshev-Gauss-Lobatto nodes used to fit, and the residual is taken on
  // the reassembled surface, not on A*xi.
  double verify_sq = 0.0, verify_max = 0.0;
  for (std::size_t iy = 0; iy < vy; ++iy)
    for (std::size_t ix = 0; ix < vx; ++ix) {
      pt[0] = midpoint(ix, vx, 0);
      pt[1] = midpoint(iy, vy, 1);
      double r = -source_prog.eval(pt);
      for (std::size_t ti = 0; ti < problem.op_terms.size(); ++ti) {
        const double cv = coeff_prog[ti].eval(pt);
        if (cv == 0.0) continue;
        r += cv * ce.eval_partial(pt, problem.op_terms[ti].delta);
      }
      verify_sq += r * r;
      verify_max = std::max(verify_max, std::abs(r));
    }

  double boundary_max = 0.0;
  for (std::size_t k = 0; k < dom.dim(); ++k) {
    const std::size_t other = 1 - k;
    const std::string& other_var = dom.axis(other).name;
    for (std::size_t which = 0; which < problem.constraints.count(k); ++which) {
      const AxisConstraint& c = problem.constraints.on_axis(k)[which];
      const Expr slice = problem.constraints.slice(k, which);
      std::vector<int> delta(2, 0);
      delta[k] = c.order;
      for (int i = 0; i < 33; ++i) {
        const double t = dom.axis(other).lo + static_cast<double>(i) / 32.0 *
                                                  (dom.axis(other).hi - dom.axis(other).lo);
        pt[k] = c.point;
        pt[other] = t;
        const double want = eval(slice, {{other_var, t}});
        boundary_max = std::max(boundary_max, std::abs(ce.eval_partial(pt, delta) - want));
      }
    }
  }

  Expr f_expr = ce.as_expr();
  return PdeSolution{std::vector<double>(xi.data(), xi.data() + xi.size()),
                     std::move(f_expr),
                     std::move(ce),
                     colloc_residual_norm,
                     std::sqrt(verify_sq),
                     verify_max,
                     boundary_max,
                     rank,
                     nbasis};
}

}  // namespace cexpr
