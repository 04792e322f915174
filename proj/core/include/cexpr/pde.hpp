#pragma once

#include <cstddef>
#include <vector>

#include "cexpr/domain.hpp"
#include "cexpr/expr.hpp"
#include "cexpr/tensor.hpp"

namespace cexpr {

// One term of a linear differential operator: coeff(x, y) * the delta[k]-th
// partial along each axis k. Orders up to 2 per axis.
struct PdeTerm {
  std::vector<int> delta;
  Expr coeff;
};

// Collocation grid sizes per axis; 0 picks the default, which is the
// smallest per-axis count whose total is at least twice the basis size.
struct CollocationSpec {
  std::size_t nx = 0;
  std::size_t ny = 0;
};

// A linear boundary value problem on a 2-D rectangle: sum of operator terms
// applied to f equals source, with the boundary conditions embedded exactly
// through a constrained expression, so the unknowns are only the basis
// coefficients of the free function.
struct PdeProblem {
  ConstraintSet constraints;
  std::vector<PdeTerm> op_terms;
  Expr source;
  int degree = 4;
  CollocationSpec colloc;
};

struct PdeSolution {
  std::vector<double> xi;
  Expr f;                        // the solved surface, symbolically
  ConstrainedExpression ce;      // the same surface with a fast evaluator
  double colloc_residual_norm;   // 2-norm of the residual at the collocation nodes
  double verify_residual_norm;   // 2-norm on an independent midpoint grid
  double verify_max_residual;
  double max_boundary_residual;  // worst constraint residual of the solution
  std::size_t rank;              // independent directions the operator sees in the basis
  std::size_t basis_count;
};

// Chebyshev polynomials of total degree <= degree in the domain coordinates
// mapped affinely to [-1,1]^2; (degree+1)(degree+2)/2 functions, constant
// first, then by total degree.
std::vector<Expr> make_basis(const Domain& dom, int degree);

// Chebyshev-Gauss-Lobatto nodes mapped to [lo, hi], ascending, endpoints
// included. m >= 2.
std::vector<double> cgl_nodes(double lo, double hi, std::size_t m);

// Least-squares collocation solve. The trial surface is the constrained
// expression with g expanded over make_basis, so every candidate satisfies
// the boundary conditions. The boundary blend absorbs part of the basis (for
// value conditions on all four edges, everything up to total degree 3), so
// the system is rank-deficient by construction; the minimum-norm least-squares
// solution over the surviving directions is taken. Throws SolveError only
// when the collocation grid resolves fewer directions than a denser
// verification grid does, i.e. the deficiency is the grid's fault.
PdeSolution solve(const PdeProblem& problem);

}  // namespace cexpr
