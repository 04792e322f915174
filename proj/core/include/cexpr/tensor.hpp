#pragma once

#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "cexpr/domain.hpp"
#include "cexpr/expr.hpp"

namespace cexpr {

/// The boundary restriction operator: order-th derivative along `var`,
/// restricted to the plane var = p. Returns an expression over the
/// remaining variables.
Expr bc_operator(const Expr& e, const std::string& var, double p, int order);

/// Axis blending vector. components[0] is identically 1; component j+1 is
/// dual to the axis's j-th constraint functional (value 1 under it, 0 under
/// the others). alpha holds the inverse functional matrix whose column j
/// gives component j+1's coefficients over `basis`.
struct VVector {
  std::size_t axis = 0;
  std::vector<Expr> components;
  std::vector<std::vector<double>> alpha;
  std::vector<Expr> basis;
  double rcond = 0.0;
};

/// Builds the axis blending vector. The default basis is the monomials
/// 1, t, t^2, ...; if the functional matrix is singular on it (derivative
/// -only constraint sets), retries once with t, t^2, t^3, ... before
/// giving up.
VVector build_v(const ConstraintSet& set, std::size_t axis);
VVector build_v(const ConstraintSet& set, std::size_t axis, const std::vector<Expr>& basis);

/// Wraps externally supplied components (tabulated vectors). Checks the
/// duality property against the axis constraints to `check_tol`.
VVector v_from_components(const ConstraintSet& set, std::size_t axis,
                          std::vector<Expr> components, double check_tol = 1e-9);

/// Dense tensor of boundary data. Entry extents are l_k + 1 per axis;
/// index 0 selects the "free" slot, index m >= 1 the axis's m-th
/// constraint. Entries are stored with axis 1 outermost (row-major).
class MTensor {
public:
  MTensor() = default;
  MTensor(std::vector<std::size_t> extents);

  const std::vector<std::size_t>& extents() const noexcept { return extents_; }
  std::size_t flat_size() const noexcept { return entries_.size(); }

  std::size_t flat_index(const std::vector<std::size_t>& idx) const;
  const Expr& at(const std::vector<std::size_t>& idx) const { return entries_[flat_index(idx)]; }
  const Expr& at_flat(std::size_t i) const { return entries_.at(i); }
  Expr& at_flat(std::size_t i) { return entries_.at(i); }

private:
  std::vector<std::size_t> extents_;
  std::vector<Expr> entries_;
};

/// Tensor of constraint data, reconstructed from the per-axis slices.
/// A multi-axis entry applies the other axes' restriction operators to one
/// seed slice in ascending axis order, with sign (-1)^(m+1) for m
/// participating axes; compatible data makes the seed choice irrelevant,
/// and `seed_rank` (test hook) selects which participating axis seeds.
MTensor build_M(const ConstraintSet& set, std::size_t seed_rank = 0);

/// Tensor of the same shape with every entry's operator chain applied to
/// one expression (the free function).
MTensor build_M_of(const ConstraintSet& set, const Expr& g);

/// Assembled constrained expression: evaluates
///   f = g + sum_idx [M(c) - M(g)]_idx * prod_k v_k[idx_k]
/// which satisfies every constraint in the set for any g. Evaluation
/// compiles and caches entry programs, so grid sweeps stay linear in the
/// number of points.
class ConstrainedExpression {
public:
  ConstrainedExpression(ConstraintSet set, Expr g, std::vector<VVector> v, MTensor mc,
                        MTensor mg);

  const ConstraintSet& constraints() const noexcept { return set_; }
  const Domain& domain() const noexcept { return set_.domain(); }
  const Expr& g() const noexcept { return g_; }
  const std::vector<VVector>& v() const noexcept { return v_; }
  const MTensor& Mc() const noexcept { return mc_; }
  const MTensor& Mg() const noexcept { return mg_; }

  /// Value of f at a point (coordinates in axis order).
  double eval(const std::vector<double>& pt) const;

  /// Mixed partial of f, delta[k] the order along axis k, |delta| <= 4.
  double eval_partial(const std::vector<double>& pt, const std::vector<int>& delta) const;

  /// f as one symbolic expression (identically-zero entries dropped).
  Expr as_expr() const;

private:
  struct Caches;

  double contract(const std::vector<double>& pt, const std::vector<int>& delta) const;

  ConstraintSet set_;
  Expr g_;
  std::vector<VVector> v_;
  MTensor mc_, mg_;
  std::vector<std::string> vars_;
  std::shared_ptr<Caches> caches_; // shared so copies reuse compiled programs
};

/// Builds blending vectors (monomial default), both tensors, and wires up
/// the evaluator. The optional override supplies per-axis blending vectors
/// (e.g. tabulated ones) instead of build_v output.
ConstrainedExpression assemble(const ConstraintSet& set, Expr g);
ConstrainedExpression assemble(const ConstraintSet& set, Expr g, std::vector<VVector> v_override);

double eval_f(const ConstrainedExpression& ce, const std::vector<double>& pt);
double eval_f_partial(const ConstrainedExpression& ce, const std::vector<double>& pt,
                      const std::vector<int>& delta);

} // namespace cexpr
