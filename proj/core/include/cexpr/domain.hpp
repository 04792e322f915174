#pragma once

#include <string>
#include <vector>

#include "cexpr/expr.hpp"

namespace cexpr {

struct Axis {
  std::string name;
  double lo = 0.0;
  double hi = 1.0;
};

/// Rectangular domain in 1 to 4 dimensions.
class Domain {
public:
  static Domain make(std::vector<Axis> axes);

  std::size_t dim() const noexcept { return axes_.size(); }
  const Axis& axis(std::size_t k) const { return axes_.at(k); }
  const std::vector<Axis>& axes() const noexcept { return axes_; }

  /// Index of the named axis; throws InvalidSpec if absent.
  std::size_t axis_index(const std::string& name) const;

  std::vector<std::string> var_names() const;

private:
  std::vector<Axis> axes_;
};

/// Intervals with the conventional names (x, y, z for up to three axes,
/// x1..xn above that).
Domain make_domain(const std::vector<std::pair<double, double>>& intervals);
Domain make_domain(const std::vector<std::pair<double, double>>& intervals,
                   const std::vector<std::string>& names);

/// One boundary condition: the derivative of the target field of `order`
/// along axis `axis`, restricted to the plane axis = point. `rhs` may be
/// given over all domain variables (the plane restriction is applied for
/// you) or pre-sliced, i.e. already independent of the axis variable.
struct AxisConstraint {
  std::size_t axis = 0;
  double point = 0.0;
  int order = 0;
  Expr rhs;
  bool pre_sliced = false;
};

/// Per-axis constraint lists, each kept sorted by (point, order) with
/// duplicate (point, order) pairs rejected.
class ConstraintSet {
public:
  explicit ConstraintSet(Domain domain) : domain_(std::move(domain)) {
    per_axis_.resize(domain_.dim());
  }

  const Domain& domain() const noexcept { return domain_; }
  const std::vector<AxisConstraint>& on_axis(std::size_t k) const { return per_axis_.at(k); }
  std::size_t count(std::size_t k) const { return per_axis_.at(k).size(); }
  std::size_t total() const;

  void add(AxisConstraint c);

  /// The constraint function as a function of the remaining variables:
  /// rhs itself when pre-sliced, otherwise the order-th derivative of rhs
  /// along the axis evaluated on the plane.
  Expr slice(std::size_t axis, std::size_t which) const;

private:
  Domain domain_;
  std::vector<std::vector<AxisConstraint>> per_axis_;
};

void add_constraint(ConstraintSet& set, std::size_t axis, double point, int order, Expr rhs,
                    bool pre_sliced = false);

/// One cross-axis intersection check: constraint a's functional applied to
/// constraint b's slice against the converse, sampled over the remaining
/// free axes.
struct CompatEntry {
  std::size_t axis_a = 0, index_a = 0;
  std::size_t axis_b = 0, index_b = 0;
  double max_mismatch = 0.0;
  std::vector<double> worst_point; // full-dimension coordinates
  bool ok = true;
};

struct CompatReport {
  bool ok = true;
  double tolerance = 0.0;
  std::vector<CompatEntry> entries;
};

/// Samples every pair of constraints on distinct axes at their plane
/// intersection: 5 evenly spaced interior points plus both endpoints per
/// remaining free axis. Mismatches above tol mark the report failed.
CompatReport validate_compatibility(const ConstraintSet& set, double tol = 1e-9);

} // namespace cexpr
