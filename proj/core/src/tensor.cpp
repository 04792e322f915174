#include "cexpr/tensor.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>

#include "cexpr/errors.hpp"

namespace cexpr {

Expr bc_operator(const Expr& e, const std::string& var, double p, int order) {
  return substitute(diff(e, var, order), var, p);
}

namespace {

double constant_of(const Expr& e, const char* what) {
  if (!e.is_constant())
    throw InvalidSpec(std::string(what) + " must reduce to a constant, got '" + e.str() + "'");
  return e.constant_value();
}

VVector trivial_v(std::size_t axis) {
  VVector v;
  v.axis = axis;
  v.components = {Expr::constant(1.0)};
  v.rcond = std::numeric_limits<double>::infinity();
  return v;
}

// functional matrix B[m][i] = m-th constraint functional applied to basis i
Eigen::MatrixXd functional_matrix(const ConstraintSet& set, std::size_t axis,
                                  const std::vector<Expr>& basis) {
  const auto& cons = set.on_axis(axis);
  const std::string& var = set.domain().axis(axis).name;
  Eigen::MatrixXd B(cons.size(), basis.size());
  for (std::size_t m = 0; m < cons.size(); ++m)
    for (std::size_t i = 0; i < basis.size(); ++i)
      B(m, i) = constant_of(bc_operator(basis[i], var, cons[m].point, cons[m].order),
                            "blending basis functional");
  return B;
}

std::optional<VVector> try_build_v(const ConstraintSet& set, std::size_t axis,
                                   const std::vector<Expr>& basis) {
  const auto& cons = set.on_axis(axis);
  const std::size_t l = cons.size();
  Eigen::MatrixXd B = functional_matrix(set, axis, basis);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
  Eigen::MatrixXd inv = lu.inverse();
  if (!inv.allFinite()) return std::nullopt;
  const double rcond = 1.0 / (B.cwiseAbs().colwise().sum().maxCoeff() *
                              inv.cwiseAbs().colwise().sum().maxCoeff());
  if (!(rcond >= 1e-12)) return std::nullopt;

  VVector v;
  v.axis = axis;
  v.basis = basis;
  v.rcond = rcond;
  v.alpha.assign(l, std::vector<double>(l, 0.0));
  for (std::size_t i = 0; i < l; ++i)
    for (std::size_t j = 0; j < l; ++j) v.alpha[i][j] = inv(i, j);
  v.components.reserve(l + 1);
  v.components.push_back(Expr::constant(1.0));
  for (std::size_t j = 0; j < l; ++j) {
    Expr comp = Expr::constant(0.0);
    for (std::size_t i = 0; i < l; ++i)
      comp = comp + Expr::constant(inv(i, j)) * basis[i];
    v.components.push_back(comp);
  }
  return v;
}

std::vector<Expr> monomials(const std::string& var, std::size_t count, int first_power) {
  std::vector<Expr> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i)
    out.push_back(pow(Expr::variable(var), static_cast<double>(first_power + static_cast<int>(i))));
  return out;
}

} // namespace

VVector build_v(const ConstraintSet& set, std::size_t axis) {
  const std::size_t l = set.count(axis);
  if (l == 0) return trivial_v(axis);
  const std::string& var = set.domain().axis(axis).name;
  if (auto v = try_build_v(set, axis, monomials(var, l, 0))) return *v;
  // derivative-only constraint sets annihilate the constant monomial;
  // shifting every power up by one is the standard fix
  if (auto v = try_build_v(set, axis, monomials(var, l, 1))) return *v;
  throw SolveError("blending functional matrix is singular on axis '" + var +
                   "' for both the 1,t,t^2,... and t,t^2,t^3,... bases");
}

VVector build_v(const ConstraintSet& set, std::size_t axis, const std::vector<Expr>& basis) {
  const std::size_t l = set.count(axis);
  if (l == 0) return trivial_v(axis);
  if (basis.size() != l)
    throw InvalidSpec("blending basis size must match the axis constraint count");
  if (auto v = try_build_v(set, axis, basis)) return *v;
  throw SolveError("blending functional matrix is singular on axis '" +
                   set.domain().axis(axis).name + "' for the supplied basis");
}

VVector v_from_components(const ConstraintSet& set, std::size_t axis,
                          std::vector<Expr> components, double check_tol) {
  const auto& cons = set.on_axis(axis);
  if (components.size() != cons.size() + 1)
    throw InvalidSpec("component count must be the axis constraint count plus one");
  if (!components[0].is_constant() || components[0].constant_value() != 1.0)
    throw InvalidSpec("first blending component must be the constant 1");
  const std::string& var = set.domain().axis(axis).name;
  for (std::size_t m = 0; m < cons.size(); ++m) {
    for (std::size_t j = 0; j < cons.size(); ++j) {
      const double got = constant_of(
          bc_operator(components[j + 1], var, cons[m].point, cons[m].order),
          "blending component functional");
      const double want = m == j ? 1.0 : 0.0;
      if (std::abs(got - want) > check_tol)
        throw InvalidSpec("blending component " + std::to_string(j + 1) + " on axis '" + var +
                          "' violates the duality property");
    }
  }
  VVector v;
  v.axis = axis;
  v.components = std::move(components);
  v.rcond = std::numeric_limits<double>::quiet_NaN();
  return v;
}

MTensor::MTensor(std::vector<std::size_t> extents) : extents_(std::move(extents)) {
  std::size_t total = 1;
  for (std::size_t e : extents_) total *= e;
  entries_.assign(total, Expr::constant(0.0));
}

std::size_t MTensor::flat_index(const std::vector<std::size_t>& idx) const {
  if (idx.size() != extents_.size()) throw InvalidSpec("index rank mismatch");
  std::size_t flat = 0;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (idx[k] >= extents_[k]) throw InvalidSpec("tensor index out of range");
    flat = flat * extents_[k] + idx[k];
  }
  return flat;
}

namespace {

std::vector<std::size_t> tensor_extents(const ConstraintSet& set) {
  std::vector<std::size_t> extents(set.domain().dim());
  for (std::size_t k = 0; k < extents.size(); ++k) extents[k] = set.count(k) + 1;
  return extents;
}

// iterate all index tuples, last axis fastest (matches flat order)
template <typename F>
void for_each_index(const std::vector<std::size_t>& extents, F&& fn) {
  std::vector<std::size_t> idx(extents.size(), 0);
  std::size_t flat = 0;
  for (;;) {
    fn(idx, flat++);
    std::size_t k = extents.size();
    for (;;) {
      if (k == 0) return;
      --k;
      if (++idx[k] < extents[k]) break;
      idx[k] = 0;
    }
  }
}

double entry_sign(std::size_t participating) {
  return participating % 2 == 0 ? -1.0 : 1.0; // (-1)^(m+1)
}

} // namespace

MTensor build_M(const ConstraintSet& set, std::size_t seed_rank) {
  const Domain& dom = set.domain();
  MTensor M(tensor_extents(set));
  for_each_index(M.extents(), [&](const std::vector<std::size_t>& idx, std::size_t flat) {
    std::vector<std::size_t> axes; // participating axes, ascending
    for (std::size_t k = 0; k < idx.size(); ++k)
      if (idx[k] >= 1) axes.push_back(k);
    if (axes.empty()) return; // the all-free entry is zero
    const std::size_t seed = axes[seed_rank % axes.size()];
    Expr e = set.slice(seed, idx[seed] - 1);
    for (std::size_t k : axes) {
      if (k == seed) continue;
      const AxisConstraint& c = set.on_axis(k)[idx[k] - 1];
      e = bc_operator(e, dom.axis(k).name, c.point, c.order);
    }
    M.at_flat(flat) = Expr::constant(entry_sign(axes.size())) * e;
  });
  return M;
}

MTensor build_M_of(const ConstraintSet& set, const Expr& g) {
  const Domain& dom = set.domain();
  MTensor M(tensor_extents(set));
  for_each_index(M.extents(), [&](const std::vector<std::size_t>& idx, std::size_t flat) {
    std::vector<std::size_t> axes;
    for (std::size_t k = 0; k < idx.size(); ++k)
      if (idx[k] >= 1) axes.push_back(k);
    if (axes.empty()) return;
    Expr e = g;
    for (std::size_t k : axes) {
      const AxisConstraint& c = set.on_axis(k)[idx[k] - 1];
      e = bc_operator(e, dom.axis(k).name, c.point, c.order);
    }
    M.at_flat(flat) = Expr::constant(entry_sign(axes.size())) * e;
  });
  return M;
}

// ---------------------------------------------------------------------------

struct ConstrainedExpression::Caches {
  // key: flat index * 625 + encoded restricted delta
  std::unordered_map<std::uint64_t, CompiledExpr> entry_prog;
  // key: encoded delta
  std::unordered_map<std::uint32_t, CompiledExpr> g_prog;
  // [axis][component][order]
  std::vector<std::vector<std::array<std::optional<CompiledExpr>, 5>>> v_prog;
};

ConstrainedExpression::ConstrainedExpression(ConstraintSet set, Expr g, std::vector<VVector> v,
                                             MTensor mc, MTensor mg)
    : set_(std::move(set)),
      g_(std::move(g)),
      v_(std::move(v)),
      mc_(std::move(mc)),
      mg_(std::move(mg)),
      vars_(set_.domain().var_names()),
      caches_(std::make_shared<Caches>()) {
  for (std::size_t e : mc_.extents())
    if (e > 16)
      throw InvalidSpec("more than 15 constraints on one axis is unsupported");
  caches_->v_prog.resize(v_.size());
  for (std::size_t k = 0; k < v_.size(); ++k)
    caches_->v_prog[k].resize(v_[k].components.size());
}

double ConstrainedExpression::contract(const std::vector<double>& pt,
                                       const std::vector<int>& delta) const {
  const std::size_t n = vars_.size();
  if (pt.size() != n) throw InvalidSpec("point dimension mismatch");
  if (delta.size() != n) throw InvalidSpec("derivative multi-index dimension mismatch");
  int total_order = 0;
  for (int d : delta) {
    if (d < 0) throw InvalidSpec("derivative orders must be non-negative");
    total_order += d;
  }
  if (total_order > 4) throw InvalidSpec("total derivative order above 4 is unsupported");

  Caches& c = *caches_;

  // per-axis blending factors at this point, differentiated per delta
  std::array<std::array<double, 16>, 4> factor{};
  const auto& extents = mc_.extents();
  for (std::size_t k = 0; k < n; ++k) {
    factor[k][0] = 1.0; // the free slot; its axis dependence lives in the entry
    for (std::size_t m = 1; m < extents[k]; ++m) {
      auto& slot = c.v_prog[k][m][static_cast<std::size_t>(delta[k])];
      if (!slot)
        slot.emplace(diff(v_[k].components[m], vars_[k], delta[k]), vars_);
      factor[k][m] = slot->eval(pt.data(), pt.size());
    }
  }

  // delta restricted to the axes whose entry slot is free
  std::uint32_t g_code = 0;
  for (std::size_t k = 0; k < n; ++k) g_code = g_code * 5 + static_cast<std::uint32_t>(delta[k]);

  double acc = 0.0;
  for_each_index(extents, [&](const std::vector<std::size_t>& idx, std::size_t flat) {
    std::uint32_t code = 0;
    double vfac = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (idx[k] == 0) {
        code = code * 5 + static_cast<std::uint32_t>(delta[k]);
      } else {
        code = code * 5;
        vfac *= factor[k][idx[k]];
      }
    }
    if (vfac == 0.0) return;
    const std::uint64_t key = static_cast<std::uint64_t>(flat) * 625u + code;
    auto it = c.entry_prog.find(key);
    if (it == c.entry_prog.end()) {
      Expr e = mc_.at_flat(flat) - mg_.at_flat(flat);
      for (std::size_t k = 0; k < n; ++k)
        if (idx[k] == 0 && delta[k] > 0) e = diff(e, vars_[k], delta[k]);
      it = c.entry_prog.emplace(key, CompiledExpr(e, vars_)).first;
    }
    acc += it->second.eval(pt.data(), pt.size()) * vfac;
  });

  auto git = c.g_prog.find(g_code);
  if (git == c.g_prog.end()) {
    Expr dg = g_;
    for (std::size_t k = 0; k < n; ++k)
      if (delta[k] > 0) dg = diff(dg, vars_[k], delta[k]);
    git = c.g_prog.emplace(g_code, CompiledExpr(dg, vars_)).first;
  }
  return acc + git->second.eval(pt.data(), pt.size());
}

double ConstrainedExpression::eval(const std::vector<double>& pt) const {
  return contract(pt, std::vector<int>(vars_.size(), 0));
}

double ConstrainedExpression::eval_partial(const std::vector<double>& pt,
                                           const std::vector<int>& delta) const {
  return contract(pt, delta);
}

Expr ConstrainedExpression::as_expr() const {
  Expr acc = g_;
  for_each_index(mc_.extents(), [&](const std::vector<std::size_t>& idx, std::size_t flat) {
    Expr term = mc_.at_flat(flat) - mg_.at_flat(flat);
    for (std::size_t k = 0; k < idx.size(); ++k)
      if (idx[k] >= 1) term = term * v_[k].components[idx[k]];
    acc = acc + term;
  });
  return acc;
}

ConstrainedExpression assemble(const ConstraintSet& set, Expr g) {
  std::vector<VVector> v;
  v.reserve(set.domain().dim());
  for (std::size_t k = 0; k < set.domain().dim(); ++k) v.push_back(build_v(set, k));
  return assemble(set, std::move(g), std::move(v));
}

ConstrainedExpression assemble(const ConstraintSet& set, Expr g, std::vector<VVector> v_override) {
  const std::size_t n = set.domain().dim();
  if (v_override.size() != n)
    throw InvalidSpec("need one blending vector per axis");
  for (std::size_t k = 0; k < n; ++k) {
    if (v_override[k].axis != k) throw InvalidSpec("blending vector axis mismatch");
    if (v_override[k].components.size() != set.count(k) + 1)
      throw InvalidSpec("blending vector size must be the axis constraint count plus one");
  }
  MTensor mc = build_M(set);
  MTensor mg = build_M_of(set, g);
  return ConstrainedExpression(set, std::move(g), std::move(v_override), std::move(mc),
                               std::move(mg));
}

double eval_f(const ConstrainedExpression& ce, const std::vector<double>& pt) {
  return ce.eval(pt);
}

double eval_f_partial(const ConstrainedExpression& ce, const std::vector<double>& pt,
                      const std::vector<int>& delta) {
  return ce.eval_partial(pt, delta);
}

} // namespace cexpr
