#include "cexpr/domain.hpp"

#include <algorithm>
#include <cmath>

#include "cexpr/errors.hpp"

namespace cexpr {

Domain Domain::make(std::vector<Axis> axes) {
  if (axes.empty() || axes.size() > 4)
    throw InvalidSpec("domain must have between 1 and 4 axes");
  for (const auto& a : axes) {
    if (a.name.empty()) throw InvalidSpec("axis name must not be empty");
    if (!(a.lo < a.hi))
      throw InvalidSpec("axis '" + a.name + "' needs lo < hi");
  }
  for (std::size_t i = 0; i < axes.size(); ++i)
    for (std::size_t j = i + 1; j < axes.size(); ++j)
      if (axes[i].name == axes[j].name)
        throw InvalidSpec("duplicate axis name '" + axes[i].name + "'");
  Domain d;
  d.axes_ = std::move(axes);
  return d;
}

std::size_t Domain::axis_index(const std::string& name) const {
  for (std::size_t i = 0; i < axes_.size(); ++i)
    if (axes_[i].name == name) return i;
  throw InvalidSpec("no axis named '" + name + "'");
}

std::vector<std::string> Domain::var_names() const {
  std::vector<std::string> out;
  out.reserve(axes_.size());
  for (const auto& a : axes_) out.push_back(a.name);
  return out;
}

namespace {

std::vector<std::string> default_names(std::size_t n) {
  if (n <= 3) {
    static const char* conv[] = {"x", "y", "z"};
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.emplace_back(conv[i]);
    return out;
  }
  std::vector<std::string> out;
  for (std::size_t i = 1; i <= n; ++i) out.push_back("x" + std::to_string(i));
  return out;
}

} // namespace

Domain make_domain(const std::vector<std::pair<double, double>>& intervals) {
  return make_domain(intervals, default_names(intervals.size()));
}

Domain make_domain(const std::vector<std::pair<double, double>>& intervals,
                   const std::vector<std::string>& names) {
  if (names.size() != intervals.size())
    throw InvalidSpec("axis name count must match interval count");
  std::vector<Axis> axes;
  axes.reserve(intervals.size());
  for (std::size_t i = 0; i < intervals.size(); ++i)
    axes.push_back({names[i], intervals[i].first, intervals[i].second});
  return Domain::make(std::move(axes));
}

std::size_t ConstraintSet::total() const {
  std::size_t t = 0;
  for (const auto& v : per_axis_) t += v.size();
  return t;
}

void ConstraintSet::add(AxisConstraint c) {
  if (c.axis >= domain_.dim()) throw InvalidSpec("constraint axis out of range");
  const Axis& ax = domain_.axis(c.axis);
  if (!(c.point >= ax.lo && c.point <= ax.hi))
    throw InvalidSpec("constraint point " + std::to_string(c.point) + " outside axis '" +
                      ax.name + "'");
  if (c.order < 0 || c.order > 4)
    throw InvalidSpec("constraint order must be between 0 and 4");
  if (c.pre_sliced && depends_on(c.rhs, ax.name))
    throw InvalidSpec("pre-sliced constraint must not depend on '" + ax.name + "'");
  auto& list = per_axis_[c.axis];
  for (const auto& other : list)
    if (other.point == c.point && other.order == c.order)
      throw InvalidSpec("duplicate constraint (point, order) on axis '" + ax.name + "'");
  auto pos = std::lower_bound(list.begin(), list.end(), c, [](const auto& a, const auto& b) {
    return a.point != b.point ? a.point < b.point : a.order < b.order;
  });
  list.insert(pos, std::move(c));
}

Expr ConstraintSet::slice(std::size_t axis, std::size_t which) const {
  const AxisConstraint& c = per_axis_.at(axis).at(which);
  if (c.pre_sliced) return c.rhs;
  const std::string& var = domain_.axis(axis).name;
  return substitute(diff(c.rhs, var, c.order), var, c.point);
}

void add_constraint(ConstraintSet& set, std::size_t axis, double point, int order, Expr rhs,
                    bool pre_sliced) {
  set.add({axis, point, order, std::move(rhs), pre_sliced});
}

CompatReport validate_compatibility(const ConstraintSet& set, double tol) {
  const Domain& dom = set.domain();
  const std::size_t n = dom.dim();
  CompatReport report;
  report.tolerance = tol;

  // per-axis probe values: 5 evenly spaced interior points plus endpoints
  std::vector<std::vector<double>> probes(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Axis& ax = dom.axis(k);
    probes[k].push_back(ax.lo);
    for (int i = 1; i <= 5; ++i)
      probes[k].push_back(ax.lo + (ax.hi - ax.lo) * i / 6.0);
    probes[k].push_back(ax.hi);
  }

  for (std::size_t ka = 0; ka < n; ++ka) {
    for (std::size_t ia = 0; ia < set.count(ka); ++ia) {
      for (std::size_t kb = ka + 1; kb < n; ++kb) {
        for (std::size_t ib = 0; ib < set.count(kb); ++ib) {
          const AxisConstraint& ca = set.on_axis(ka)[ia];
          const AxisConstraint& cb = set.on_axis(kb)[ib];
          // apply b's functional to a's slice and vice versa
          const std::string& va = dom.axis(ka).name;
          const std::string& vb = dom.axis(kb).name;
          Expr ab = substitute(diff(set.slice(ka, ia), vb, cb.order), vb, cb.point);
          Expr ba = substitute(diff(set.slice(kb, ib), va, ca.order), va, ca.point);

          CompatEntry entry;
          entry.axis_a = ka;
          entry.index_a = ia;
          entry.axis_b = kb;
          entry.index_b = ib;

          // iterate the sample grid over the remaining free axes
          std::vector<std::size_t> free_axes;
          for (std::size_t k = 0; k < n; ++k)
            if (k != ka && k != kb) free_axes.push_back(k);
          std::vector<std::size_t> idx(free_axes.size(), 0);
          for (;;) {
            Env env;
            std::vector<double> pt(n, 0.0);
            pt[ka] = ca.point;
            pt[kb] = cb.point;
            for (std::size_t f = 0; f < free_axes.size(); ++f)
              pt[free_axes[f]] = probes[free_axes[f]][idx[f]];
            for (std::size_t k = 0; k < n; ++k) env.emplace_back(dom.axis(k).name, pt[k]);
            const double mismatch = std::abs(eval(ab, env) - eval(ba, env));
            if (entry.worst_point.empty() || mismatch > entry.max_mismatch) {
              entry.max_mismatch = mismatch;
              entry.worst_point = pt;
            }
            // odometer
            std::size_t f = 0;
            for (; f < free_axes.size(); ++f) {
              if (++idx[f] < probes[free_axes[f]].size()) break;
              idx[f] = 0;
            }
            if (f == free_axes.size()) break;
          }
          entry.ok = entry.max_mismatch <= tol;
          if (!entry.ok) report.ok = false;
          report.entries.push_back(std::move(entry));
        }
      }
    }
  }
  return report;
}

} // namespace cexpr
