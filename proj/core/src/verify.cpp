#include "cexpr/verify.hpp"

#include <cmath>
#include <utility>

#include "cexpr/errors.hpp"
#include "json.hpp"

namespace cexpr {

double uniform_sample(std::mt19937_64& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + u * (hi - lo);
}

Expr random_polynomial(std::mt19937_64& rng, const std::vector<std::string>& vars, int degree) {
  if (degree < 0) throw InvalidSpec("polynomial degree must be nonnegative");
  std::vector<int> expo(vars.size(), 0);
  Expr acc = Expr::constant(0.0);
  auto emit = [&](auto&& self, std::size_t pos, int remaining) -> void {
    if (pos == vars.size()) {
      Expr term = Expr::constant(uniform_sample(rng, -1.0, 1.0));
      for (std::size_t i = 0; i < vars.size(); ++i)
        if (expo[i] > 0)
          term = term * pow(Expr::variable(vars[i]), static_cast<double>(expo[i]));
      acc = acc + term;
      return;
    }
    for (int e = 0; e <= remaining; ++e) {
      expo[pos] = e;
      self(self, pos + 1, remaining - e);
    }
    expo[pos] = 0;
  };
  emit(emit, 0, degree);
  return acc;
}

VerifyReport verify_boundary(const ConstrainedExpression& ce, std::size_t samples,
                             std::uint64_t seed, double tol, double compat_tol) {
  if (samples == 0) throw InvalidSpec("need at least one sample per boundary condition");
  const ConstraintSet& set = ce.constraints();
  const Domain& dom = set.domain();
  const std::vector<std::string> vars = dom.var_names();

  VerifyReport report;
  report.tolerance = tol;
  report.seed = seed;
  report.samples = samples;

  std::mt19937_64 rng(seed);
  std::vector<double> pt(dom.dim());
  std::vector<int> delta(dom.dim());
  for (std::size_t k = 0; k < dom.dim(); ++k) {
    for (std::size_t i = 0; i < set.count(k); ++i) {
      const AxisConstraint& c = set.on_axis(k)[i];
      const CompiledExpr prog(set.slice(k, i), vars);
      ConstraintResidual res{k, i, c.point, c.order, 0.0, {}, true};
      std::fill(delta.begin(), delta.end(), 0);
      delta[k] = c.order;
      for (std::size_t s = 0; s < samples; ++s) {
        for (std::size_t j = 0; j < dom.dim(); ++j)
          pt[j] = uniform_sample(rng, dom.axis(j).lo, dom.axis(j).hi);
        pt[k] = c.point;
        const double resid = std::abs(ce.eval_partial(pt, delta) - prog.eval(pt));
        if (res.worst_point.empty() || resid > res.max_residual) {
          res.max_residual = resid;
          res.worst_point = pt;
        }
      }
      res.ok = res.max_residual <= tol;
      if (!res.ok) report.ok = false;
      report.constraints.push_back(std::move(res));
    }
  }

  report.compatibility = validate_compatibility(set, compat_tol);
  if (!report.compatibility.ok) report.ok = false;
  return report;
}

std::string report_to_json(const VerifyReport& report) {
  using nlohmann::json;
  json doc;
  doc["ok"] = report.ok;
  doc["tolerance"] = report.tolerance;
  doc["seed"] = report.seed;
  doc["samples"] = report.samples;
  doc["constraints"] = json::array();
  for (const ConstraintResidual& r : report.constraints) {
    json row;
    row["axis"] = r.axis;
    row["index"] = r.index;
    row["point"] = r.point;
    row["order"] = r.order;
    row["max_residual"] = r.max_residual;
    row["worst_point"] = r.worst_point;
    row["ok"] = r.ok;
    doc["constraints"].push_back(std::move(row));
  }
  json compat;
  compat["ok"] = report.compatibility.ok;
  compat["tolerance"] = report.compatibility.tolerance;
  compat["pairs"] = json::array();
  for (const CompatEntry& e : report.compatibility.entries) {
    json row;
    row["axis_a"] = e.axis_a;
    row["index_a"] = e.index_a;
    row["axis_b"] = e.axis_b;
    row["index_b"] = e.index_b;
    row["max_mismatch"] = e.max_mismatch;
    row["worst_point"] = e.worst_point;
    row["ok"] = e.ok;
    compat["pairs"].push_back(std::move(row));
  }
  doc["compatibility"] = std::move(compat);
  return doc.dump(2) + "\n";
}

}  // namespace cexpr
