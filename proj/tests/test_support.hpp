#pragma once

#include <random>
#include <string>
#include <vector>

#include "cexpr/domain.hpp"
#include "cexpr/expr.hpp"
#include "cexpr/tensor.hpp"
#include "cexpr/verify.hpp"

namespace testutil {

inline double urand(std::mt19937_64& rng, double lo, double hi) {
  return cexpr::uniform_sample(rng, lo, hi);
}

inline std::vector<double> random_point(std::mt19937_64& rng, const cexpr::Domain& dom) {
  std::vector<double> pt(dom.dim());
  for (std::size_t k = 0; k < dom.dim(); ++k)
    pt[k] = urand(rng, dom.axis(k).lo, dom.axis(k).hi);
  return pt;
}

// Worst residual of any constraint of the set under the constrained
// expression, sampled at `samples` random points per boundary plane.
inline double max_boundary_residual(const cexpr::ConstrainedExpression& ce, std::mt19937_64& rng,
                                    std::size_t samples = 50) {
  const cexpr::ConstraintSet& set = ce.constraints();
  const cexpr::Domain& dom = set.domain();
  const std::vector<std::string> vars = dom.var_names();
  double worst = 0.0;
  for (std::size_t k = 0; k < dom.dim(); ++k) {
    for (std::size_t i = 0; i < set.count(k); ++i) {
      const cexpr::AxisConstraint& con = set.on_axis(k)[i];
      const cexpr::CompiledExpr want(set.slice(k, i), vars);
      std::vector<int> delta(dom.dim(), 0);
      delta[k] = con.order;
      for (std::size_t s = 0; s < samples; ++s) {
        std::vector<double> pt = random_point(rng, dom);
        pt[k] = con.point;
        const double r = std::abs(ce.eval_partial(pt, delta) - want.eval(pt));
        if (r > worst) worst = r;
      }
    }
  }
  return worst;
}

} // namespace testutil
