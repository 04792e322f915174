#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "cexpr/domain.hpp"
#include "cexpr/expr.hpp"
#include "cexpr/tensor.hpp"

namespace cexpr {

// Worst observed residual of one boundary condition, sampled over its plane.
struct ConstraintResidual {
  std::size_t axis = 0;
  std::size_t index = 0;
  double point = 0.0;
  int order = 0;
  double max_residual = 0.0;
  std::vector<double> worst_point;
  bool ok = true;
};

struct VerifyReport {
  bool ok = true;
  double tolerance = 0.0;
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  std::vector<ConstraintResidual> constraints;
  CompatReport compatibility;
};

/// Samples every boundary condition of the constrained expression at
/// `samples` seeded random points on its plane and compares against the
/// prescribed data; also replays the cross-plane compatibility check on the
/// constraint set. Identical seeds give identical reports.
VerifyReport verify_boundary(const ConstrainedExpression& ce, std::size_t samples,
                             std::uint64_t seed, double tol = 1e-9,
                             double compat_tol = 1e-9);

/// The report as a JSON document, stable key order, round-trip numbers.
std::string report_to_json(const VerifyReport& report);

/// Uniform draw in [lo, hi) from the top 53 bits of the generator, so the
/// stream does not depend on the standard library's distribution choices.
double uniform_sample(std::mt19937_64& rng, double lo, double hi);

/// Random polynomial over the given variables with all monomials of total
/// degree <= degree and coefficients uniform in [-1, 1].
Expr random_polynomial(std::mt19937_64& rng, const std::vector<std::string>& vars, int degree);

}  // namespace cexpr
