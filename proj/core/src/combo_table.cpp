#include "cexpr/bivariate.hpp"

#include <utility>

#include "cexpr/errors.hpp"

namespace cexpr {

std::uint8_t ComboFlags::mask() const {
  std::uint8_t m = 0;
  if (value_y0) m |= 1u << 0;
  if (value_x0) m |= 1u << 1;
  if (value_y1) m |= 1u << 2;
  if (value_x1) m |= 1u << 3;
  if (deriv_x0) m |= 1u << 4;
  if (deriv_x1) m |= 1u << 5;
  if (deriv_y0) m |= 1u << 6;
  if (deriv_y1) m |= 1u << 7;
  return m;
}

ComboFlags ComboFlags::from_mask(std::uint8_t m) {
  ComboFlags f;
  f.value_y0 = (m >> 0) & 1u;
  f.value_x0 = (m >> 1) & 1u;
  f.value_y1 = (m >> 2) & 1u;
  f.value_x1 = (m >> 3) & 1u;
  f.deriv_x0 = (m >> 4) & 1u;
  f.deriv_x1 = (m >> 5) & 1u;
  f.deriv_y0 = (m >> 6) & 1u;
  f.deriv_y1 = (m >> 7) & 1u;
  return f;
}

int ComboFlags::count() const {
  int n = 0;
  for (std::uint8_t m = mask(); m != 0; m >>= 1) n += m & 1u;
  return n;
}

namespace {

// Cubic blends dual to {value at 0, slope at 0, value at 1, slope at 1}.
#define HERMITE_X "1-3*x^2+2*x^3", "x-2*x^2+x^3", "3*x^2-2*x^3", "-x^2+x^3"
#define HERMITE_Y "1-3*y^2+2*y^3", "y-2*y^2+y^3", "3*y^2-2*y^3", "-y^2+y^3"

struct RawRow {
  std::uint8_t mask;
  std::vector<const char*> vx;  // components after the leading 1
  std::vector<const char*> vy;
};

// Tabulated blending vectors for every supported combination of edge
// conditions on [0,1]^2. Component order within each vector follows the
// axis's conditions sorted by (point, order). The vectors are not unique;
// these particular ones are kept verbatim as reference data and the build
// checks each against the duality property.
const std::vector<RawRow>& raw_rows() {
  static const std::vector<RawRow> rows = {
      {0x03, {"1"}, {"1"}},
      {0x42, {"1"}, {"y"}},
      {0x50, {"x"}, {"y"}},
      {0x07, {"1"}, {"1-y^2", "y^2"}},
      {0x83, {"1"}, {"1", "y"}},
      {0x15, {"x"}, {"1-y", "y"}},
      {0x54, {"x"}, {"y-y^2", "y^2"}},
      {0xC2, {"1"}, {"y-y^2/2", "y^2/2"}},
      {0xD0, {"x"}, {"y-y^2/2", "y^2/2"}},
      {0x0F, {"1-x", "x"}, {"1-y", "y"}},
      {0x4E, {"1-x", "x"}, {"y-y^2", "y^2"}},
      {0xCA, {"1-x", "x"}, {"y-y^2/2", "y^2/2"}},
      {0x5C, {"x-x^2", "x^2"}, {"y-y^2", "y^2"}},
      {0xD8, {"x-x^2", "x^2"}, {"y-y^2/2", "y^2/2"}},
      {0xF0, {"x-x^2/2", "x^2/2"}, {"y-y^2/2", "y^2/2"}},
      {0x43, {"1"}, {"1", "y"}},
      {0x51, {"x"}, {"1", "y"}},
      {0x4B, {"1-x", "x"}, {"1", "y"}},
      {0x47, {"1"}, {"1-y^2", "y-y^2", "y^2"}},
      {0x55, {"x"}, {"1-y^2", "y-y^2", "y^2"}},
      {0xC3, {"1"}, {"1", "y-y^2/2", "y^2/2"}},
      {0xD1, {"x"}, {"1", "y-y^2/2", "y^2/2"}},
      {0x63, {"1", "x"}, {"1", "y"}},
      {0x71, {"x-x^2/2", "x^2/2"}, {"1", "y"}},
      {0x53, {"1", "x"}, {"1", "y"}},
      {0x57, {"1", "x"}, {"1-y^2", "y-y^2", "y^2"}},
      {0xD3, {"1", "x"}, {"1", "y-y^2/2", "y^2/2"}},
      {0x4F, {"1-x", "x"}, {"1-y^2", "y-y^2", "y^2"}},
      {0x5D, {"x-x^2", "x^2"}, {"1-y^2", "y-y^2", "y^2"}},
      {0xCB, {"1-x", "x"}, {"1", "y-y^2/2", "y^2/2"}},
      {0xD9, {"x-x^2", "x^2"}, {"1", "y-y^2/2", "y^2/2"}},
      {0xF1, {"x-x^2/2", "x^2/2"}, {"1", "y-y^2/2", "y^2/2"}},
      {0x5F, {"1-x^2", "x-x^2", "x^2"}, {"1-y^2", "y-y^2", "y^2"}},
      {0xDB, {"1-x^2", "x-x^2", "x^2"}, {"1", "y-y^2/2", "y^2/2"}},
      {0xF3, {"1", "x-x^2/2", "x^2/2"}, {"1", "y-y^2/2", "y^2/2"}},
      {0xCF, {"1-x", "x"}, {HERMITE_Y}},
      {0xDD, {"-1+x", "1"}, {HERMITE_Y}},
      {0xF5, {"x-x^2/2", "x^2/2"}, {HERMITE_Y}},
      {0xD7, {"1", "x"}, {HERMITE_Y}},
      {0xDF, {"1-x^2", "x-x^2", "x^2"}, {HERMITE_Y}},
      {0xF7, {"1", "x-x^2/2", "x^2/2"}, {HERMITE_Y}},
      {0xFF, {HERMITE_X}, {HERMITE_Y}},
  };
  return rows;
}

#undef HERMITE_X
#undef HERMITE_Y

std::vector<Expr> parse_components(const std::vector<const char*>& parts) {
  std::vector<Expr> out{Expr::constant(1.0)};
  for (const char* s : parts) out.push_back(parse(s));
  return out;
}

}  // namespace

const std::vector<ComboFlags>& combo_rows() {
  static const std::vector<ComboFlags> rows = [] {
    std::vector<ComboFlags> out;
    for (const RawRow& r : raw_rows()) out.push_back(ComboFlags::from_mask(r.mask));
    return out;
  }();
  return rows;
}

ComboVectors combo_vectors(const ComboFlags& flags) {
  const std::uint8_t m = flags.mask();
  for (const RawRow& r : raw_rows())
    if (r.mask == m) return {parse_components(r.vx), parse_components(r.vy)};
  throw InvalidSpec("no tabulated blending vectors for this combination of edge conditions");
}

const std::array<EdgeConditionInfo, 8>& edge_conditions() {
  static const std::array<EdgeConditionInfo, 8> conditions{{
      {1, 0.0, 0, "f(x,0)"},
      {0, 0.0, 0, "f(0,y)"},
      {1, 1.0, 0, "f(x,1)"},
      {0, 1.0, 0, "f(1,y)"},
      {0, 0.0, 1, "fx(0,y)"},
      {0, 1.0, 1, "fx(1,y)"},
      {1, 0.0, 1, "fy(x,0)"},
      {1, 1.0, 1, "fy(x,1)"},
  }};
  return conditions;
}

ConstraintSet combo_constraints(const ComboFlags& flags, const Expr& c) {
  const std::uint8_t m = flags.mask();
  if (m == 0) throw InvalidSpec("at least one edge condition is required");
  ConstraintSet set(make_domain({{0.0, 1.0}, {0.0, 1.0}}));
  for (std::size_t i = 0; i < 8; ++i)
    if ((m >> i) & 1u) {
      const EdgeConditionInfo& e = edge_conditions()[i];
      add_constraint(set, e.axis, e.point, e.order, c);
    }
  return set;
}

ConstrainedExpression combo_ce(const ComboFlags& flags, const Expr& c, const Expr& g) {
  ConstraintSet set = combo_constraints(flags, c);
  ComboVectors cv = combo_vectors(flags);
  std::vector<VVector> v;
  v.push_back(v_from_components(set, 0, std::move(cv.vx)));
  v.push_back(v_from_components(set, 1, std::move(cv.vy)));
  return assemble(set, g, std::move(v));
}

}  // namespace cexpr
