#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "cexpr/domain.hpp"
#include "cexpr/expr.hpp"
#include "cexpr/tensor.hpp"

namespace cexpr {

// Value slices of a surface along the four edges of an axis-aligned rectangle.
// bottom/top are functions of x (taken on the low/high y edge), left/right are
// functions of y (taken on the low/high x edge).
struct RectSlices {
    Expr bottom;
    Expr top;
    Expr left;
    Expr right;
};

// Corner values: bl = f(x_lo, y_lo), br = f(x_hi, y_lo),
//                tl = f(x_lo, y_hi), tr = f(x_hi, y_hi).
struct RectCorners {
    double bl = 0.0;
    double br = 0.0;
    double tl = 0.0;
    double tr = 0.0;
};

struct Rect {
    double x_lo = 0.0;
    double x_hi = 1.0;
    double y_lo = 0.0;
    double y_hi = 1.0;
};

// Transfinite bilinear blend on [0,1]^2 in the variables x, y. Reproduces the
// four edge slices exactly; the slices must meet the given corner values
// within tol at the edge endpoints.
Expr coons(const RectSlices& c, const RectCorners& corners, double tol = 1e-9);

// Constrained expression on a generic rectangle reproducing the four value
// slices for any free function g. Corner values are read off the slices and
// must agree within tol where edges meet. With g = 0 this is the Coons blend
// mapped to the rectangle.
Expr dirichlet_rect_ce(const RectSlices& c, const Expr& g, const Rect& r,
                       double tol = 1e-9);

// Surface constrained to match whole function slices on a grid of lines
// x = x_nodes[k] and y = y_nodes[j], for any free function g.
// x_slices[k] is f on the line x = x_nodes[k] (a function of y), y_slices[j]
// is f on the line y = y_nodes[j] (a function of x), and intersections[k][j]
// is the value at (x_nodes[k], y_nodes[j]); the slices must reproduce those
// values within tol.
Expr multi_grid_ce(const std::vector<double>& x_nodes,
                   const std::vector<double>& y_nodes,
                   const std::vector<Expr>& x_slices,
                   const std::vector<Expr>& y_slices,
                   const std::vector<std::vector<double>>& intersections,
                   const Expr& g, double tol = 1e-9);

// Corner data for the bicubic Hermite blend on [0,1]^2, indexed [i][j] for the
// corner (x=i, y=j): values, both first derivatives, and the mixed second
// derivative.
struct HermiteCornerData {
    std::array<std::array<double, 2>, 2> c{};
    std::array<std::array<double, 2>, 2> cx{};
    std::array<std::array<double, 2>, 2> cy{};
    std::array<std::array<double, 2>, 2> cxy{};
};

// Edge data for the bicubic Hermite blend: value slices and normal-derivative
// slices along each edge of [0,1]^2.
struct HermiteSlices {
    Expr bottom;     // f(x, 0)
    Expr top;        // f(x, 1)
    Expr bottom_dy;  // df/dy at y = 0, a function of x
    Expr top_dy;     // df/dy at y = 1
    Expr left;       // f(0, y)
    Expr right;      // f(1, y)
    Expr left_dx;    // df/dx at x = 0, a function of y
    Expr right_dx;   // df/dx at x = 1
};

// Constrained expression on [0,1]^2 reproducing four value slices and four
// normal-derivative slices for any free function g, built from cubic Hermite
// blending polynomials. The slice and corner data must be mutually consistent
// within tol.
Expr hermite_coons(const HermiteSlices& c, const HermiteCornerData& corner,
                   const Expr& g, double tol = 1e-9);

// The cubic Hermite blending vector {1, h00, h10, h01, h11} in the named
// variable; the four blends are dual to value/derivative evaluation at 0 and 1.
std::vector<Expr> hermite_blends(const std::string& var);

// One boundary condition line for mixed_ce. The line fixes coordinate `axis`
// of a 2-D domain at `point`; rhs is a function of the other variable.
// tangential_order = 1 means rhs prescribes the derivative of the f-slice
// taken along the line rather than across it (normal_order must then be 0,
// and rhs must be polynomial in the line variable).
struct MixedRow {
    std::size_t axis = 0;
    double point = 0.0;
    int normal_order = 0;
    int tangential_order = 0;
    Expr rhs;
};

// Constrained expression on a 2-D domain for a mix of normal-derivative and
// first-order tangential-derivative boundary conditions. Each tangential row
// is integrated along its line and anchored at a crossing value row, turning
// it into an equivalent value condition; the reduced set must be compatible.
Expr mixed_ce(const Domain& dom, const std::vector<MixedRow>& rows,
              const Expr& g);

// A combination of value and first-derivative conditions on the edges of
// [0,1]^2. value_y0 constrains f(x,0), deriv_x1 constrains df/dx on the x=1
// edge, and so on.
struct ComboFlags {
    bool value_y0 = false;
    bool value_x0 = false;
    bool value_y1 = false;
    bool value_x1 = false;
    bool deriv_x0 = false;
    bool deriv_x1 = false;
    bool deriv_y0 = false;
    bool deriv_y1 = false;

    std::uint8_t mask() const;
    static ComboFlags from_mask(std::uint8_t m);
    int count() const;
};

// Every edge-condition combination with a tabulated pair of blending vectors,
// in table order.
const std::vector<ComboFlags>& combo_rows();

// The eight edge conditions of [0,1]^2 in flag order: bit i of
// ComboFlags::mask() selects entry i.
struct EdgeConditionInfo {
    std::size_t axis;
    double point;
    int order;
    const char* name;
};
const std::array<EdgeConditionInfo, 8>& edge_conditions();

// Tabulated blending vectors for one combination, leading component 1
// included. Throws InvalidSpec if the combination is not tabulated.
struct ComboVectors {
    std::vector<Expr> vx;
    std::vector<Expr> vy;
};
ComboVectors combo_vectors(const ComboFlags& flags);

// Constraint set on [0,1]^2 whose rows are the flagged edge conditions with
// data sliced from the bivariate function c(x, y).
ConstraintSet combo_constraints(const ComboFlags& flags, const Expr& c);

// Constrained expression for a tabulated combination, built with the
// tabulated blending vectors and slice data taken from c.
ConstrainedExpression combo_ce(const ComboFlags& flags, const Expr& c,
                               const Expr& g);

}  // namespace cexpr
