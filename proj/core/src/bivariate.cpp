#include "cexpr/bivariate.hpp"

#include <cmath>
#include <cstdio>
#include <utility>

#include "cexpr/errors.hpp"

namespace cexpr {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double eval_at(const Expr& e, const std::string& var, double t) {
  return eval(substitute(e, var, t), {});
}

void check_close(double got, double want, double tol, const std::string& what) {
  if (!(std::abs(got - want) <= tol))
    throw InvalidSpec(what + " disagree: " + num(got) + " vs " + num(want));
}

Expr quad_form(const std::vector<Expr>& vx, const std::vector<std::vector<Expr>>& m,
               const std::vector<Expr>& vy) {
  Expr acc = Expr::constant(0.0);
  for (std::size_t i = 0; i < vx.size(); ++i)
    for (std::size_t j = 0; j < vy.size(); ++j)
      acc = acc + vx[i] * m[i][j] * vy[j];
  return acc;
}

}  // namespace

Expr coons(const RectSlices& c, const RectCorners& k, double tol) {
  check_close(eval_at(c.bottom, "x", 0.0), k.bl, tol, "corner (0,0): bottom slice and corner value");
  check_close(eval_at(c.bottom, "x", 1.0), k.br, tol, "corner (1,0): bottom slice and corner value");
  check_close(eval_at(c.top, "x", 0.0), k.tl, tol, "corner (0,1): top slice and corner value");
  check_close(eval_at(c.top, "x", 1.0), k.tr, tol, "corner (1,1): top slice and corner value");
  check_close(eval_at(c.left, "y", 0.0), k.bl, tol, "corner (0,0): left slice and corner value");
  check_close(eval_at(c.left, "y", 1.0), k.tl, tol, "corner (0,1): left slice and corner value");
  check_close(eval_at(c.right, "y", 0.0), k.br, tol, "corner (1,0): right slice and corner value");
  check_close(eval_at(c.right, "y", 1.0), k.tr, tol, "corner (1,1): right slice and corner value");

  const Expr x = Expr::variable("x");
  const Expr y = Expr::variable("y");
  const Expr one = Expr::constant(1.0);
  return (one - y) * c.bottom + y * c.top + (one - x) * c.left + x * c.right
       - ((one - x) * (one - y) * Expr::constant(k.bl)
          + (one - x) * y * Expr::constant(k.tl)
          + x * (one - y) * Expr::constant(k.br)
          + x * y * Expr::constant(k.tr));
}

Expr dirichlet_rect_ce(const RectSlices& c, const Expr& g, const Rect& r, double tol) {
  if (!(r.x_lo < r.x_hi) || !(r.y_lo < r.y_hi))
    throw InvalidSpec("rectangle must have positive extent on both axes");

  const double bl = eval_at(c.bottom, "x", r.x_lo);
  const double br = eval_at(c.bottom, "x", r.x_hi);
  const double tl = eval_at(c.top, "x", r.x_lo);
  const double tr = eval_at(c.top, "x", r.x_hi);
  check_close(eval_at(c.left, "y", r.y_lo), bl, tol, "corner (x_lo,y_lo): left and bottom slices");
  check_close(eval_at(c.left, "y", r.y_hi), tl, tol, "corner (x_lo,y_hi): left and top slices");
  check_close(eval_at(c.right, "y", r.y_lo), br, tol, "corner (x_hi,y_lo): right and bottom slices");
  check_close(eval_at(c.right, "y", r.y_hi), tr, tol, "corner (x_hi,y_hi): right and top slices");

  const Expr x = Expr::variable("x");
  const Expr y = Expr::variable("y");
  auto cst = [](double v) { return Expr::constant(v); };

  // Linear blends equal to 1 on their own edge and 0 on the opposite one.
  const Expr lam_x_lo = (x - cst(r.x_hi)) / cst(r.x_lo - r.x_hi);
  const Expr lam_x_hi = (x - cst(r.x_lo)) / cst(r.x_hi - r.x_lo);
  const Expr lam_y_lo = (y - cst(r.y_hi)) / cst(r.y_lo - r.y_hi);
  const Expr lam_y_hi = (y - cst(r.y_lo)) / cst(r.y_hi - r.y_lo);

  const Expr g_y_lo = substitute(g, "y", r.y_lo);
  const Expr g_y_hi = substitute(g, "y", r.y_hi);
  const Expr g_x_lo = substitute(g, "x", r.x_lo);
  const Expr g_x_hi = substitute(g, "x", r.x_hi);
  const Expr g_bl = substitute(g_x_lo, "y", r.y_lo);
  const Expr g_br = substitute(g_x_hi, "y", r.y_lo);
  const Expr g_tl = substitute(g_x_lo, "y", r.y_hi);
  const Expr g_tr = substitute(g_x_hi, "y", r.y_hi);

  return g
       + lam_x_lo * (c.left - g_x_lo) + lam_x_hi * (c.right - g_x_hi)
       + lam_y_lo * (c.bottom - g_y_lo) + lam_y_hi * (c.top - g_y_hi)
       - lam_x_lo * lam_y_lo * (cst(bl) - g_bl)
       - lam_x_lo * lam_y_hi * (cst(tl) - g_tl)
       - lam_x_hi * lam_y_lo * (cst(br) - g_br)
       - lam_x_hi * lam_y_hi * (cst(tr) - g_tr);
}

Expr multi_grid_ce(const std::vector<double>& x_nodes, const std::vector<double>& y_nodes,
                   const std::vector<Expr>& x_slices, const std::vector<Expr>& y_slices,
                   const std::vector<std::vector<double>>& intersections,
                   const Expr& g, double tol) {
  const std::size_t nx = x_nodes.size();
  const std::size_t ny = y_nodes.size();
  if (nx == 0 || ny == 0) throw InvalidSpec("need at least one node per axis");
  if (x_slices.size() != nx || y_slices.size() != ny)
    throw InvalidSpec("need one slice per node");
  if (intersections.size() != nx)
    throw InvalidSpec("intersection table must have one row per x node");
  for (const auto& row : intersections)
    if (row.size() != ny)
      throw InvalidSpec("intersection table must have one column per y node");
  for (std::size_t a = 0; a < nx; ++a)
    for (std::size_t b = a + 1; b < nx; ++b)
      if (x_nodes[a] == x_nodes[b])
        throw InvalidSpec("duplicate x node " + num(x_nodes[a]));
  for (std::size_t a = 0; a < ny; ++a)
    for (std::size_t b = a + 1; b < ny; ++b)
      if (y_nodes[a] == y_nodes[b])
        throw InvalidSpec("duplicate y node " + num(y_nodes[a]));

  for (std::size_t k = 0; k < nx; ++k)
    for (std::size_t j = 0; j < ny; ++j) {
      check_close(eval_at(x_slices[k], "y", y_nodes[j]), intersections[k][j], tol,
                  "grid point (" + num(x_nodes[k]) + ", " + num(y_nodes[j]) + "): x slice and intersection value");
      check_close(eval_at(y_slices[j], "x", x_nodes[k]), intersections[k][j], tol,
                  "grid point (" + num(x_nodes[k]) + ", " + num(y_nodes[j]) + "): y slice and intersection value");
    }

  auto lagrange = [](const std::string& var, const std::vector<double>& nodes, std::size_t k) {
    const Expr t = Expr::variable(var);
    double den = 1.0;
    Expr numer = Expr::constant(1.0);
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      if (j == k) continue;
      den *= nodes[k] - nodes[j];
      numer = numer * (t - Expr::constant(nodes[j]));
    }
    return Expr::constant(1.0 / den) * numer;
  };

  std::vector<Expr> vx{Expr::constant(1.0)}, vy{Expr::constant(1.0)};
  for (std::size_t k = 0; k < nx; ++k) vx.push_back(lagrange("x", x_nodes, k));
  for (std::size_t j = 0; j < ny; ++j) vy.push_back(lagrange("y", y_nodes, j));

  std::vector<std::vector<Expr>> mc(nx + 1, std::vector<Expr>(ny + 1));
  std::vector<std::vector<Expr>> mg(nx + 1, std::vector<Expr>(ny + 1));
  mc[0][0] = Expr::constant(0.0);
  mg[0][0] = Expr::constant(0.0);
  std::vector<Expr> g_at_x, g_at_y;
  for (std::size_t k = 0; k < nx; ++k) g_at_x.push_back(substitute(g, "x", x_nodes[k]));
  for (std::size_t j = 0; j < ny; ++j) g_at_y.push_back(substitute(g, "y", y_nodes[j]));
  for (std::size_t j = 0; j < ny; ++j) {
    mc[0][j + 1] = y_slices[j];
    mg[0][j + 1] = g_at_y[j];
  }
  for (std::size_t k = 0; k < nx; ++k) {
    mc[k + 1][0] = x_slices[k];
    mg[k + 1][0] = g_at_x[k];
    for (std::size_t j = 0; j < ny; ++j) {
      mc[k + 1][j + 1] = Expr::constant(-intersections[k][j]);
      mg[k + 1][j + 1] = -substitute(g_at_x[k], "y", y_nodes[j]);
    }
  }

  return quad_form(vx, mc, vy) + g - quad_form(vx, mg, vy);
}

std::vector<Expr> hermite_blends(const std::string& var) {
  const Expr t = Expr::variable(var);
  const Expr t2 = t * t;
  const Expr t3 = t2 * t;
  auto cst = [](double v) { return Expr::constant(v); };
  return {
      cst(1.0),
      cst(2.0) * t3 - cst(3.0) * t2 + cst(1.0),  // value at 0
      t3 - cst(2.0) * t2 + t,                    // slope at 0
      cst(-2.0) * t3 + cst(3.0) * t2,            // value at 1
      t3 - t2,                                   // slope at 1
  };
}

Expr hermite_coons(const HermiteSlices& c, const HermiteCornerData& corner, const Expr& g,
                   double tol) {
  struct Check {
    double got, want;
    const char* what;
  };
  const Expr bottom_dx = diff(c.bottom, "x");
  const Expr top_dx = diff(c.top, "x");
  const Expr left_dy = diff(c.left, "y");
  const Expr right_dy = diff(c.right, "y");
  const Expr bottom_dy_dx = diff(c.bottom_dy, "x");
  const Expr top_dy_dx = diff(c.top_dy, "x");
  const Expr left_dx_dy = diff(c.left_dx, "y");
  const Expr right_dx_dy = diff(c.right_dx, "y");
  const Check checks[] = {
      {eval_at(c.bottom, "x", 0.0), corner.c[0][0], "corner (0,0): bottom slice and corner value"},
      {eval_at(c.bottom, "x", 1.0), corner.c[1][0], "corner (1,0): bottom slice and corner value"},
      {eval_at(c.top, "x", 0.0), corner.c[0][1], "corner (0,1): top slice and corner value"},
      {eval_at(c.top, "x", 1.0), corner.c[1][1], "corner (1,1): top slice and corner value"},
      {eval_at(c.left, "y", 0.0), corner.c[0][0], "corner (0,0): left slice and corner value"},
      {eval_at(c.left, "y", 1.0), corner.c[0][1], "corner (0,1): left slice and corner value"},
      {eval_at(c.right, "y", 0.0), corner.c[1][0], "corner (1,0): right slice and corner value"},
      {eval_at(c.right, "y", 1.0), corner.c[1][1], "corner (1,1): right slice and corner value"},
      {eval_at(c.bottom_dy, "x", 0.0), corner.cy[0][0], "corner (0,0): bottom derivative slice and corner y-derivative"},
      {eval_at(c.bottom_dy, "x", 1.0), corner.cy[1][0], "corner (1,0): bottom derivative slice and corner y-derivative"},
      {eval_at(c.top_dy, "x", 0.0), corner.cy[0][1], "corner (0,1): top derivative slice and corner y-derivative"},
      {eval_at(c.top_dy, "x", 1.0), corner.cy[1][1], "corner (1,1): top derivative slice and corner y-derivative"},
      {eval_at(c.left_dx, "y", 0.0), corner.cx[0][0], "corner (0,0): left derivative slice and corner x-derivative"},
      {eval_at(c.left_dx, "y", 1.0), corner.cx[0][1], "corner (0,1): left derivative slice and corner x-derivative"},
      {eval_at(c.right_dx, "y", 0.0), corner.cx[1][0], "corner (1,0): right derivative slice and corner x-derivative"},
      {eval_at(c.right_dx, "y", 1.0), corner.cx[1][1], "corner (1,1): right derivative slice and corner x-derivative"},
      {eval_at(bottom_dx, "x", 0.0), corner.cx[0][0], "corner (0,0): bottom slice slope and corner x-derivative"},
      {eval_at(bottom_dx, "x", 1.0), corner.cx[1][0], "corner (1,0): bottom slice slope and corner x-derivative"},
      {eval_at(top_dx, "x", 0.0), corner.cx[0][1], "corner (0,1): top slice slope and corner x-derivative"},
      {eval_at(top_dx, "x", 1.0), corner.cx[1][1], "corner (1,1): top slice slope and corner x-derivative"},
      {eval_at(left_dy, "y", 0.0), corner.cy[0][0], "corner (0,0): left slice slope and corner y-derivative"},
      {eval_at(left_dy, "y", 1.0), corner.cy[0][1], "corner (0,1): left slice slope and corner y-derivative"},
      {eval_at(right_dy, "y", 0.0), corner.cy[1][0], "corner (1,0): right slice slope and corner y-derivative"},
      {eval_at(right_dy, "y", 1.0), corner.cy[1][1], "corner (1,1): right slice slope and corner y-derivative"},
      {eval_at(bottom_dy_dx, "x", 0.0), corner.cxy[0][0], "corner (0,0): bottom derivative slope and corner mixed derivative"},
      {eval_at(bottom_dy_dx, "x", 1.0), corner.cxy[1][0], "corner (1,0): bottom derivative slope and corner mixed derivative"},
      {eval_at(top_dy_dx, "x", 0.0), corner.cxy[0][1], "corner (0,1): top derivative slope and corner mixed derivative"},
      {eval_at(top_dy_dx, "x", 1.0), corner.cxy[1][1], "corner (1,1): top derivative slope and corner mixed derivative"},
      {eval_at(left_dx_dy, "y", 0.0), corner.cxy[0][0], "corner (0,0): left derivative slope and corner mixed derivative"},
      {eval_at(left_dx_dy, "y", 1.0), corner.cxy[0][1], "corner (0,1): left derivative slope and corner mixed derivative"},
      {eval_at(right_dx_dy, "y", 0.0), corner.cxy[1][0], "corner (1,0): right derivative slope and corner mixed derivative"},
      {eval_at(right_dx_dy, "y", 1.0), corner.cxy[1][1], "corner (1,1): right derivative slope and corner mixed derivative"},
  };
  for (const auto& chk : checks) check_close(chk.got, chk.want, tol, chk.what);

  const std::vector<Expr> vx = hermite_blends("x");
  const std::vector<Expr> vy = hermite_blends("y");

  auto cst = [](double v) { return Expr::constant(v); };
  // Boundary data in blend order: value at 0, slope at 0, value at 1, slope at 1.
  const Expr row_slices[4] = {c.left, c.left_dx, c.right, c.right_dx};
  const Expr col_slices[4] = {c.bottom, c.bottom_dy, c.top, c.top_dy};
  const double corner_data[4][4] = {
      {corner.c[0][0], corner.cy[0][0], corner.c[0][1], corner.cy[0][1]},
      {corner.cx[0][0], corner.cxy[0][0], corner.cx[0][1], corner.cxy[0][1]},
      {corner.c[1][0], corner.cy[1][0], corner.c[1][1], corner.cy[1][1]},
      {corner.cx[1][0], corner.cxy[1][0], corner.cx[1][1], corner.cxy[1][1]},
  };

  const Expr g_y = diff(g, "y");
  const Expr g_x = diff(g, "x");
  const Expr g_xy = diff(g_x, "y");
  // Same functionals applied to g: rows restrict in x, columns in y.
  const Expr g_rows[4] = {substitute(g, "x", 0.0), substitute(g_x, "x", 0.0),
                          substitute(g, "x", 1.0), substitute(g_x, "x", 1.0)};
  const Expr g_cols[4] = {substitute(g, "y", 0.0), substitute(g_y, "y", 0.0),
                          substitute(g, "y", 1.0), substitute(g_y, "y", 1.0)};
  const Expr g_corner[4][4] = {
      {substitute(g_rows[0], "y", 0.0), substitute(substitute(g_y, "x", 0.0), "y", 0.0),
       substitute(g_rows[0], "y", 1.0), substitute(substitute(g_y, "x", 0.0), "y", 1.0)},
      {substitute(g_rows[1], "y", 0.0), substitute(substitute(g_xy, "x", 0.0), "y", 0.0),
       substitute(g_rows[1], "y", 1.0), substitute(substitute(g_xy, "x", 0.0), "y", 1.0)},
      {substitute(g_rows[2], "y", 0.0), substitute(substitute(g_y, "x", 1.0), "y", 0.0),
       substitute(g_rows[2], "y", 1.0), substitute(substitute(g_y, "x", 1.0), "y", 1.0)},
      {substitute(g_rows[3], "y", 0.0), substitute(substitute(g_xy, "x", 1.0), "y", 0.0),
       substitute(g_rows[3], "y", 1.0), substitute(substitute(g_xy, "x", 1.0), "y", 1.0)},
  };

  std::vector<std::vector<Expr>> mc(5, std::vector<Expr>(5, Expr::constant(0.0)));
  std::vector<std::vector<Expr>> mg(5, std::vector<Expr>(5, Expr::constant(0.0)));
  for (int i = 0; i < 4; ++i) {
    mc[i + 1][0] = row_slices[i];
    mg[i + 1][0] = g_rows[i];
    mc[0][i + 1] = col_slices[i];
    mg[0][i + 1] = g_cols[i];
    for (int j = 0; j < 4; ++j) {
      mc[i + 1][j + 1] = cst(-corner_data[i][j]);
      mg[i + 1][j + 1] = -g_corner[i][j];
    }
  }

  return quad_form(vx, mc, vy) + g - quad_form(vx, mg, vy);
}

namespace {

// Antiderivative (vanishing at 0) of a polynomial expression in `var`.
// Coefficients are read off by repeated differentiation; a chain that does
// not terminate means the input was not polynomial.
Expr polynomial_antiderivative(const Expr& e, const std::string& var) {
  std::vector<double> coeff;
  Expr d = e;
  double fact = 1.0;
  for (int k = 0; k <= 64; ++k) {
    if (k > 0) {
      d = diff(d, var);
      fact *= k;
    }
    if (d.is_constant() && d.constant_value() == 0.0) break;
    if (k == 64)
      throw InvalidSpec("slice data for a tangential-derivative condition must be polynomial in the line variable");
    coeff.push_back(eval(substitute(d, var, 0.0), {}) / fact);
  }
  const Expr t = Expr::variable(var);
  Expr acc = Expr::constant(0.0);
  for (std::size_t k = 0; k < coeff.size(); ++k)
    acc = acc + Expr::constant(coeff[k] / static_cast<double>(k + 1)) * pow(t, static_cast<double>(k + 1));
  return acc;
}

}  // namespace

Expr mixed_ce(const Domain& dom, const std::vector<MixedRow>& rows, const Expr& g) {
  if (dom.dim() != 2)
    throw InvalidSpec("tangential-derivative conditions are only supported on 2-D domains");
  ConstraintSet set(dom);
  for (const MixedRow& row : rows) {
    if (row.axis >= 2) throw InvalidSpec("axis out of range");
    if (row.tangential_order == 0)
      add_constraint(set, row.axis, row.point, row.normal_order, row.rhs, /*pre_sliced=*/true);
  }
  for (const MixedRow& row : rows) {
    if (row.tangential_order == 0) continue;
    if (row.tangential_order != 1)
      throw InvalidSpec("tangential derivative order must be 0 or 1");
    if (row.normal_order != 0)
      throw InvalidSpec("a tangential-derivative condition cannot also take a normal derivative");

    const std::size_t other = 1 - row.axis;
    const std::string& line_var = dom.axis(other).name;
    if (depends_on(row.rhs, dom.axis(row.axis).name))
      throw InvalidSpec("slice data must not depend on the fixed coordinate");

    // Recover the value slice along this line: integrate the prescribed
    // tangential derivative and pin the integration constant where a value
    // condition on the other axis crosses this line.
    const MixedRow* anchor = nullptr;
    for (const MixedRow& cand : rows)
      if (cand.axis == other && cand.tangential_order == 0 && cand.normal_order == 0) {
        anchor = &cand;
        break;
      }
    if (anchor == nullptr)
      throw InvalidSpec("a tangential-derivative condition needs a crossing value condition to pin the integration constant");

    const Expr antider = polynomial_antiderivative(row.rhs, line_var);
    const double at_anchor = eval(substitute(antider, line_var, anchor->point), {});
    const double anchor_value = eval(substitute(anchor->rhs, dom.axis(row.axis).name, row.point), {});
    const Expr value_slice =
        antider + Expr::constant(anchor_value - at_anchor);
    add_constraint(set, row.axis, row.point, 0, value_slice, /*pre_sliced=*/true);
  }

  const CompatReport report = validate_compatibility(set);
  if (!report.ok) {
    for (const auto& entry : report.entries)
      if (!entry.ok)
        throw InvalidSpec("boundary conditions disagree where their lines cross (mismatch " +
                          num(entry.max_mismatch) + ")");
  }
  return assemble(set, g).as_expr();
}

}  // namespace cexpr
