// Acceptance gate: runs every guarantee the project commits to and prints one
// PASS/FAIL line per criterion. Exits with the number of failed criteria.
// Tolerances are pinned here on purpose; loosening one is a behavior change.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cexpr/bivariate.hpp"
#include "cexpr/domain.hpp"
#include "cexpr/errors.hpp"
#include "cexpr/expr.hpp"
#include "cexpr/pde.hpp"
#include "cexpr/tensor.hpp"
#include "cexpr/univariate.hpp"
#include "cexpr/verify.hpp"

using namespace cexpr;

namespace {

constexpr double kBoundaryTol = 1e-9;
constexpr double kExactAgreementTol = 1e-12;
constexpr double kTableResidualTol = 1e-10;
constexpr double kTableFreedomMin = 1e-3;
constexpr double kDerivativeRelTol = 1e-6;
constexpr double kPoissonInteriorTol = 1e-6;
// degree 10 bottoms out near 5e-6 for the manufactured sine product, and an
// odd degree only adds parity-useless functions; 12 is the first degree that
// clears the interior gate with margin
constexpr int kPoissonDegree = 12;

int g_failures = 0;

void report(int idx, bool pass, const std::string& text) {
  std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", idx, text.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Largest residual of any constraint functional applied to the surface,
// sampled at random points on each constrained plane.
double boundary_residual(const ConstrainedExpression& ce, std::mt19937_64& rng,
                         std::size_t samples_per_constraint) {
  const ConstraintSet& set = ce.constraints();
  const Domain& dom = set.domain();
  const std::vector<std::string> vars = dom.var_names();
  double worst = 0.0;
  std::vector<double> pt(dom.dim());
  std::vector<int> delta(dom.dim(), 0);
  for (std::size_t k = 0; k < dom.dim(); ++k) {
    for (std::size_t i = 0; i < set.count(k); ++i) {
      const AxisConstraint& c = set.on_axis(k)[i];
      const CompiledExpr want(set.slice(k, i), vars);
      std::fill(delta.begin(), delta.end(), 0);
      delta[k] = c.order;
      for (std::size_t s = 0; s < samples_per_constraint; ++s) {
        for (std::size_t j = 0; j < dom.dim(); ++j)
          pt[j] = uniform_sample(rng, dom.axis(j).lo, dom.axis(j).hi);
        pt[k] = c.point;
        worst = std::max(worst, std::abs(ce.eval_partial(pt, delta) - want.eval(pt)));
      }
    }
  }
  return worst;
}

// Same check for a plain expression (the closed-form constructors).
double expr_boundary_residual(const Expr& f, const ConstraintSet& set, std::mt19937_64& rng,
                              std::size_t samples_per_constraint) {
  const Domain& dom = set.domain();
  const std::vector<std::string> vars = dom.var_names();
  double worst = 0.0;
  std::vector<double> pt(dom.dim());
  for (std::size_t k = 0; k < dom.dim(); ++k) {
    for (std::size_t i = 0; i < set.count(k); ++i) {
      const AxisConstraint& c = set.on_axis(k)[i];
      const CompiledExpr want(set.slice(k, i), vars);
      const CompiledExpr have(diff(f, vars[k], c.order), vars);
      for (std::size_t s = 0; s < samples_per_constraint; ++s) {
        for (std::size_t j = 0; j < dom.dim(); ++j)
          pt[j] = uniform_sample(rng, dom.axis(j).lo, dom.axis(j).hi);
        pt[k] = c.point;
        worst = std::max(worst, std::abs(have.eval(pt) - want.eval(pt)));
      }
    }
  }
  return worst;
}

// Per-axis (point, order) layouts in axis-relative coordinates, every one of
// which admits a dual blend basis (directly or through the shifted fallback).
struct AxisPattern {
  std::vector<std::pair<double, int>> items;  // (relative position in [0,1], order)
};

const std::vector<AxisPattern>& pattern_menu() {
  static const std::vector<AxisPattern> menu{
      {{}},
      {{{0.0, 0}}},
      {{{1.0, 1}}},
      {{{0.0, 0}, {1.0, 0}}},
      {{{0.0, 0}, {0.0, 1}}},
      {{{0.5, 0}, {1.0, 0}}},
      {{{0.0, 0}, {0.5, 0}, {1.0, 0}}},
      {{{0.0, 0}, {0.0, 1}, {0.0, 2}}},
      {{{0.0, 0}, {1.0, 0}, {1.0, 1}}},
      {{{0.0, 0}, {0.0, 1}, {1.0, 0}}},
  };
  return menu;
}

Domain random_domain(std::mt19937_64& rng, std::size_t n) {
  std::vector<std::pair<double, double>> spans;
  for (std::size_t k = 0; k < n; ++k) {
    const double lo = uniform_sample(rng, -1.5, 0.0);
    spans.emplace_back(lo, lo + uniform_sample(rng, 0.8, 2.2));
  }
  return make_domain(spans);
}

// A random constraint set whose slice data all comes from one global
// expression, so cross-axis compatibility holds by construction.
ConstraintSet random_set(std::mt19937_64& rng, const Domain& dom, const Expr& c) {
  const auto& menu = pattern_menu();
  for (;;) {
    ConstraintSet set(dom);
    for (std::size_t k = 0; k < dom.dim(); ++k) {
      const AxisPattern& pat = menu[rng() % menu.size()];
      const Axis& ax = dom.axis(k);
      for (const auto& [t, order] : pat.items)
        add_constraint(set, k, ax.lo + t * (ax.hi - ax.lo), order, c);
    }
    if (set.total() > 0) return set;
  }
}

void criterion_1() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20260816);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(trial % 3);
    const Domain dom = random_domain(rng, n);
    const Expr c = random_polynomial(rng, dom.var_names(), 4);
    const ConstraintSet set = random_set(rng, dom, c);
    for (int gi = 0; gi < 3; ++gi) {
      const Expr g = random_polynomial(rng, dom.var_names(), 3);
      const ConstrainedExpression ce = assemble(set, g);
      worst = std::max(worst, boundary_residual(ce, rng, 100));
    }
  }
  const double elapsed = seconds_since(t0);
  const bool pass = worst <= kBoundaryTol && elapsed < 60.0;
  report(1, pass,
         "assembled surfaces satisfy every constraint for arbitrary free functions "
         "(600 surfaces, max residual " +
             fmt(worst) + ", " + fmt(elapsed) + " s)");
}

void criterion_2() {
  ConstraintSet set(make_domain({{0.0, 1.0}}));
  add_constraint(set, 0, 0.0, 0, Expr::constant(0.0), true);
  add_constraint(set, 0, 1.0, 0, Expr::constant(0.0), true);
  const VVector v = build_v(set, 0);

  bool pass = v.alpha.size() == 2 && v.alpha[0] == std::vector<double>{1.0, 0.0} &&
              v.alpha[1] == std::vector<double>{-1.0, 1.0} && v.components.size() == 3;
  if (pass) {
    // components must be exactly {1, 1-x, x}, bit for bit at binary-exact abscissae
    for (double t : {0.0, 0.25, 0.5, 1.0}) {
      const Env env{{"x", t}};
      pass = pass && eval(v.components[0], env) == 1.0;
      pass = pass && eval(v.components[1], env) == 1.0 - t;
      pass = pass && eval(v.components[2], env) == t;
    }
  }
  report(2, pass, "two-point value blends and their dual matrix are exact");
}

struct ClosedFormCase {
  std::string name;
  double max_gap = 0.0;
};

void criterion_3() {
  std::mt19937_64 rng(733);
  std::vector<ClosedFormCase> cases{{"coons"}, {"dirichlet rect"}, {"hermite"}, {"grid"}};

  auto gap_against = [&](const Expr& closed, const ConstrainedExpression& ce, double& slot) {
    const CompiledExpr prog(closed, ce.domain().var_names());
    std::vector<double> pt(2);
    for (int s = 0; s < 100; ++s) {
      for (std::size_t j = 0; j < 2; ++j)
        pt[j] = uniform_sample(rng, ce.domain().axis(j).lo, ce.domain().axis(j).hi);
      slot = std::max(slot, std::abs(prog.eval(pt) - ce.eval(pt)));
    }
  };

  for (int data = 0; data < 20; ++data) {
    const Expr c = random_polynomial(rng, {"x", "y"}, 3);
    const Expr g = random_polynomial(rng, {"x", "y"}, 3);
    auto corner = [&](double x, double y) { return eval(c, {{"x", x}, {"y", y}}); };

    {  // transfinite value blend on the unit square, free function fixed to zero
      RectSlices s{substitute(c, "y", 0.0), substitute(c, "y", 1.0), substitute(c, "x", 0.0),
                   substitute(c, "x", 1.0)};
      RectCorners q{corner(0, 0), corner(1, 0), corner(0, 1), corner(1, 1)};
      ConstraintSet set(make_domain({{0.0, 1.0}, {0.0, 1.0}}));
      for (double p : {0.0, 1.0}) {
        add_constraint(set, 0, p, 0, c);
        add_constraint(set, 1, p, 0, c);
      }
      gap_against(coons(s, q), assemble(set, Expr::constant(0.0)), cases[0].max_gap);
      gap_against(dirichlet_rect_ce(s, g, Rect{}), assemble(set, g), cases[1].max_gap);
    }
    {  // generic rectangle
      const double x_lo = uniform_sample(rng, -2.0, 0.0), x_hi = x_lo + uniform_sample(rng, 1.0, 2.0);
      const double y_lo = uniform_sample(rng, -1.0, 0.5), y_hi = y_lo + uniform_sample(rng, 1.0, 2.0);
      RectSlices s{substitute(c, "y", y_lo), substitute(c, "y", y_hi), substitute(c, "x", x_lo),
                   substitute(c, "x", x_hi)};
      ConstraintSet set(make_domain({{x_lo, x_hi}, {y_lo, y_hi}}));
      for (double p : {x_lo, x_hi}) add_constraint(set, 0, p, 0, c);
      for (double p : {y_lo, y_hi}) add_constraint(set, 1, p, 0, c);
      gap_against(dirichlet_rect_ce(s, g, Rect{x_lo, x_hi, y_lo, y_hi}), assemble(set, g),
                  cases[1].max_gap);
    }
    {  // value plus normal-derivative slices on the unit square
      const Expr cx = diff(c, "x"), cy = diff(c, "y");
      HermiteSlices s{substitute(c, "y", 0.0),  substitute(c, "y", 1.0),
                      substitute(cy, "y", 0.0), substitute(cy, "y", 1.0),
                      substitute(c, "x", 0.0),  substitute(c, "x", 1.0),
                      substitute(cx, "x", 0.0), substitute(cx, "x", 1.0)};
      HermiteCornerData q;
      const Expr cxy = diff(cx, "y");
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          const Env env{{"x", double(i)}, {"y", double(j)}};
          q.c[i][j] = eval(c, env);
          q.cx[i][j] = eval(cx, env);
          q.cy[i][j] = eval(cy, env);
          q.cxy[i][j] = eval(cxy, env);
        }
      ConstraintSet set(make_domain({{0.0, 1.0}, {0.0, 1.0}}));
      for (double p : {0.0, 1.0})
        for (int d : {0, 1}) {
          add_constraint(set, 0, p, d, c);
          add_constraint(set, 1, p, d, c);
        }
      ConstrainedExpression ce = assemble(set, g);
      gap_against(hermite_coons(s, q, g), ce, cases[2].max_gap);
    }
    {  // grid of whole-line value constraints
      const std::vector<double> xn{0.0, uniform_sample(rng, 0.5, 1.0)};
      const std::vector<double> yn{0.0, uniform_sample(rng, 0.3, 0.6), 1.0};
      std::vector<Expr> xs, ys;
      for (double p : xn) xs.push_back(substitute(c, "x", p));
      for (double p : yn) ys.push_back(substitute(c, "y", p));
      std::vector<std::vector<double>> inter(xn.size(), std::vector<double>(yn.size()));
      for (std::size_t a = 0; a < xn.size(); ++a)
        for (std::size_t b = 0; b < yn.size(); ++b) inter[a][b] = corner(xn[a], yn[b]);
      ConstraintSet set(make_domain({{0.0, 1.0}, {0.0, 1.0}}));
      for (double p : xn) add_constraint(set, 0, p, 0, c);
      for (double p : yn) add_constraint(set, 1, p, 0, c);
      gap_against(multi_grid_ce(xn, yn, xs, ys, inter, g), assemble(set, g), cases[3].max_gap);
    }
  }

  bool pass = true;
  std::string detail;
  for (const ClosedFormCase& cc : cases) {
    pass = pass && cc.max_gap <= kExactAgreementTol;
    detail += (detail.empty() ? "" : ", ") + cc.name + " " + fmt(cc.max_gap);
  }
  report(3, pass, "closed-form constructors agree with the tensor engine (" + detail + ")");
}

void criterion_4() {
  std::mt19937_64 rng(4242);
  const std::vector<ComboFlags> rows = combo_rows();
  const auto conds = edge_conditions();
  // a fixed offset with every low-order coefficient populated plus a
  // transcendental tail: no edge functional annihilates the change, and no
  // tabulated combination (not even the cubic-reproducing Hermite rows) can
  // absorb it entirely
  const Expr offset = parse("0.31 + 0.47*x + 0.83*y + 0.59*x*y + 0.71*x^2 + 0.37*y^2 "
                            "+ 0.29*x^2*y + 0.53*x*y^2 + sin(2.3*x + 1.7*y)");
  bool pass = rows.size() == 42;
  double worst_resid = 0.0, least_freedom = 1.0 / 0.0;
  for (const ComboFlags& flags : rows) {
    const Expr c = random_polynomial(rng, {"x", "y"}, 3);
    const Expr g1 = random_polynomial(rng, {"x", "y"}, 3);
    const ConstrainedExpression ce1 = combo_ce(flags, c, g1);
    const ConstrainedExpression ce2 = combo_ce(flags, c, g1 + offset);
    for (std::size_t bit = 0; bit < conds.size(); ++bit) {
      const EdgeConditionInfo& info = conds[bit];
      const bool flagged = (flags.mask() >> bit) & 1u;
      const std::string& var = info.axis == 0 ? "x" : "y";
      const Expr want = substitute(diff(c, var, info.order), var, info.point);
      const CompiledExpr want_prog(want, {"x", "y"});
      std::vector<int> delta(2, 0);
      delta[info.axis] = info.order;
      std::vector<double> pt(2);
      double resid = 0.0, freedom = 0.0;
      for (int s = 0; s <= 16; ++s) {
        pt[info.axis] = info.point;
        pt[1 - info.axis] = s / 16.0;
        if (flagged) {
          resid = std::max(resid, std::abs(ce1.eval_partial(pt, delta) - want_prog.eval(pt)));
          resid = std::max(resid, std::abs(ce2.eval_partial(pt, delta) - want_prog.eval(pt)));
        } else {
          freedom = std::max(freedom,
                             std::abs(ce1.eval_partial(pt, delta) - ce2.eval_partial(pt, delta)));
        }
      }
      if (flagged) {
        worst_resid = std::max(worst_resid, resid);
        if (resid > kTableResidualTol) pass = false;
      } else {
        least_freedom = std::min(least_freedom, freedom);
        if (freedom <= kTableFreedomMin) pass = false;
      }
    }
  }
  report(4, pass,
         "all 42 edge-condition combinations hold and leave unlisted edges free "
         "(max residual " +
             fmt(worst_resid) + ", min freedom " + fmt(least_freedom) + ")");
}

void criterion_5() {
  std::mt19937_64 rng(5150);
  bool pass = true;
  std::string detail;

  {  // four parallel value lines, one of them discontinuous, two free functions
    const Domain dom = make_domain({{0.0, 1.0}, {-2.0, 3.0}});
    ConstraintSet set(dom);
    add_constraint(set, 1, -2.0, 0, parse("sin(2*x)"), true);
    add_constraint(set, 1, 0.0, 0, parse("3*cos(x)*mod(x + 1, 2)"), true);
    add_constraint(set, 1, 1.0, 0, parse("9*exp(-x^2)"), true);
    add_constraint(set, 1, 3.0, 0, parse("1 - x"), true);
    double worst = 0.0;
    for (const Expr& g :
         {Expr::constant(0.0), parse("x^2*y - sin(5*x)*cos(4*mod(y, 1))")}) {
      worst = std::max(worst, boundary_residual(assemble(set, g), rng, 100));
    }
    pass = pass && worst <= kBoundaryTol;
    detail += "four-line " + fmt(worst);
  }

  {  // two values plus a vanishing first derivative on the middle line
    const Domain dom = make_domain({{0.0, 1.0}, {-2.0, 1.0}});
    ConstraintSet set(dom);
    add_constraint(set, 1, -2.0, 0, parse("sin(2*x)"), true);
    add_constraint(set, 1, 0.0, 1, Expr::constant(0.0), true);
    add_constraint(set, 1, 1.0, 0, parse("9*exp(-x^2)"), true);
    const Expr g2 = parse("3*x^2*y - 2*sin(15*x)*cos(2*y)");

    double worst = 0.0, flat = 0.0;
    for (const Expr& g : {Expr::constant(0.0), g2}) {
      const ConstrainedExpression ce = assemble(set, g);
      worst = std::max(worst, boundary_residual(ce, rng, 100));
      // the y-derivative must vanish identically along y = 0
      for (int s = 0; s < 100; ++s) {
        const double x = uniform_sample(rng, 0.0, 1.0);
        flat = std::max(flat, std::abs(eval_f_partial(ce, {x, 0.0}, {0, 1})));
      }
    }
    pass = pass && worst <= kBoundaryTol && flat <= kBoundaryTol;
    detail += ", mid-slope " + fmt(std::max(worst, flat));

    // the engine's coefficient functions must match the hand-derived ones:
    //   e1 = 2 gy(x,0) + 12 e^{-x^2} - sin(2x)/3 + g(x,-2)/3 - 4 g(x,1)/3
    //   e2 = -gy(x,0)
    //   e3 = sin(2x)/3 - g(x,-2)/3 - gy(x,0) - 3 e^{-x^2} + g(x,1)/3
    const Expr gy0 = substitute(diff(g2, "y"), "y", 0.0);
    const Expr gm2 = substitute(g2, "y", -2.0);
    const Expr gp1 = substitute(g2, "y", 1.0);
    const Expr third = Expr::constant(1.0 / 3.0);
    const Expr e1 = Expr::constant(2.0) * gy0 + parse("12*exp(-x^2) - sin(2*x)/3") +
                    third * gm2 - Expr::constant(4.0 / 3.0) * gp1;
    const Expr e2 = Expr::constant(-1.0) * gy0;
    const Expr e3 = parse("sin(2*x)/3 - 3*exp(-x^2)") - third * gm2 - gy0 + third * gp1;
    const Expr y = Expr::variable("y");
    const Expr hand = g2 + e1 + e2 * y + e3 * y * y;
    const CompiledExpr hand_prog(hand, {"x", "y"});
    const ConstrainedExpression ce2 = assemble(set, g2);
    double gap = 0.0;
    for (int s = 0; s < 100; ++s) {
      const std::vector<double> pt{uniform_sample(rng, 0.0, 1.0), uniform_sample(rng, -2.0, 1.0)};
      gap = std::max(gap, std::abs(hand_prog.eval(pt) - ce2.eval(pt)));
    }
    pass = pass && gap <= 1e-10;
    detail += ", hand coefficients " + fmt(gap);

    // the dedicated one-axis builder exposes those coefficients directly
    UnivariateSpec spec;
    spec.var = "y";
    spec.support = {Expr::constant(1.0), y, y * y};
    spec.constraints = {{-2.0, 0, parse("sin(2*x)")},
                        {0.0, 1, Expr::constant(0.0)},
                        {1.0, 0, parse("9*exp(-x^2)")}};
    spec.g = g2;
    const UnivariateCe uce = build_univariate_ce(spec);
    bool eta_ok = !depends_on(uce.eta[1], "y");
    const CompiledExpr eta_prog(uce.eta[1], {"x"});
    const CompiledExpr minus_gy0(Expr::constant(-1.0) * gy0, {"x"});
    for (int s = 0; s < 50; ++s) {
      const std::vector<double> px{uniform_sample(rng, 0.0, 1.0)};
      if (std::abs(eta_prog.eval(px) - minus_gy0.eval(px)) > 1e-12) eta_ok = false;
    }
    const std::vector<std::vector<double>> binv_want{
        {-1.0 / 3.0, -2.0, 4.0 / 3.0}, {0.0, 1.0, 0.0}, {1.0 / 3.0, 1.0, -1.0 / 3.0}};
    for (std::size_t r = 0; r < 3; ++r)
      for (std::size_t cidx = 0; cidx < 3; ++cidx)
        if (std::abs(uce.b_inverse[r][cidx] - binv_want[r][cidx]) > 1e-14) eta_ok = false;
    pass = pass && eta_ok;
    detail += std::string(", slope coefficient ") + (eta_ok ? "exact" : "WRONG");
  }

  {  // four-edge value data taken from one waveform, plus an oscillatory g
    const Expr c = parse("sin(3*x - pi/4)*cos(4*y + pi/3)");
    const Expr g = parse("(1/3)*cos(4*pi*x)*sin(6*pi*y) - x^2*cos(2*pi*y)");
    ConstraintSet set(make_domain({{0.0, 1.0}, {0.0, 1.0}}));
    for (double p : {0.0, 1.0}) {
      add_constraint(set, 0, p, 0, c);
      add_constraint(set, 1, p, 0, c);
    }
    double worst = 0.0;
    for (const Expr& gg : {Expr::constant(0.0), g})
      worst = std::max(worst, boundary_residual(assemble(set, gg), rng, 100));

    RectSlices slices{substitute(c, "y", 0.0), substitute(c, "y", 1.0),
                      substitute(c, "x", 0.0), substitute(c, "x", 1.0)};
    worst = std::max(worst, expr_boundary_residual(dirichlet_rect_ce(slices, g, Rect{}), set,
                                                   rng, 100));
    pass = pass && worst <= kBoundaryTol;
    detail += ", waveform edges " + fmt(worst);
  }

  report(5, pass, "hand-derived reference surfaces are reproduced (" + detail + ")");
}

void criterion_6() {
  std::mt19937_64 rng(606);
  const auto& menu = pattern_menu();
  double worst_rel = 0.0;
  bool pass = true;

  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(trial % 2);
    const Domain dom = random_domain(rng, n);
    const Expr c = random_polynomial(rng, dom.var_names(), 4);
    ConstraintSet set(dom);
    while (set.total() == 0) {
      ConstraintSet candidate(dom);
      for (std::size_t k = 0; k < n; ++k) {
        const AxisPattern& pat = menu[rng() % menu.size()];
        for (const auto& [t, order] : pat.items)
          add_constraint(candidate, k, dom.axis(k).lo + t * (dom.axis(k).hi - dom.axis(k).lo),
                         order, c);
      }
      set = candidate;
    }
    Expr g = random_polynomial(rng, dom.var_names(), 3);
    if (trial % 2 == 0) {
      Expr wave = sin(Expr::variable(dom.axis(0).name));
      if (n == 2) wave = wave * cos(Expr::variable(dom.axis(1).name));
      g = g + Expr::constant(0.4) * wave;
    }
    const ConstrainedExpression ce = assemble(set, g);

    std::vector<std::vector<int>> deltas;
    if (n == 1)
      deltas = {{1}, {2}};
    else
      deltas = {{1, 0}, {0, 1}, {2, 0}, {0, 2}, {1, 1}};

    for (int s = 0; s < 50; ++s) {
      std::vector<double> pt(n);
      for (std::size_t j = 0; j < n; ++j) {
        const Axis& ax = dom.axis(j);
        pt[j] = ax.lo + (0.15 + 0.7 * uniform_sample(rng, 0.0, 1.0)) * (ax.hi - ax.lo);
      }
      const std::vector<int>& delta = deltas[static_cast<std::size_t>(s) % deltas.size()];

      // composed central stencils
      struct Node {
        std::vector<double> pt;
        double w;
      };
      std::vector<Node> nodes{{pt, 1.0}};
      int total_order = 0;
      for (int d : delta) total_order += d;
      for (std::size_t k = 0; k < n; ++k) {
        if (delta[k] == 0) continue;
        const double span = dom.axis(k).hi - dom.axis(k).lo;
        // wider steps once the stencil weights scale like h^-2, else the
        // cancellation noise dominates the comparison
        const double h = span * (total_order == 1 ? 1e-5 : 3e-4);
        std::vector<Node> next;
        for (const Node& node : nodes) {
          if (delta[k] == 1) {
            Node plus = node, minus = node;
            plus.pt[k] += h;
            plus.w /= 2.0 * h;
            minus.pt[k] -= h;
            minus.w /= -2.0 * h;
            next.push_back(plus);
            next.push_back(minus);
          } else {
            Node plus = node, mid = node, minus = node;
            plus.pt[k] += h;
            plus.w /= h * h;
            mid.w *= -2.0 / (h * h);
            minus.pt[k] -= h;
            minus.w /= h * h;
            next.push_back(plus);
            next.push_back(mid);
            next.push_back(minus);
          }
        }
        nodes = std::move(next);
      }
      double fd = 0.0;
      for (const Node& node : nodes) fd += node.w * ce.eval(node.pt);
      const double ad = ce.eval_partial(pt, delta);
      const double rel = std::abs(ad - fd) / std::max(1.0, std::abs(ad));
      worst_rel = std::max(worst_rel, rel);
      if (rel > kDerivativeRelTol) pass = false;
    }
  }
  report(6, pass,
         "analytic partial derivatives match central differences (worst relative gap " +
             fmt(worst_rel) + ")");
}

void criterion_7() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(777);
  const Expr truth = parse("sin(pi*x)*sin(pi*y)");
  ConstraintSet set(make_domain({{0.0, 1.0}, {0.0, 1.0}}));
  for (double p : {0.0, 1.0}) {
    add_constraint(set, 0, p, 0, Expr::constant(0.0), true);
    add_constraint(set, 1, p, 0, Expr::constant(0.0), true);
  }
  PdeProblem prob{set, {}, parse("-2*pi^2*sin(pi*x)*sin(pi*y)"), kPoissonDegree, {}};
  prob.op_terms.push_back({{2, 0}, Expr::constant(1.0)});
  prob.op_terms.push_back({{0, 2}, Expr::constant(1.0)});

  bool pass = true;
  std::string detail;
  double interior_err = 0.0;
  {
    const PdeSolution sol = solve(prob);
    const CompiledExpr truth_prog(truth, {"x", "y"});
    for (int i = 0; i < 21; ++i)
      for (int j = 0; j < 21; ++j) {
        const std::vector<double> pt{(i + 0.5) / 21.0, (j + 0.5) / 21.0};
        interior_err = std::max(interior_err, std::abs(sol.ce.eval(pt) - truth_prog.eval(pt)));
      }
    pass = pass && interior_err <= kPoissonInteriorTol &&
           sol.max_boundary_residual <= kBoundaryTol;
    detail += "interior error " + fmt(interior_err) + " at degree " +
              std::to_string(kPoissonDegree);
  }

  {  // boundary conditions hold for any coefficient vector, not just the optimum
    const std::vector<Expr> basis = make_basis(set.domain(), kPoissonDegree);
    double worst = 0.0;
    for (int trial = 0; trial < 3; ++trial) {
      Expr g = Expr::constant(0.0);
      for (const Expr& phi : basis)
        g = g + Expr::constant(uniform_sample(rng, -1.0, 1.0)) * phi;
      worst = std::max(worst, boundary_residual(assemble(set, g), rng, 30));
    }
    pass = pass && worst <= kBoundaryTol;
    detail += ", arbitrary-coefficient boundary " + fmt(worst);
  }

  {  // least squares over nested bases on one fixed grid cannot get worse
    double previous = -1.0;
    bool monotone = true;
    for (int degree : {4, 6, 8, 10}) {
      PdeProblem step = prob;
      step.degree = degree;
      step.colloc = {24, 24};
      const PdeSolution sol = solve(step);
      if (previous >= 0.0 && sol.colloc_residual_norm > previous + 1e-12) monotone = false;
      previous = sol.colloc_residual_norm;
    }
    pass = pass && monotone;
    detail += monotone ? ", residual monotone in degree" : ", residual NOT monotone";
  }

  const double elapsed = seconds_since(t0);
  pass = pass && elapsed < 30.0;
  report(7, pass, "poisson collocation demo meets its accuracy gates (" + detail + ", " +
                      fmt(elapsed) + " s)");
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void criterion_8() {
#ifndef CEXPR_CLI_PATH
  report(8, false, "cli binary path not wired into the build");
#else
  namespace fs = std::filesystem;
  const fs::path dir = "acceptance_scratch";
  fs::create_directories(dir);
  const std::string cfg = (dir / "surface.json").string();
  {
    std::ofstream out(cfg, std::ios::binary);
    out << R"json({
      "domain": [{"lo": 0, "hi": 1}, {"lo": 0, "hi": 1}],
      "constraints": [
        {"axis": 1, "point": 0, "expr": "x"},
        {"axis": 1, "point": 1, "expr": "1"}
      ],
      "free_function": "sin(3*x)*y^2"
    })json";
  }
  auto run = [&](const std::string& args) {
    const std::string cmd = "\"" CEXPR_CLI_PATH "\" " + args;
    const int rc = std::system(cmd.c_str());
    return rc != -1 && WIFEXITED(rc) && WEXITSTATUS(rc) == 0;
  };
  const std::string e1 = (dir / "eval1.csv").string(), e2 = (dir / "eval2.csv").string();
  const std::string v1 = (dir / "verify1.json").string(), v2 = (dir / "verify2.json").string();
  bool pass = run("eval --config " + cfg + " --grid 17 --out " + e1);
  pass = pass && run("eval --config " + cfg + " --grid 17 --out " + e2);
  pass = pass && run("verify --config " + cfg + " --seed 11 --samples 50 --out " + v1);
  pass = pass && run("verify --config " + cfg + " --seed 11 --samples 50 --out " + v2);
  if (pass) {
    const std::string a = slurp(e1), b = slurp(e2), c = slurp(v1), d = slurp(v2);
    pass = !a.empty() && a == b && !c.empty() && c == d;
  }
  report(8, pass, "eval and verify outputs are byte-identical across reruns");
#endif
}

}  // namespace

int main() {
  try {
    criterion_1();
  } catch (const std::exception& e) {
    report(1, false, std::string("threw: ") + e.what());
  }
  try {
    criterion_2();
  } catch (const std::exception& e) {
    report(2, false, std::string("threw: ") + e.what());
  }
  try {
    criterion_3();
  } catch (const std::exception& e) {
    report(3, false, std::string("threw: ") + e.what());
  }
  try {
    criterion_4();
  } catch (const std::exception& e) {
    report(4, false, std::string("threw: ") + e.what());
  }
  try {
    criterion_5();
  } catch (const std::exception& e) {
    report(5, false, std::string("threw: ") + e.what());
  }
  try {
    criterion_6();
  } catch (const std::exception& e) {
    report(6, false, std::string("threw: ") + e.what());
  }
  try {
    criterion_7();
  } catch (const std::exception& e) {
    report(7, false, std::string("threw: ") + e.what());
  }
  try {
    criterion_8();
  } catch (const std::exception& e) {
    report(8, false, std::string("threw: ") + e.what());
  }
  if (g_failures > 0) std::printf("%d of 8 criteria failed\n", g_failures);
  return g_failures;
}
