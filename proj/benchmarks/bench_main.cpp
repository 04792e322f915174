#include <benchmark/benchmark.h>

#include <vector>

#include "cexpr/domain.hpp"
#include "cexpr/expr.hpp"
#include "cexpr/pde.hpp"
#include "cexpr/tensor.hpp"

using namespace cexpr;

namespace {

Expr sample_expr() {
  return parse("sin(3*x)*exp(-y^2) + x^2*y - cos(x*y)/(2 + x)");
}

ConstraintSet sample_set() {
  ConstraintSet set(make_domain({{0.0, 1.0}, {0.0, 1.0}}));
  const Expr c = parse("x^2*y + sin(x) - cos(2*y)");
  add_constraint(set, 0, 0.0, 0, c);
  add_constraint(set, 0, 1.0, 0, c);
  add_constraint(set, 0, 1.0, 1, c);
  add_constraint(set, 1, 0.0, 0, c);
  add_constraint(set, 1, 1.0, 0, c);
  return set;
}

void bm_tree_eval(benchmark::State& state) {
  const Expr e = sample_expr();
  const Env env{{"x", 0.37}, {"y", 0.81}};
  for (auto _ : state) benchmark::DoNotOptimize(eval(e, env));
}
BENCHMARK(bm_tree_eval);

void bm_compiled_eval(benchmark::State& state) {
  const CompiledExpr prog(sample_expr(), {"x", "y"});
  const std::vector<double> pt{0.37, 0.81};
  for (auto _ : state) benchmark::DoNotOptimize(prog.eval(pt));
}
BENCHMARK(bm_compiled_eval);

void bm_parse(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(parse("sin(3*x)*exp(-y^2) + x^2*y - cos(x*y)/(2 + x)"));
}
BENCHMARK(bm_parse);

void bm_diff(benchmark::State& state) {
  const Expr e = sample_expr();
  for (auto _ : state) benchmark::DoNotOptimize(diff(e, "x", 2));
}
BENCHMARK(bm_diff);

void bm_assemble(benchmark::State& state) {
  const ConstraintSet set = sample_set();
  const Expr g = parse("sin(x)*cos(y)");
  for (auto _ : state) benchmark::DoNotOptimize(assemble(set, g));
}
BENCHMARK(bm_assemble);

void bm_surface_eval(benchmark::State& state) {
  const ConstrainedExpression ce = assemble(sample_set(), parse("sin(x)*cos(y)"));
  std::vector<double> pt{0.0, 0.5};
  double x = 0.0;
  for (auto _ : state) {
    pt[0] = x;
    benchmark::DoNotOptimize(ce.eval(pt));
    x += 9.5367431640625e-07;  // walk the domain so nothing caches the answer
    if (x > 1.0) x = 0.0;
  }
}
BENCHMARK(bm_surface_eval);

void bm_surface_grid(benchmark::State& state) {
  const ConstrainedExpression ce = assemble(sample_set(), parse("sin(x)*cos(y)"));
  const std::vector<int> delta{1, 0};
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        acc += ce.eval_partial({i / double(n - 1), j / double(n - 1)}, delta);
    benchmark::DoNotOptimize(acc);
  }
}
BENCHMARK(bm_surface_grid)->Arg(16)->Arg(64);

void bm_poisson_solve(benchmark::State& state) {
  ConstraintSet set(make_domain({{0.0, 1.0}, {0.0, 1.0}}));
  for (double p : {0.0, 1.0}) {
    add_constraint(set, 0, p, 0, Expr::constant(0.0), true);
    add_constraint(set, 1, p, 0, Expr::constant(0.0), true);
  }
  PdeProblem prob{std::move(set), {}, Expr::constant(-1.0),
                  static_cast<int>(state.range(0)), {}};
  prob.op_terms.push_back({{2, 0}, Expr::constant(1.0)});
  prob.op_terms.push_back({{0, 2}, Expr::constant(1.0)});
  for (auto _ : state) benchmark::DoNotOptimize(solve(prob));
}
BENCHMARK(bm_poisson_solve)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
