#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cexpr/bivariate.hpp"
#include "cexpr/config.hpp"
#include "cexpr/errors.hpp"
#include "cexpr/pde.hpp"
#include "cexpr/tensor.hpp"
#include "cexpr/verify.hpp"

namespace {

using namespace cexpr;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// CSV and report destination: a file when --out is given, stdout otherwise.
class Sink {
public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw ConfigError(path + ": cannot open for writing");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
  std::ofstream file_;
};

std::vector<std::size_t> grid_sizes(const std::vector<std::size_t>& given, std::size_t dim) {
  std::vector<std::size_t> sizes;
  if (given.empty())
    sizes.assign(dim, 101);
  else if (given.size() == 1)
    sizes.assign(dim, given[0]);
  else if (given.size() == dim)
    sizes = given;
  else
    throw ConfigError("--grid needs a single resolution or one per axis");
  for (std::size_t n : sizes)
    if (n < 2) throw ConfigError("grid resolutions must be at least 2");
  return sizes;
}

double grid_node(const Axis& axis, std::size_t i, std::size_t n) {
  if (i + 1 == n) return axis.hi;
  return axis.lo + (axis.hi - axis.lo) * static_cast<double>(i) / static_cast<double>(n - 1);
}

// First axis fastest, so consecutive rows sweep the first coordinate.
template <typename Fn>
void for_each_grid_point(const Domain& dom, const std::vector<std::size_t>& sizes, Fn&& fn) {
  std::vector<std::size_t> idx(dom.dim(), 0);
  std::vector<double> pt(dom.dim());
  for (;;) {
    for (std::size_t k = 0; k < dom.dim(); ++k) pt[k] = grid_node(dom.axis(k), idx[k], sizes[k]);
    fn(pt);
    std::size_t k = 0;
    while (k < dom.dim()) {
      if (++idx[k] < sizes[k]) break;
      idx[k] = 0;
      ++k;
    }
    if (k == dom.dim()) return;
  }
}

std::vector<int> parse_partial(const std::string& spec, std::size_t dim) {
  std::vector<int> delta;
  std::size_t pos = 0;
  while (pos <= spec.size()) {
    const std::size_t comma = spec.find(',', pos);
    const std::string part = spec.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    try {
      std::size_t used = 0;
      const int v = std::stoi(part, &used);
      if (used != part.size()) throw std::invalid_argument(part);
      delta.push_back(v);
    } catch (const std::exception&) {
      throw ConfigError("--partial \"" + spec + "\": expected comma-separated derivative orders");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (delta.size() != dim)
    throw ConfigError("--partial \"" + spec + "\": need one order per axis");
  int total = 0;
  for (int v : delta) {
    if (v < 0) throw ConfigError("--partial orders must be nonnegative");
    total += v;
  }
  if (total == 0) throw ConfigError("--partial must request at least one derivative");
  if (total > 4) throw ConfigError("--partial orders summed must not exceed 4");
  return delta;
}

std::string partial_name(const std::vector<int>& delta, const Domain& dom) {
  std::string name = "f_";
  for (std::size_t k = 0; k < delta.size(); ++k)
    for (int i = 0; i < delta[k]; ++i) name += dom.axis(k).name;
  return name;
}

int run_eval(const LoadedConfig& cfg, const std::vector<std::size_t>& grid,
             const std::vector<std::string>& partial_specs, const std::string& out_path) {
  const ConstrainedExpression ce = assemble(cfg.constraints, cfg.free_function);
  const Domain& dom = cfg.domain;
  const std::vector<std::size_t> sizes = grid_sizes(grid, dom.dim());
  std::vector<std::vector<int>> partials;
  for (const std::string& spec : partial_specs) partials.push_back(parse_partial(spec, dom.dim()));

  Sink sink(out_path);
  std::ostream& os = sink.stream();
  for (std::size_t k = 0; k < dom.dim(); ++k) os << dom.axis(k).name << ",";
  os << "f";
  for (const auto& delta : partials) os << "," << partial_name(delta, dom);
  os << "\n";
  for_each_grid_point(dom, sizes, [&](const std::vector<double>& pt) {
    for (double c : pt) os << num(c) << ",";
    os << num(ce.eval(pt));
    for (const auto& delta : partials) os << "," << num(ce.eval_partial(pt, delta));
    os << "\n";
  });
  return 0;
}

int run_verify(const LoadedConfig& cfg, std::size_t samples, std::uint64_t seed, double tol,
               const std::string& out_path) {
  const ConstrainedExpression ce = assemble(cfg.constraints, cfg.free_function);
  const double boundary_tol = tol > 0.0 ? tol : cfg.tolerances.boundary;
  const VerifyReport report =
      verify_boundary(ce, samples, seed, boundary_tol, cfg.tolerances.compatibility);
  Sink sink(out_path);
  sink.stream() << report_to_json(report);
  return report.ok ? 0 : 1;
}

int run_solve_pde(const LoadedConfig& cfg, const std::vector<std::size_t>& grid,
                  const std::string& out_path) {
  if (!cfg.pde) throw ConfigError("the configuration has no \"pde\" section");
  const PdeSolution sol = solve(*cfg.pde);
  const Domain& dom = cfg.domain;
  const std::vector<std::size_t> sizes = grid_sizes(grid, 2);

  std::cerr << "basis functions: " << sol.basis_count << ", rank " << sol.rank << "\n"
            << "residual 2-norm at collocation nodes: " << num(sol.colloc_residual_norm) << "\n"
            << "residual 2-norm on verification grid: " << num(sol.verify_residual_norm) << "\n"
            << "max residual on verification grid: " << num(sol.verify_max_residual) << "\n"
            << "max boundary residual: " << num(sol.max_boundary_residual) << "\n";

  const std::vector<std::string> vars = dom.var_names();
  std::vector<CompiledExpr> coeff_progs;
  for (const PdeTerm& t : cfg.pde->op_terms) coeff_progs.emplace_back(t.coeff, vars);
  CompiledExpr source_prog(cfg.pde->source, vars);

  Sink sink(out_path);
  std::ostream& os = sink.stream();
  os << dom.axis(0).name << "," << dom.axis(1).name << ",f,residual\n";
  for_each_grid_point(dom, sizes, [&](const std::vector<double>& pt) {
    double r = -source_prog.eval(pt);
    for (std::size_t ti = 0; ti < coeff_progs.size(); ++ti) {
      const double cv = coeff_progs[ti].eval(pt);
      if (cv != 0.0) r += cv * sol.ce.eval_partial(pt, cfg.pde->op_terms[ti].delta);
    }
    os << num(pt[0]) << "," << num(pt[1]) << "," << num(sol.ce.eval(pt)) << "," << num(r) << "\n";
  });
  return 0;
}

int run_table_sweep(std::uint64_t seed, double tol, const std::string& out_path) {
  Sink sink(out_path);
  std::ostream& os = sink.stream();
  const std::vector<ComboFlags>& rows = combo_rows();
  bool all_ok = true;
  std::size_t passed = 0;

  for (std::size_t i = 0; i < rows.size(); ++i) {
    const ComboFlags& flags = rows[i];
    std::mt19937_64 rng(seed ^ (0x9E3779B97F4A7C15ULL * (i + 1)));
    const Expr c = random_polynomial(rng, {"x", "y"}, 3);
    // the free functions carry a transcendental tail: a purely polynomial g is
    // reproduced exactly by the Hermite-style rows, which would pin the
    // unconstrained edges and make the freedom column meaningless
    const Expr g1 = random_polynomial(rng, {"x", "y"}, 3) + parse("sin(2.3*x + 1.7*y)");
    const Expr g2 = random_polynomial(rng, {"x", "y"}, 3) + parse("cos(1.9*x - 2.1*y)");
    const ConstrainedExpression ce1 = combo_ce(flags, c, g1);
    const ConstrainedExpression ce2 = combo_ce(flags, c, g2);

    double max_resid = 0.0;
    double min_freedom = std::numeric_limits<double>::infinity();
    std::string names;
    for (std::size_t bit = 0; bit < 8; ++bit) {
      const EdgeConditionInfo& cond = edge_conditions()[bit];
      const bool flagged = (flags.mask() >> bit) & 1u;
      const std::size_t other = 1 - cond.axis;
      const std::string& other_var = other == 0 ? "x" : "y";
      std::vector<int> delta(2, 0);
      delta[cond.axis] = cond.order;
      const Expr slice =
          flagged ? bc_operator(c, cond.axis == 0 ? "x" : "y", cond.point, cond.order) : Expr();
      double freedom = 0.0;
      for (int s = 0; s < 33; ++s) {
        std::vector<double> pt(2);
        pt[cond.axis] = cond.point;
        pt[other] = static_cast<double>(s) / 32.0;
        if (flagged) {
          const double want = eval(slice, {{other_var, pt[other]}});
          max_resid = std::max(max_resid, std::abs(ce1.eval_partial(pt, delta) - want));
          max_resid = std::max(max_resid, std::abs(ce2.eval_partial(pt, delta) - want));
        } else {
          freedom = std::max(freedom,
                             std::abs(ce1.eval_partial(pt, delta) - ce2.eval_partial(pt, delta)));
        }
      }
      if (flagged) {
        if (!names.empty()) names += ",";
        names += cond.name;
      } else {
        min_freedom = std::min(min_freedom, freedom);
      }
    }

    const bool has_free = std::isfinite(min_freedom);
    const bool ok = max_resid <= tol && (!has_free || min_freedom > 1e-3);
    if (ok) ++passed;
    all_ok = all_ok && ok;
    char line[160];
    std::snprintf(line, sizeof line, "row %2zu  residual %10.3e  freedom %s  %s  %s",
                  i + 1, max_resid, has_free ? num(min_freedom).substr(0, 10).c_str() : "n/a",
                  ok ? "PASS" : "FAIL", names.c_str());
    os << line << "\n";
  }
  os << passed << "/" << rows.size() << " combinations pass\n";
  return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"constrained surfaces: build, evaluate, verify, and solve boundary value problems"};
  app.require_subcommand(1);

  std::string config_path, out_path;
  std::vector<std::size_t> grid;
  std::vector<std::string> partial_specs;
  std::uint64_t seed = 1;
  double tol = 0.0;
  double sweep_tol = 1e-10;
  std::size_t samples = 100;

  CLI::App* cmd_eval = app.add_subcommand("eval", "evaluate the surface on a grid and write CSV");
  cmd_eval->add_option("--config", config_path, "problem description (JSON)")->required();
  cmd_eval->add_option("--out", out_path, "output file (default stdout)");
  cmd_eval->add_option("--grid", grid, "grid resolution per axis")->delimiter(',');
  cmd_eval->add_option("--partial", partial_specs,
                       "extra derivative column, orders per axis (e.g. 0,1); repeatable");

  CLI::App* cmd_verify =
      app.add_subcommand("verify", "sample every boundary condition and write a JSON report");
  cmd_verify->add_option("--config", config_path, "problem description (JSON)")->required();
  cmd_verify->add_option("--out", out_path, "output file (default stdout)");
  cmd_verify->add_option("--seed", seed, "sampling seed");
  cmd_verify->add_option("--tol", tol, "boundary tolerance override");
  cmd_verify->add_option("--samples", samples, "sample points per condition");

  CLI::App* cmd_pde =
      app.add_subcommand("solve-pde", "solve the configured boundary value problem, CSV surface");
  cmd_pde->add_option("--config", config_path, "problem description (JSON)")->required();
  cmd_pde->add_option("--out", out_path, "output file (default stdout)");
  cmd_pde->add_option("--grid", grid, "export grid resolution per axis")->delimiter(',');

  CLI::App* cmd_sweep = app.add_subcommand(
      "table-sweep", "run every tabulated edge-condition combination against random data");
  cmd_sweep->add_option("--seed", seed, "data seed");
  cmd_sweep->add_option("--tol", sweep_tol, "residual tolerance");
  cmd_sweep->add_option("--out", out_path, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // help and version exit 0; every real usage mistake lands on 2 like the
    // config errors below
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (!out_path.empty() && out_path == config_path)
      throw ConfigError("--out must differ from --config");
    if (cmd_eval->parsed())
      return run_eval(load_config(config_path), grid, partial_specs, out_path);
    if (cmd_verify->parsed())
      return run_verify(load_config(config_path), samples, seed, tol, out_path);
    if (cmd_pde->parsed()) return run_solve_pde(load_config(config_path), grid, out_path);
    if (cmd_sweep->parsed()) return run_table_sweep(seed, sweep_tol, out_path);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  }
  return 0;
}
