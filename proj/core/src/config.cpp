#include "cexpr/config.hpp"

#include <fstream>
#include <sstream>
#include <utility>
#include <vector>

#include "cexpr/errors.hpp"
#include "json.hpp"

namespace cexpr {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& origin, const std::string& what) {
  throw ConfigError(origin + ": " + what);
}

void require_keys(const std::string& origin, const json& obj, const std::string& where,
                  std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed)
      if (item.key() == key) {
        known = true;
        break;
      }
    if (!known) fail(origin, where + ": unknown key \"" + item.key() + "\"");
  }
}

double get_number(const std::string& origin, const json& obj, const std::string& where,
                  const char* key) {
  if (!obj.contains(key)) fail(origin, where + ": missing \"" + std::string(key) + "\"");
  if (!obj[key].is_number()) fail(origin, where + ": \"" + std::string(key) + "\" must be a number");
  return obj[key].get<double>();
}

Expr get_expr(const std::string& origin, const json& obj, const std::string& where,
              const char* key, const char* fallback) {
  std::string text;
  if (!obj.contains(key)) {
    if (fallback == nullptr) fail(origin, where + ": missing \"" + std::string(key) + "\"");
    text = fallback;
  } else if (obj[key].is_string()) {
    text = obj[key].get<std::string>();
  } else {
    fail(origin, where + ": \"" + std::string(key) + "\" must be an expression string");
  }
  try {
    return parse(text);
  } catch (const ParseError& err) {
    fail(origin, where + ": \"" + text + "\": " + err.what());
  }
}

Domain parse_domain(const std::string& origin, const json& root) {
  if (!root.contains("domain")) fail(origin, "missing \"domain\" section");
  const json& dom = root["domain"];
  if (!dom.is_array() || dom.empty())
    fail(origin, "\"domain\" must be a non-empty list of axes");
  static const char* kDefault3[] = {"x", "y", "z"};
  std::vector<Axis> axes;
  for (std::size_t i = 0; i < dom.size(); ++i) {
    const std::string where = "domain[" + std::to_string(i) + "]";
    const json& a = dom[i];
    if (!a.is_object()) fail(origin, where + ": each axis must be an object");
    require_keys(origin, a, where, {"name", "lo", "hi"});
    Axis axis;
    axis.lo = get_number(origin, a, where, "lo");
    axis.hi = get_number(origin, a, where, "hi");
    if (a.contains("name")) {
      if (!a["name"].is_string()) fail(origin, where + ": \"name\" must be a string");
      axis.name = a["name"].get<std::string>();
    } else {
      axis.name = dom.size() <= 3 ? kDefault3[i] : "x" + std::to_string(i + 1);
    }
    axes.push_back(std::move(axis));
  }
  try {
    return Domain::make(std::move(axes));
  } catch (const InvalidSpec& err) {
    fail(origin, std::string("domain: ") + err.what());
  }
}

std::size_t parse_axis_ref(const std::string& origin, const Domain& domain, const json& v,
                           const std::string& where) {
  if (v.is_string()) {
    try {
      return domain.axis_index(v.get<std::string>());
    } catch (const InvalidSpec& err) {
      fail(origin, where + ": " + err.what());
    }
  }
  if (v.is_number_integer()) {
    const auto k = v.get<long long>();
    if (k < 0 || static_cast<std::size_t>(k) >= domain.dim())
      fail(origin, where + ": axis index out of range");
    return static_cast<std::size_t>(k);
  }
  fail(origin, where + ": \"axis\" must be an axis name or index");
}

ConstraintSet parse_constraints(const std::string& origin, const Domain& domain,
                                const json& root) {
  ConstraintSet set(domain);
  if (!root.contains("constraints")) return set;
  const json& list = root["constraints"];
  if (!list.is_array()) fail(origin, "\"constraints\" must be a list");
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string where = "constraints[" + std::to_string(i) + "]";
    const json& c = list[i];
    if (!c.is_object()) fail(origin, where + ": each constraint must be an object");
    require_keys(origin, c, where, {"axis", "point", "order", "expr", "pre_sliced"});
    if (!c.contains("axis")) fail(origin, where + ": missing \"axis\"");
    const std::size_t axis = parse_axis_ref(origin, domain, c["axis"], where);
    const double point = get_number(origin, c, where, "point");
    int order = 0;
    if (c.contains("order")) {
      if (!c["order"].is_number_integer()) fail(origin, where + ": \"order\" must be an integer");
      order = c["order"].get<int>();
    }
    const Expr rhs = get_expr(origin, c, where, "expr", nullptr);
    bool pre_sliced = true;  // config expressions are the boundary data itself
    if (c.contains("pre_sliced")) {
      if (!c["pre_sliced"].is_boolean()) fail(origin, where + ": \"pre_sliced\" must be a boolean");
      pre_sliced = c["pre_sliced"].get<bool>();
    }
    try {
      add_constraint(set, axis, point, order, rhs, pre_sliced);
    } catch (const InvalidSpec& err) {
      fail(origin, where + ": " + err.what());
    }
  }
  return set;
}

std::optional<PdeProblem> parse_pde(const std::string& origin, const ConstraintSet& constraints,
                                    const json& root) {
  if (!root.contains("pde")) return std::nullopt;
  const json& p = root["pde"];
  if (!p.is_object()) fail(origin, "\"pde\" must be an object");
  require_keys(origin, p, "pde", {"operator", "source", "degree", "collocation"});

  if (!p.contains("operator") || !p["operator"].is_array() || p["operator"].empty())
    fail(origin, "pde: \"operator\" must be a non-empty list of terms");
  std::vector<PdeTerm> terms;
  for (std::size_t i = 0; i < p["operator"].size(); ++i) {
    const std::string where = "pde.operator[" + std::to_string(i) + "]";
    const json& t = p["operator"][i];
    if (!t.is_object()) fail(origin, where + ": each term must be an object");
    require_keys(origin, t, where, {"delta", "coeff"});
    if (!t.contains("delta") || !t["delta"].is_array())
      fail(origin, where + ": \"delta\" must be a list of derivative orders");
    PdeTerm term;
    for (const json& d : t["delta"]) {
      if (!d.is_number_integer()) fail(origin, where + ": \"delta\" entries must be integers");
      term.delta.push_back(d.get<int>());
    }
    term.coeff = get_expr(origin, t, where, "coeff", "1");
    terms.push_back(std::move(term));
  }

  PdeProblem problem{constraints, std::move(terms),
                     get_expr(origin, p, "pde", "source", "0"), 4, {}};
  if (p.contains("degree")) {
    if (!p["degree"].is_number_integer()) fail(origin, "pde: \"degree\" must be an integer");
    problem.degree = p["degree"].get<int>();
  }
  if (p.contains("collocation")) {
    const json& g = p["collocation"];
    if (!g.is_array() || g.size() != 2 || !g[0].is_number_integer() || !g[1].is_number_integer() ||
        g[0].get<long long>() < 0 || g[1].get<long long>() < 0)
      fail(origin, "pde: \"collocation\" must be a pair of node counts");
    problem.colloc.nx = g[0].get<std::size_t>();
    problem.colloc.ny = g[1].get<std::size_t>();
  }
  return problem;
}

ToleranceConfig parse_tolerances(const std::string& origin, const json& root) {
  ToleranceConfig tol;
  if (!root.contains("tolerances")) return tol;
  const json& t = root["tolerances"];
  if (!t.is_object()) fail(origin, "\"tolerances\" must be an object");
  require_keys(origin, t, "tolerances", {"boundary", "compatibility"});
  if (t.contains("boundary")) tol.boundary = get_number(origin, t, "tolerances", "boundary");
  if (t.contains("compatibility"))
    tol.compatibility = get_number(origin, t, "tolerances", "compatibility");
  if (!(tol.boundary > 0.0) || !(tol.compatibility > 0.0))
    fail(origin, "tolerances must be positive");
  return tol;
}

}  // namespace

LoadedConfig parse_config(const std::string& text, const std::string& origin) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& err) {
    // The library message already carries line and column.
    throw ConfigError(origin + ": " + err.what());
  }
  if (!root.is_object()) fail(origin, "the top level must be an object");
  require_keys(origin, root, "top level",
               {"domain", "constraints", "free_function", "pde", "tolerances"});

  Domain domain = parse_domain(origin, root);
  ConstraintSet constraints = parse_constraints(origin, domain, root);
  Expr g = get_expr(origin, root, "top level", "free_function", "0");
  std::optional<PdeProblem> pde = parse_pde(origin, constraints, root);
  ToleranceConfig tolerances = parse_tolerances(origin, root);
  return LoadedConfig{std::move(domain), std::move(constraints), std::move(g), std::move(pde),
                      tolerances};
}

LoadedConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

}  // namespace cexpr
