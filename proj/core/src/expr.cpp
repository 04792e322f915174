#include "cexpr/expr.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <unordered_map>
#include <unordered_set>

namespace cexpr {

namespace {

bool is_unary(NodeKind k) {
  switch (k) {
    case NodeKind::Neg:
    case NodeKind::Sin:
    case NodeKind::Cos:
    case NodeKind::Tan:
    case NodeKind::Exp:
    case NodeKind::Ln:
    case NodeKind::Sqrt:
    case NodeKind::Abs:
    case NodeKind::Sgn:
      return true;
    default:
      return false;
  }
}

double floored_mod(double a, double b) {
  double r = a - b * std::floor(a / b);
  // floor rounding can land exactly on b; normalize to the canonical rep
  if (r == b) r = 0.0;
  return r;
}

double integer_pow(double base, long long e) {
  if (e < 0) {
    if (base == 0.0) throw EvalError("zero raised to a negative power");
    return 1.0 / integer_pow(base, -e);
  }
  double acc = 1.0, cur = base;
  while (e > 0) {
    if (e & 1) acc *= cur;
    cur *= cur;
    e >>= 1;
  }
  return acc;
}

double apply_unary(NodeKind k, double x) {
  switch (k) {
    case NodeKind::Neg: return -x;
    case NodeKind::Sin: return std::sin(x);
    case NodeKind::Cos: return std::cos(x);
    case NodeKind::Tan: return std::tan(x);
    case NodeKind::Exp: return std::exp(x);
    case NodeKind::Ln:
      if (x <= 0.0) throw EvalError("ln of a non-positive value");
      return std::log(x);
    case NodeKind::Sqrt:
      if (x < 0.0) throw EvalError("sqrt of a negative value");
      return std::sqrt(x);
    case NodeKind::Abs: return std::abs(x);
    case NodeKind::Sgn:
      if (x == 0.0) throw EvalError("derivative of abs evaluated at its kink");
      return x > 0.0 ? 1.0 : -1.0;
    default: throw EvalError("not a unary operation");
  }
}

double apply_binary(NodeKind k, double x, double y) {
  switch (k) {
    case NodeKind::Add: return x + y;
    case NodeKind::Sub: return x - y;
    case NodeKind::Mul: return x * y;
    case NodeKind::Div:
      if (y == 0.0) throw EvalError("division by zero");
      return x / y;
    case NodeKind::Pow: {
      double ip;
      if (std::modf(y, &ip) == 0.0 && std::abs(y) < 9.0e15)
        return integer_pow(x, static_cast<long long>(ip));
      if (x < 0.0) throw EvalError("negative base with non-integer exponent");
      if (x == 0.0 && y < 0.0) throw EvalError("zero raised to a negative power");
      return std::pow(x, y);
    }
    case NodeKind::Mod:
      if (y == 0.0) throw EvalError("mod with zero modulus");
      return floored_mod(x, y);
    case NodeKind::ModGuard:
      if (y == 0.0) throw EvalError("mod with zero modulus");
      if (floored_mod(x, y) == 0.0)
        throw EvalError("derivative of mod evaluated at a discontinuity");
      return 1.0;
    default: throw EvalError("not a binary operation");
  }
}

} // namespace

NodePtr Expr::constant_node(double v) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Constant;
  n->value = v;
  return n;
}

Expr Expr::constant(double v) { return Expr(constant_node(v)); }

Expr Expr::variable(std::string name) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::Variable;
  n->name = std::move(name);
  return Expr(std::move(n));
}

Expr wrap_node(NodePtr n) { return Expr(std::move(n)); }

Expr Expr::make_unary(NodeKind kind, Expr arg) {
  if (arg.is_constant()) {
    try {
      return constant(apply_unary(kind, arg.constant_value()));
    } catch (const EvalError&) {
      // keep the node; the error belongs to evaluation time
    }
  }
  if (kind == NodeKind::Neg) {
    if (arg.kind() == NodeKind::Neg) return Expr(arg.node().a);
  }
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->a = arg.node_;
  return Expr(std::move(n));
}

Expr Expr::make_binary(NodeKind kind, Expr lhs, Expr rhs) {
  const bool lc = lhs.is_constant(), rc = rhs.is_constant();
  if (lc && rc) {
    try {
      return constant(apply_binary(kind, lhs.constant_value(), rhs.constant_value()));
    } catch (const EvalError&) {
    }
  }
  switch (kind) {
    case NodeKind::Add:
      if (lc && lhs.constant_value() == 0.0) return rhs;
      if (rc && rhs.constant_value() == 0.0) return lhs;
      break;
    case NodeKind::Sub:
      if (rc && rhs.constant_value() == 0.0) return lhs;
      if (lc && lhs.constant_value() == 0.0) return make_unary(NodeKind::Neg, rhs);
      break;
    case NodeKind::Mul:
      if ((lc && lhs.constant_value() == 0.0) || (rc && rhs.constant_value() == 0.0))
        return constant(0.0);
      if (lc && lhs.constant_value() == 1.0) return rhs;
      if (rc && rhs.constant_value() == 1.0) return lhs;
      if (lc && lhs.constant_value() == -1.0) return make_unary(NodeKind::Neg, rhs);
      if (rc && rhs.constant_value() == -1.0) return make_unary(NodeKind::Neg, lhs);
      // pull nested constant factors together: c1*(c2*e) -> (c1*c2)*e
      if (lc && rhs.kind() == NodeKind::Mul && rhs.node().a->kind == NodeKind::Constant)
        return make_binary(NodeKind::Mul,
                           constant(lhs.constant_value() * rhs.node().a->value),
                           Expr(rhs.node().b));
      break;
    case NodeKind::Div:
      if (rc && rhs.constant_value() == 1.0) return lhs;
      if (lc && lhs.constant_value() == 0.0 && !rc) return constant(0.0);
      break;
    case NodeKind::Pow:
      if (rc && rhs.constant_value() == 1.0) return lhs;
      if (rc && rhs.constant_value() == 0.0) return constant(1.0);
      break;
    case NodeKind::Mod:
      if (!rc) throw InvalidSpec("mod modulus must fold to a constant");
      if (rhs.constant_value() == 0.0) throw InvalidSpec("mod modulus must be nonzero");
      break;
    default:
      break;
  }
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->a = lhs.node_;
  n->b = rhs.node_;
  return Expr(std::move(n));
}

Expr operator+(Expr a, Expr b) { return Expr::make_binary(NodeKind::Add, std::move(a), std::move(b)); }
Expr operator-(Expr a, Expr b) { return Expr::make_binary(NodeKind::Sub, std::move(a), std::move(b)); }
Expr operator*(Expr a, Expr b) { return Expr::make_binary(NodeKind::Mul, std::move(a), std::move(b)); }
Expr operator/(Expr a, Expr b) { return Expr::make_binary(NodeKind::Div, std::move(a), std::move(b)); }
Expr operator-(Expr a) { return Expr::make_unary(NodeKind::Neg, std::move(a)); }

Expr sin(Expr a) { return Expr::make_unary(NodeKind::Sin, std::move(a)); }
Expr cos(Expr a) { return Expr::make_unary(NodeKind::Cos, std::move(a)); }
Expr tan(Expr a) { return Expr::make_unary(NodeKind::Tan, std::move(a)); }
Expr exp(Expr a) { return Expr::make_unary(NodeKind::Exp, std::move(a)); }
Expr ln(Expr a) { return Expr::make_unary(NodeKind::Ln, std::move(a)); }
Expr sqrt(Expr a) { return Expr::make_unary(NodeKind::Sqrt, std::move(a)); }
Expr abs(Expr a) { return Expr::make_unary(NodeKind::Abs, std::move(a)); }
Expr pow(Expr base, Expr exponent) {
  return Expr::make_binary(NodeKind::Pow, std::move(base), std::move(exponent));
}
Expr pow(Expr base, double exponent) {
  return pow(std::move(base), Expr::constant(exponent));
}
Expr mod(Expr a, Expr modulus) {
  return Expr::make_binary(NodeKind::Mod, std::move(a), std::move(modulus));
}

double eval(const Expr& e, const Env& env) {
  const Node& n = e.node();
  switch (n.kind) {
    case NodeKind::Constant: return n.value;
    case NodeKind::Variable: {
      for (const auto& [name, v] : env)
        if (name == n.name) return v;
      throw EvalError("unbound variable '" + n.name + "'");
    }
    default:
      if (is_unary(n.kind)) return apply_unary(n.kind, eval(wrap_node(n.a), env));
      return apply_binary(n.kind, eval(wrap_node(n.a), env), eval(wrap_node(n.b), env));
  }
}

namespace {

class Differ {
public:
  explicit Differ(std::string var) : var_(std::move(var)) {}

  Expr d(const Expr& e) {
    auto it = cache_.find(e.ptr().get());
    if (it != cache_.end()) return it->second;
    Expr r = derive(e);
    cache_.emplace(e.ptr().get(), r);
    return r;
  }

private:
  Expr derive(const Expr& e) {
    const Node& n = e.node();
    const Expr u = n.a ? wrap_node(n.a) : Expr();
    const Expr v = n.b ? wrap_node(n.b) : Expr();
    switch (n.kind) {
      case NodeKind::Constant: return Expr::constant(0.0);
      case NodeKind::Variable: return Expr::constant(n.name == var_ ? 1.0 : 0.0);
      case NodeKind::Neg: return -d(u);
      case NodeKind::Sin: return cos(u) * d(u);
      case NodeKind::Cos: return -(sin(u) * d(u));
      case NodeKind::Tan:
        return (Expr::constant(1.0) + tan(u) * tan(u)) * d(u);
      case NodeKind::Exp: return exp(u) * d(u);
      case NodeKind::Ln: return d(u) / u;
      case NodeKind::Sqrt: return d(u) / (Expr::constant(2.0) * sqrt(u));
      case NodeKind::Abs:
        return Expr::make_unary(NodeKind::Sgn, u) * d(u);
      case NodeKind::Sgn: return Expr::constant(0.0); // flat away from the kink
      case NodeKind::Add: return d(u) + d(v);
      case NodeKind::Sub: return d(u) - d(v);
      case NodeKind::Mul: return d(u) * v + u * d(v);
      case NodeKind::Div: return (d(u) * v - u * d(v)) / (v * v);
      case NodeKind::Pow: {
        if (v.is_constant()) {
          const double k = v.constant_value();
          return Expr::constant(k) * pow(u, k - 1.0) * d(u);
        }
        // u^v with symbolic exponent; valid where u > 0
        return pow(u, v) * (d(v) * ln(u) + v * d(u) / u);
      }
      case NodeKind::Mod:
        // slope 1 in the argument away from discontinuities; the guard
        // raises a domain error exactly on one
        return Expr::make_binary(NodeKind::ModGuard, u, v) * d(u);
      case NodeKind::ModGuard: return Expr::constant(0.0);
    }
    throw EvalError("unhandled node in diff");
  }

  std::string var_;
  std::unordered_map<const Node*, Expr> cache_;
};

class Substituter {
public:
  Substituter(std::string var, double value) : var_(std::move(var)), value_(value) {}

  Expr run(const Expr& e) {
    auto it = cache_.find(e.ptr().get());
    if (it != cache_.end()) return it->second;
    Expr r = apply(e);
    cache_.emplace(e.ptr().get(), r);
    return r;
  }

private:
  Expr apply(const Expr& e) {
    const Node& n = e.node();
    switch (n.kind) {
      case NodeKind::Constant: return e;
      case NodeKind::Variable:
        return n.name == var_ ? Expr::constant(value_) : e;
      default:
        if (is_unary(n.kind)) {
          Expr a = run(wrap_node(n.a));
          if (a.ptr() == n.a) return e;
          return Expr::make_unary(n.kind, std::move(a));
        }
        Expr a = run(wrap_node(n.a));
        Expr b = run(wrap_node(n.b));
        if (a.ptr() == n.a && b.ptr() == n.b) return e;
        return Expr::make_binary(n.kind, std::move(a), std::move(b));
    }
  }

  std::string var_;
  double value_;
  std::unordered_map<const Node*, Expr> cache_;
};

} // namespace

Expr diff(const Expr& e, const std::string& var, int order) {
  if (order < 0) throw InvalidSpec("derivative order must be non-negative");
  Expr cur = e;
  for (int i = 0; i < order; ++i) {
    Differ df(var);
    cur = df.d(cur);
  }
  return cur;
}

Expr substitute(const Expr& e, const std::string& var, double value) {
  Substituter s(var, value);
  return s.run(e);
}

bool depends_on(const Expr& e, const std::string& var) {
  const Node& n = e.node();
  switch (n.kind) {
    case NodeKind::Constant: return false;
    case NodeKind::Variable: return n.name == var;
    default:
      if (depends_on(wrap_node(n.a), var)) return true;
      return n.b && depends_on(wrap_node(n.b), var);
  }
}

namespace {

void collect_vars(const Node* n, std::unordered_set<const Node*>& seen,
                  std::vector<std::string>& out) {
  if (!n || !seen.insert(n).second) return;
  if (n->kind == NodeKind::Variable) {
    if (std::find(out.begin(), out.end(), n->name) == out.end()) out.push_back(n->name);
    return;
  }
  collect_vars(n->a.get(), seen, out);
  collect_vars(n->b.get(), seen, out);
}

} // namespace

std::vector<std::string> variables(const Expr& e) {
  std::unordered_set<const Node*> seen;
  std::vector<std::string> out;
  collect_vars(e.ptr().get(), seen, out);
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// printing

namespace {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// precedence levels: 1 add/sub, 2 mul/div, 3 unary minus, 4 pow, 5 atom
int precedence(const Node& n) {
  switch (n.kind) {
    case NodeKind::Add:
    case NodeKind::Sub: return 1;
    case NodeKind::Mul:
    case NodeKind::Div: return 2;
    case NodeKind::Neg: return 3;
    case NodeKind::Pow: return 4;
    case NodeKind::Constant: return n.value < 0.0 ? 3 : 5;
    default: return 5;
  }
}

const char* function_name(NodeKind k) {
  switch (k) {
    case NodeKind::Sin: return "sin";
    case NodeKind::Cos: return "cos";
    case NodeKind::Tan: return "tan";
    case NodeKind::Exp: return "exp";
    case NodeKind::Ln: return "ln";
    case NodeKind::Sqrt: return "sqrt";
    case NodeKind::Abs: return "abs";
    case NodeKind::Sgn: return "sgn";
    default: return nullptr;
  }
}

void print_node(const Node& n, std::string& out);

void print_child(const Node& c, int min_prec, std::string& out) {
  if (precedence(c) < min_prec) {
    out += '(';
    print_node(c, out);
    out += ')';
  } else {
    print_node(c, out);
  }
}

void print_node(const Node& n, std::string& out) {
  switch (n.kind) {
    case NodeKind::Constant:
      out += format_number(n.value);
      return;
    case NodeKind::Variable:
      out += n.name;
      return;
    case NodeKind::Neg:
      out += '-';
      print_child(*n.a, 3, out);
      return;
    case NodeKind::Add:
      print_child(*n.a, 1, out);
      out += " + ";
      print_child(*n.b, 2, out);
      return;
    case NodeKind::Sub:
      print_child(*n.a, 1, out);
      out += " - ";
      print_child(*n.b, 2, out);
      return;
    case NodeKind::Mul:
      print_child(*n.a, 2, out);
      out += "*";
      print_child(*n.b, 3, out);
      return;
    case NodeKind::Div:
      print_child(*n.a, 2, out);
      out += "/";
      print_child(*n.b, 3, out);
      return;
    case NodeKind::Pow:
      print_child(*n.a, 5, out);
      out += "^";
      print_child(*n.b, 4, out);
      return;
    case NodeKind::Mod:
      out += "mod(";
      print_node(*n.a, out);
      out += ", ";
      print_node(*n.b, out);
      out += ')';
      return;
    case NodeKind::ModGuard:
      out += "mod_guard(";
      print_node(*n.a, out);
      out += ", ";
      print_node(*n.b, out);
      out += ')';
      return;
    default: {
      const char* f = function_name(n.kind);
      out += f ? f : "?";
      out += '(';
      print_node(*n.a, out);
      out += ')';
      return;
    }
  }
}

} // namespace

std::string Expr::str() const {
  std::string out;
  print_node(*node_, out);
  return out;
}

std::string to_string(const Expr& e) { return e.str(); }

} // namespace cexpr
