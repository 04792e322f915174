#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cexpr/errors.hpp"

namespace cexpr {

enum class NodeKind : std::uint8_t {
  Constant,
  Variable,
  // unary
  Neg,
  Sin,
  Cos,
  Tan,
  Exp,
  Ln,
  Sqrt,
  Abs,
  Sgn,      // derivative of Abs; evaluating at the kink is a domain error
  // binary
  Add,
  Sub,
  Mul,
  Div,
  Pow,
  Mod,      // floored modulo, modulus must fold to a nonzero constant
  ModGuard, // derivative factor of Mod; errors exactly on a discontinuity
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  NodeKind kind;
  double value = 0.0;  // Constant payload
  std::string name;    // Variable payload
  NodePtr a, b;
};

/// Name/value bindings for evaluation. Order is irrelevant; lookups are
/// linear (the library never evaluates with more than a handful of names).
using Env = std::vector<std::pair<std::string, double>>;

/// Immutable symbolic expression. Copies are cheap (shared subtrees).
/// Construction folds constants and applies local identities (x+0, 1*x,
/// x^1, ...), which keeps derivative trees compact; the folding may drop
/// subterms that would have raised evaluation errors (0 * ln(x) is 0).
class Expr {
public:
  Expr() : node_(constant_node(0.0)) {}

  static Expr constant(double v);
  static Expr variable(std::string name);

  static Expr make_unary(NodeKind kind, Expr arg);
  static Expr make_binary(NodeKind kind, Expr lhs, Expr rhs);

  NodeKind kind() const noexcept { return node_->kind; }
  const Node& node() const noexcept { return *node_; }
  const NodePtr& ptr() const noexcept { return node_; }

  bool is_constant() const noexcept { return node_->kind == NodeKind::Constant; }
  double constant_value() const { return node_->value; }

  /// Printed form; parse(str()) evaluates identically to *this.
  std::string str() const;

private:
  explicit Expr(NodePtr n) : node_(std::move(n)) {}
  static NodePtr constant_node(double v);

  NodePtr node_;

  friend Expr wrap_node(NodePtr);
};

Expr wrap_node(NodePtr n);

Expr operator+(Expr a, Expr b);
Expr operator-(Expr a, Expr b);
Expr operator*(Expr a, Expr b);
Expr operator/(Expr a, Expr b);
Expr operator-(Expr a);

Expr sin(Expr a);
Expr cos(Expr a);
Expr tan(Expr a);
Expr exp(Expr a);
Expr ln(Expr a);
Expr sqrt(Expr a);
Expr abs(Expr a);
Expr pow(Expr base, Expr exponent);
Expr pow(Expr base, double exponent);
/// Floored modulo: mod(a, b) = a - b*floor(a/b), result in [0, b) for b > 0.
/// The modulus must fold to a nonzero constant.
Expr mod(Expr a, Expr modulus);

/// Grammar:
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := '-' factor | base ('^' factor)?
///   base   := number | ident | ident '(' expr (',' expr)? ')' | '(' expr ')'
/// '^' is right-associative and binds tighter than unary minus, so -x^2
/// means -(x^2). Functions: sin cos tan exp ln sqrt abs mod (mod takes two
/// arguments), plus sgn and mod_guard which only differentiation produces.
/// pi and e are built-in constants; every other identifier is a variable.
Expr parse(std::string_view text);

std::string to_string(const Expr& e);

/// Tree-walk evaluation. Throws EvalError on unbound variables and domain
/// errors. Use CompiledExpr for tight loops.
double eval(const Expr& e, const Env& env);

/// Partial derivative of the given order (symbolic). order >= 0.
Expr diff(const Expr& e, const std::string& var, int order = 1);

/// Replace a variable by a constant and refold.
Expr substitute(const Expr& e, const std::string& var, double value);

/// True if the variable occurs in the tree.
bool depends_on(const Expr& e, const std::string& var);

/// Collects the distinct variable names in the tree (sorted).
std::vector<std::string> variables(const Expr& e);

/// Expression flattened to a postfix program over a fixed variable order.
/// Shared subtrees are evaluated once. Compilation fails on variables not
/// present in the order; evaluation is noexcept of allocation but throws
/// the same domain errors as eval().
class CompiledExpr {
public:
  CompiledExpr() = default;
  CompiledExpr(const Expr& e, const std::vector<std::string>& var_order);

  double eval(const double* coords, std::size_t n) const;
  double eval(const std::vector<double>& coords) const {
    return eval(coords.data(), coords.size());
  }

  std::size_t size() const noexcept { return ops_.size(); }

private:
  struct Op {
    std::uint8_t code;   // NodeKind value, or kPushLocal/kStoreLocal
    std::int32_t a = -1; // variable slot or local slot
    double value = 0.0;  // Constant payload
  };
  enum : std::uint8_t { kPushLocal = 250, kStoreLocal = 251 };

  std::vector<Op> ops_;
  std::size_t stack_need_ = 0;
  std::size_t locals_need_ = 0;
  std::size_t nvars_ = 0;
};

} // namespace cexpr
