#include <cmath>
#include <unordered_map>
#include <vector>

#include "cexpr/expr.hpp"

namespace cexpr {

namespace {

double floored_mod(double a, double b) {
  double r = a - b * std::floor(a / b);
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

bool is_unary_code(std::uint8_t code) {
  switch (static_cast<NodeKind>(code)) {
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

// occurrence count per shared node; nodes hit twice or more get a local slot
void count_uses(const Node* n, std::unordered_map<const Node*, int>& uses) {
  if (!n) return;
  int& c = uses[n];
  if (++c > 1) return;
  if (n->kind == NodeKind::Constant || n->kind == NodeKind::Variable) return;
  count_uses(n->a.get(), uses);
  count_uses(n->b.get(), uses);
}

} // namespace

CompiledExpr::CompiledExpr(const Expr& e, const std::vector<std::string>& var_order) {
  nvars_ = var_order.size();
  std::unordered_map<const Node*, int> uses;
  count_uses(e.ptr().get(), uses);

  std::unordered_map<const Node*, std::int32_t> local_of;
  std::int32_t next_local = 0;

  // iterative postorder emit to keep deep (left-associative) chains off the
  // call stack
  struct Frame {
    const Node* n;
    int stage;
  };
  std::vector<Frame> work;
  work.push_back({e.ptr().get(), 0});
  while (!work.empty()) {
    auto [n, stage] = work.back();
    work.pop_back();
    if (stage == 0) {
      if (n->kind == NodeKind::Constant) {
        ops_.push_back({static_cast<std::uint8_t>(NodeKind::Constant), -1, n->value});
        continue;
      }
      if (n->kind == NodeKind::Variable) {
        std::int32_t slot = -1;
        for (std::size_t i = 0; i < var_order.size(); ++i)
          if (var_order[i] == n->name) { slot = static_cast<std::int32_t>(i); break; }
        if (slot < 0) throw EvalError("unbound variable '" + n->name + "'");
        ops_.push_back({static_cast<std::uint8_t>(NodeKind::Variable), slot, 0.0});
        continue;
      }
      auto it = local_of.find(n);
      if (it != local_of.end()) {
        ops_.push_back({kPushLocal, it->second, 0.0});
        continue;
      }
      work.push_back({n, 1});
      if (n->b) work.push_back({n->b.get(), 0});
      if (n->a) work.push_back({n->a.get(), 0});
    } else {
      ops_.push_back({static_cast<std::uint8_t>(n->kind), -1, 0.0});
      if (uses[n] > 1) {
        const std::int32_t slot = next_local++;
        local_of.emplace(n, slot);
        ops_.push_back({kStoreLocal, slot, 0.0});
      }
    }
  }
  locals_need_ = static_cast<std::size_t>(next_local);

  // stack requirement by simulation
  std::size_t sp = 0, max_sp = 0;
  for (const Op& op : ops_) {
    switch (op.code) {
      case static_cast<std::uint8_t>(NodeKind::Constant):
      case static_cast<std::uint8_t>(NodeKind::Variable):
      case kPushLocal:
        max_sp = std::max(max_sp, ++sp);
        break;
      case kStoreLocal:
        break;
      default:
        if (!is_unary_code(op.code)) --sp;
        break;
    }
  }
  stack_need_ = max_sp;
}

double CompiledExpr::eval(const double* coords, std::size_t n) const {
  if (n < nvars_) throw EvalError("not enough coordinates supplied");
  double small_stack[64];
  std::vector<double> big_stack;
  double* st = small_stack;
  if (stack_need_ > 64) {
    big_stack.resize(stack_need_);
    st = big_stack.data();
  }
  double small_locals[32];
  std::vector<double> big_locals;
  double* loc = small_locals;
  if (locals_need_ > 32) {
    big_locals.resize(locals_need_);
    loc = big_locals.data();
  }

  std::size_t sp = 0;
  for (const Op& op : ops_) {
    switch (op.code) {
      case static_cast<std::uint8_t>(NodeKind::Constant): st[sp++] = op.value; break;
      case static_cast<std::uint8_t>(NodeKind::Variable): st[sp++] = coords[op.a]; break;
      case kPushLocal: st[sp++] = loc[op.a]; break;
      case kStoreLocal: loc[op.a] = st[sp - 1]; break;
      case static_cast<std::uint8_t>(NodeKind::Neg): st[sp - 1] = -st[sp - 1]; break;
      case static_cast<std::uint8_t>(NodeKind::Sin): st[sp - 1] = std::sin(st[sp - 1]); break;
      case static_cast<std::uint8_t>(NodeKind::Cos): st[sp - 1] = std::cos(st[sp - 1]); break;
      case static_cast<std::uint8_t>(NodeKind::Tan): st[sp - 1] = std::tan(st[sp - 1]); break;
      case static_cast<std::uint8_t>(NodeKind::Exp): st[sp - 1] = std::exp(st[sp - 1]); break;
      case static_cast<std::uint8_t>(NodeKind::Ln):
        if (st[sp - 1] <= 0.0) throw EvalError("ln of a non-positive value");
        st[sp - 1] = std::log(st[sp - 1]);
        break;
      case static_cast<std::uint8_t>(NodeKind::Sqrt):
        if (st[sp - 1] < 0.0) throw EvalError("sqrt of a negative value");
        st[sp - 1] = std::sqrt(st[sp - 1]);
        break;
      case static_cast<std::uint8_t>(NodeKind::Abs): st[sp - 1] = std::abs(st[sp - 1]); break;
      case static_cast<std::uint8_t>(NodeKind::Sgn):
        if (st[sp - 1] == 0.0) throw EvalError("derivative of abs evaluated at its kink");
        st[sp - 1] = st[sp - 1] > 0.0 ? 1.0 : -1.0;
        break;
      case static_cast<std::uint8_t>(NodeKind::Add): --sp; st[sp - 1] += st[sp]; break;
      case static_cast<std::uint8_t>(NodeKind::Sub): --sp; st[sp - 1] -= st[sp]; break;
      case static_cast<std::uint8_t>(NodeKind::Mul): --sp; st[sp - 1] *= st[sp]; break;
      case static_cast<std::uint8_t>(NodeKind::Div):
        --sp;
        if (st[sp] == 0.0) throw EvalError("division by zero");
        st[sp - 1] /= st[sp];
        break;
      case static_cast<std::uint8_t>(NodeKind::Pow): {
        --sp;
        const double b = st[sp], a = st[sp - 1];
        double ip;
        if (std::modf(b, &ip) == 0.0 && std::abs(b) < 9.0e15) {
          st[sp - 1] = integer_pow(a, static_cast<long long>(ip));
        } else {
          if (a < 0.0) throw EvalError("negative base with non-integer exponent");
          if (a == 0.0 && b < 0.0) throw EvalError("zero raised to a negative power");
          st[sp - 1] = std::pow(a, b);
        }
        break;
      }
      case static_cast<std::uint8_t>(NodeKind::Mod):
        --sp;
        if (st[sp] == 0.0) throw EvalError("mod with zero modulus");
        st[sp - 1] = floored_mod(st[sp - 1], st[sp]);
        break;
      case static_cast<std::uint8_t>(NodeKind::ModGuard):
        --sp;
        if (st[sp] == 0.0) throw EvalError("mod with zero modulus");
        if (floored_mod(st[sp - 1], st[sp]) == 0.0)
          throw EvalError("derivative of mod evaluated at a discontinuity");
        st[sp - 1] = 1.0;
        break;
      default:
        throw EvalError("corrupt program");
    }
  }
  return st[sp - 1];
}

} // namespace cexpr
