#include "disambig/minifn/interp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace disambig::minifn {

namespace {

struct Fault {
  ErrorKind kind;
  std::string message;
};

struct OutOfFuel {};

constexpr std::int64_t kMinInt = std::numeric_limits<std::int64_t>::min();

bool values_eq_ieee(const Value& a, const Value& b) {
  switch (a.data.index()) {
    case 0:
      return a.as_int() == b.as_int();
    case 1:
      return a.as_float() == b.as_float();
    case 2:
      return a.as_bool() == b.as_bool();
    case 3:
      return a.as_str() == b.as_str();
    default: {
      const auto& la = a.as_list().items;
      const auto& lb = b.as_list().items;
      if (la.size() != lb.size()) return false;
      for (std::size_t i = 0; i < la.size(); ++i) {
        if (!values_eq_ieee(la[i], lb[i])) return false;
      }
      return true;
    }
  }
}

class Machine {
 public:
  Machine(const FunctionDef& def, std::uint64_t fuel) : def_(def), fuel_(fuel) {}

  Outcome run(std::span<const Value> args) {
    frame_.assign(static_cast<std::size_t>(def_.slot_count), Value::Int(0));
    for (std::size_t i = 0; i < args.size(); ++i) frame_[i] = args[i];
    try {
      if (exec_block(def_.body)) return Outcome::of_value(std::move(ret_));
      // Unreachable for checked definitions; treat like a raise.
      return Outcome::of_error(ErrorKind::UserRaised, "fell off the end");
    } catch (const Fault& f) {
      return Outcome::of_error(f.kind, f.message);
    } catch (const OutOfFuel&) {
      return Outcome::exhausted();
    }
  }

 private:
  void tick() {
    if (fuel_ == 0) throw OutOfFuel{};
    --fuel_;
  }

  [[noreturn]] static void fault(ErrorKind kind, std::string message) {
    throw Fault{kind, std::move(message)};
  }

  // Returns true when a return statement executed.
  bool exec_block(const Block& b) {
    for (const auto& s : b) {
      if (exec(s)) return true;
    }
    return false;
  }

  bool exec(const Stmt& s) {
    tick();
    switch (s.kind) {
      case Stmt::Kind::Let:
      case Stmt::Kind::Assign:
        frame_[s.slot] = eval(s.expr);
        return false;
      case Stmt::Kind::If:
        if (eval(s.expr).as_bool()) return exec_block(s.body);
        return exec_block(s.else_body);
      case Stmt::Kind::While:
        while (eval(s.expr).as_bool()) {
          if (exec_block(s.body)) return true;
        }
        return false;
      case Stmt::Kind::For: {
        Value seq = eval(s.expr);
        if (seq.is_str()) {
          for (char c : seq.as_str()) {
            frame_[s.slot] = Value::Str(std::string(1, c));
            if (exec_block(s.body)) return true;
          }
          return false;
        }
        for (auto& item : seq.as_list().items) {
          frame_[s.slot] = std::move(item);
          if (exec_block(s.body)) return true;
        }
        return false;
      }
      case Stmt::Kind::Return:
        ret_ = eval(s.expr);
        return true;
      case Stmt::Kind::Raise:
        fault(ErrorKind::UserRaised, eval(s.expr).as_str());
    }
    return false;
  }

  // Evaluates e, avoiding a copy when it is a plain variable.
  const Value& eval_ref(const Expr& e, Value& scratch) {
    if (e.kind == Expr::Kind::Var) {
      tick();
      return frame_[e.slot];
    }
    scratch = eval(e);
    return scratch;
  }

  Value eval(const Expr& e) {
    tick();
    switch (e.kind) {
      case Expr::Kind::IntLit:
        return Value::Int(e.int_value);
      case Expr::Kind::FloatLit:
        return Value::Float(e.float_value);
      case Expr::Kind::BoolLit:
        return Value::Bool(e.bool_value);
      case Expr::Kind::StrLit:
        return Value::Str(e.text);
      case Expr::Kind::Var:
        return frame_[e.slot];
      case Expr::Kind::ListLit: {
        std::vector<Value> items;
        items.reserve(e.operands.size());
        for (const auto& op : e.operands) items.push_back(eval(op));
        return Value::List(e.type->elem(), std::move(items));
      }
      case Expr::Kind::Index:
        return index(e);
      case Expr::Kind::Call:
        return call(e);
      case Expr::Kind::Unary:
        return unary(e);
      case Expr::Kind::Binary:
        return binary(e);
    }
    fault(ErrorKind::UserRaised, "unsupported expression");
  }

  Value index(const Expr& e) {
    Value scratch;
    const Value& base = eval_ref(e.operands[0], scratch);
    std::int64_t i = eval(e.operands[1]).as_int();
    if (base.is_str()) {
      const auto& s = base.as_str();
      if (i < 0 || static_cast<std::uint64_t>(i) >= s.size()) {
        fault(ErrorKind::IndexOutOfRange,
              "string index " + std::to_string(i) + " out of range");
      }
      return Value::Str(std::string(1, s[static_cast<std::size_t>(i)]));
    }
    const auto& items = base.as_list().items;
    if (i < 0 || static_cast<std::uint64_t>(i) >= items.size()) {
      fault(ErrorKind::IndexOutOfRange,
            "list index " + std::to_string(i) + " out of range");
    }
    return items[static_cast<std::size_t>(i)];
  }

  Value call(const Expr& e) {
    Value scratch;
    const Value& arg = eval_ref(e.operands[0], scratch);
    switch (e.builtin) {
      case Builtin::Len:
        if (arg.is_str()) {
          return Value::Int(static_cast<std::int64_t>(arg.as_str().size()));
        }
        return Value::Int(static_cast<std::int64_t>(arg.as_list().items.size()));
      case Builtin::Abs:
        if (arg.is_int()) {
          if (arg.as_int() == kMinInt) fault(ErrorKind::Overflow, "abs overflow");
          return Value::Int(arg.as_int() < 0 ? -arg.as_int() : arg.as_int());
        }
        return Value::Float(std::fabs(arg.as_float()));
      case Builtin::IsNan:
        return Value::Bool(std::isnan(arg.as_float()));
    }
    fault(ErrorKind::UserRaised, "unsupported builtin");
  }

  Value unary(const Expr& e) {
    Value v = eval(e.operands[0]);
    if (e.unary_op == UnaryOp::Not) return Value::Bool(!v.as_bool());
    if (v.is_int()) {
      if (v.as_int() == kMinInt) fault(ErrorKind::Overflow, "negation overflow");
      return Value::Int(-v.as_int());
    }
    return Value::Float(-v.as_float());
  }

  static Value int_arith(BinaryOp op, std::int64_t a, std::int64_t b) {
    std::int64_t r = 0;
    switch (op) {
      case BinaryOp::Add:
        if (__builtin_add_overflow(a, b, &r)) fault(ErrorKind::Overflow, "integer overflow");
        return Value::Int(r);
      case BinaryOp::Sub:
        if (__builtin_sub_overflow(a, b, &r)) fault(ErrorKind::Overflow, "integer overflow");
        return Value::Int(r);
      case BinaryOp::Mul:
        if (__builtin_mul_overflow(a, b, &r)) fault(ErrorKind::Overflow, "integer overflow");
        return Value::Int(r);
      case BinaryOp::Div:
        if (b == 0) fault(ErrorKind::DivisionByZero, "integer division by zero");
        if (a == kMinInt && b == -1) fault(ErrorKind::Overflow, "integer overflow");
        return Value::Int(a / b);
      case BinaryOp::Mod:
        if (b == 0) fault(ErrorKind::DivisionByZero, "integer modulo by zero");
        if (b == -1) return Value::Int(0);
        return Value::Int(a % b);
      default:
        break;
    }
    fault(ErrorKind::UserRaised, "bad integer operator");
  }

  static Value float_arith(BinaryOp op, double a, double b) {
    switch (op) {
      case BinaryOp::Add:
        return Value::Float(a + b);
      case BinaryOp::Sub:
        return Value::Float(a - b);
      case BinaryOp::Mul:
        return Value::Float(a * b);
      case BinaryOp::Div:
        return Value::Float(a / b);
      case BinaryOp::Mod:
        return Value::Float(std::fmod(a, b));
      default:
        break;
    }
    fault(ErrorKind::UserRaised, "bad float operator");
  }

  template <typename Cmp>
  static bool order(const Value& a, const Value& b, Cmp cmp) {
    if (a.is_int()) return cmp(a.as_int(), b.as_int());
    if (a.is_float()) return cmp(a.as_float(), b.as_float());
    return cmp(a.as_str(), b.as_str());
  }

  Value binary(const Expr& e) {
    BinaryOp op = e.binary_op;
    if (op == BinaryOp::And) {
      if (!eval(e.operands[0]).as_bool()) return Value::Bool(false);
      return Value::Bool(eval(e.operands[1]).as_bool());
    }
    if (op == BinaryOp::Or) {
      if (eval(e.operands[0]).as_bool()) return Value::Bool(true);
      return Value::Bool(eval(e.operands[1]).as_bool());
    }
    Value a = eval(e.operands[0]);
    Value b = eval(e.operands[1]);
    switch (op) {
      case BinaryOp::Eq:
        return Value::Bool(values_eq_ieee(a, b));
      case BinaryOp::Ne:
        return Value::Bool(!values_eq_ieee(a, b));
      case BinaryOp::Lt:
        return Value::Bool(order(a, b, [](const auto& x, const auto& y) { return x < y; }));
      case BinaryOp::Le:
        return Value::Bool(order(a, b, [](const auto& x, const auto& y) { return x <= y; }));
      case BinaryOp::Gt:
        return Value::Bool(order(a, b, [](const auto& x, const auto& y) { return x > y; }));
      case BinaryOp::Ge:
        return Value::Bool(order(a, b, [](const auto& x, const auto& y) { return x >= y; }));
      default:
        break;
    }
    if (a.is_int()) return int_arith(op, a.as_int(), b.as_int());
    if (a.is_float()) return float_arith(op, a.as_float(), b.as_float());
    if (a.is_str()) return Value::Str(a.as_str() + b.as_str());
    // List concatenation.
    auto& items = a.as_list().items;
    auto& more = b.as_list().items;
    items.insert(items.end(), std::make_move_iterator(more.begin()),
                 std::make_move_iterator(more.end()));
    return a;
  }

  const FunctionDef& def_;
  std::uint64_t fuel_;
  std::vector<Value> frame_;
  Value ret_;
};

}  // namespace

Outcome eval_call(const FunctionDef& def, std::span<const Value> args,
                  std::uint64_t fuel) {
  if (!def.checked()) {
    throw std::invalid_argument("eval_call: '" + def.name +
                                "' has not been typechecked");
  }
  if (args.size() != def.params.size()) {
    throw std::invalid_argument("eval_call: '" + def.name + "' expects " +
                                std::to_string(def.params.size()) +
                                " arguments, got " + std::to_string(args.size()));
  }
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (!conforms(args[i], def.params[i].type)) {
      throw std::invalid_argument("eval_call: argument " + std::to_string(i) +
                                  " does not have type " +
                                  def.params[i].type.to_string());
    }
  }
  return Machine(def, fuel).run(args);
}

}  // namespace disambig::minifn
