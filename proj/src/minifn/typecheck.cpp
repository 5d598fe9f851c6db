#include "disambig/minifn/typecheck.hpp"

#include <utility>
#include <vector>

namespace disambig::minifn {

namespace {

std::string format_loc_message(SourceLoc loc, const std::string& message) {
  return std::to_string(loc.line) + ":" + std::to_string(loc.column) + ": " +
         message;
}

}  // namespace

TypeError::TypeError(SourceLoc loc, const std::string& message)
    : std::runtime_error(format_loc_message(loc, message)), loc_(loc) {}

namespace {

struct Binding {
  std::string name;
  int slot;
  Type type;
};

bool is_empty_list_lit(const Expr& e) {
  return e.kind == Expr::Kind::ListLit && e.operands.empty();
}

bool is_true_literal(const Expr& e) {
  return e.kind == Expr::Kind::BoolLit && e.bool_value;
}

class Checker {
 public:
  explicit Checker(FunctionDef& def) : def_(def) {}

  void run() {
    push_scope();
    for (const auto& p : def_.params) declare(p.name, p.type, def_.loc);
    block(def_.body, /*new_scope=*/false);
    if (!terminates(def_.body)) {
      throw TypeError(def_.loc, "function '" + def_.name +
                                    "' can reach the end without returning");
    }
    pop_scope();
    def_.slot_count = next_slot_;
  }

 private:
  void push_scope() { scopes_.emplace_back(); }
  void pop_scope() { scopes_.pop_back(); }

  int declare(const std::string& name, const Type& type, SourceLoc loc) {
    for (const auto& b : scopes_.back()) {
      if (b.name == name) {
        throw TypeError(loc, "'" + name + "' is already defined in this scope");
      }
    }
    int slot = next_slot_++;
    scopes_.back().push_back(Binding{name, slot, type});
    return slot;
  }

  const Binding* lookup(const std::string& name) const {
    for (auto scope = scopes_.rbegin(); scope != scopes_.rend(); ++scope) {
      for (auto b = scope->rbegin(); b != scope->rend(); ++b) {
        if (b->name == name) return &*b;
      }
    }
    return nullptr;
  }

  static void require(const Type& expected, const Type& actual, SourceLoc loc) {
    if (!(expected == actual)) {
      throw TypeError(loc, "expected " + expected.to_string() + ", found " +
                               actual.to_string());
    }
  }

  static bool terminates(const Block& b) {
    for (const auto& s : b) {
      switch (s.kind) {
        case Stmt::Kind::Return:
        case Stmt::Kind::Raise:
          return true;
        case Stmt::Kind::If:
          if (!s.else_body.empty() && terminates(s.body) &&
              terminates(s.else_body)) {
            return true;
          }
          break;
        case Stmt::Kind::While:
          if (is_true_literal(s.expr)) return true;
          break;
        default:
          break;
      }
    }
    return false;
  }

  void block(Block& b, bool new_scope) {
    if (new_scope) push_scope();
    for (auto& s : b) stmt(s);
    if (new_scope) pop_scope();
  }

  void stmt(Stmt& s) {
    switch (s.kind) {
      case Stmt::Kind::Let: {
        Type t = s.annotation ? expr(s.expr, &*s.annotation) : expr(s.expr, nullptr);
        if (s.annotation) require(*s.annotation, t, s.expr.loc);
        s.slot = declare(s.name, t, s.loc);
        return;
      }
      case Stmt::Kind::Assign: {
        const Binding* b = lookup(s.name);
        if (!b) throw TypeError(s.loc, "assignment to undefined '" + s.name + "'");
        Type target = b->type;
        s.slot = b->slot;
        require(target, expr(s.expr, &target), s.expr.loc);
        return;
      }
      case Stmt::Kind::If:
        require(Type::Bool(), expr(s.expr, nullptr), s.expr.loc);
        block(s.body, true);
        block(s.else_body, true);
        return;
      case Stmt::Kind::While:
        require(Type::Bool(), expr(s.expr, nullptr), s.expr.loc);
        block(s.body, true);
        return;
      case Stmt::Kind::For: {
        Type it = expr(s.expr, nullptr);
        Type elem;
        if (it.is_list()) {
          elem = it.elem();
        } else if (it.kind() == TypeKind::Str) {
          elem = Type::Str();
        } else {
          throw TypeError(s.expr.loc,
                          "cannot iterate over " + it.to_string());
        }
        push_scope();
        s.slot = declare(s.name, elem, s.loc);
        block(s.body, false);
        pop_scope();
        return;
      }
      case Stmt::Kind::Return: {
        Type rt = def_.return_type;
        require(rt, expr(s.expr, &rt), s.expr.loc);
        return;
      }
      case Stmt::Kind::Raise: {
        Type str = Type::Str();
        require(str, expr(s.expr, &str), s.expr.loc);
        return;
      }
    }
  }

  // Checks both operands of a symmetric operator, letting a known side give
  // the other its type when one side is a bare empty list literal.
  std::pair<Type, Type> operands(Expr& e) {
    Expr& lhs = e.operands[0];
    Expr& rhs = e.operands[1];
    if (is_empty_list_lit(lhs) && !is_empty_list_lit(rhs)) {
      Type r = expr(rhs, nullptr);
      return {expr(lhs, &r), r};
    }
    Type l = expr(lhs, nullptr);
    return {l, expr(rhs, &l)};
  }

  Type expr(Expr& e, const Type* expected) {
    Type t = infer(e, expected);
    e.type = t;
    return t;
  }

  Type infer(Expr& e, const Type* expected) {
    switch (e.kind) {
      case Expr::Kind::IntLit:
        return Type::Int();
      case Expr::Kind::FloatLit:
        return Type::Float();
      case Expr::Kind::BoolLit:
        return Type::Bool();
      case Expr::Kind::StrLit:
        return Type::Str();
      case Expr::Kind::Var: {
        const Binding* b = lookup(e.text);
        if (!b) throw TypeError(e.loc, "undefined variable '" + e.text + "'");
        e.slot = b->slot;
        return b->type;
      }
      case Expr::Kind::ListLit:
        return list_literal(e, expected);
      case Expr::Kind::Index: {
        Type base = expr(e.operands[0], nullptr);
        require(Type::Int(), expr(e.operands[1], nullptr), e.operands[1].loc);
        if (base.is_list()) return base.elem();
        if (base.kind() == TypeKind::Str) return Type::Str();
        throw TypeError(e.loc, "cannot index into " + base.to_string());
      }
      case Expr::Kind::Call: {
        Type arg = expr(e.operands[0], nullptr);
        switch (e.builtin) {
          case Builtin::Len:
            if (arg.is_list() || arg.kind() == TypeKind::Str) return Type::Int();
            throw TypeError(e.loc, "len() needs a list or Str, found " +
                                       arg.to_string());
          case Builtin::Abs:
            if (arg.is_numeric()) return arg;
            throw TypeError(e.loc, "abs() needs Int or Float, found " +
                                       arg.to_string());
          case Builtin::IsNan:
            require(Type::Float(), arg, e.operands[0].loc);
            return Type::Bool();
        }
        break;
      }
      case Expr::Kind::Unary: {
        Type t = expr(e.operands[0], nullptr);
        if (e.unary_op == UnaryOp::Not) {
          require(Type::Bool(), t, e.operands[0].loc);
          return t;
        }
        if (!t.is_numeric()) {
          throw TypeError(e.loc, "cannot negate " + t.to_string());
        }
        return t;
      }
      case Expr::Kind::Binary:
        return binary(e);
    }
    throw TypeError(e.loc, "unsupported expression");
  }

  Type list_literal(Expr& e, const Type* expected) {
    if (expected && expected->is_list()) {
      Type elem = expected->elem();
      for (auto& item : e.operands) require(elem, expr(item, &elem), item.loc);
      return *expected;
    }
    // Infer from the first element that carries its own type.
    std::size_t pivot = e.operands.size();
    for (std::size_t i = 0; i < e.operands.size(); ++i) {
      if (!is_empty_list_lit(e.operands[i])) {
        pivot = i;
        break;
      }
    }
    if (pivot == e.operands.size()) {
      throw TypeError(e.loc,
                      "cannot infer the element type of this list literal; "
                      "add a type annotation");
    }
    Type elem = expr(e.operands[pivot], nullptr);
    for (std::size_t i = 0; i < e.operands.size(); ++i) {
      if (i == pivot) continue;
      require(elem, expr(e.operands[i], &elem), e.operands[i].loc);
    }
    return Type::List(elem);
  }

  Type binary(Expr& e) {
    switch (e.binary_op) {
      case BinaryOp::And:
      case BinaryOp::Or:
        require(Type::Bool(), expr(e.operands[0], nullptr), e.operands[0].loc);
        require(Type::Bool(), expr(e.operands[1], nullptr), e.operands[1].loc);
        return Type::Bool();
      case BinaryOp::Eq:
      case BinaryOp::Ne: {
        auto [l, r] = operands(e);
        require(l, r, e.operands[1].loc);
        return Type::Bool();
      }
      case BinaryOp::Lt:
      case BinaryOp::Le:
      case BinaryOp::Gt:
      case BinaryOp::Ge: {
        auto [l, r] = operands(e);
        require(l, r, e.operands[1].loc);
        if (!l.is_numeric() && l.kind() != TypeKind::Str) {
          throw TypeError(e.loc, "cannot order values of type " + l.to_string());
        }
        return Type::Bool();
      }
      case BinaryOp::Add: {
        auto [l, r] = operands(e);
        require(l, r, e.operands[1].loc);
        if (l.kind() == TypeKind::Bool) {
          throw TypeError(e.loc, "cannot add Bool values");
        }
        return l;
      }
      case BinaryOp::Sub:
      case BinaryOp::Mul:
      case BinaryOp::Div:
      case BinaryOp::Mod: {
        auto [l, r] = operands(e);
        require(l, r, e.operands[1].loc);
        if (!l.is_numeric()) {
          throw TypeError(e.loc, "operator '" +
                                     std::string(to_string(e.binary_op)) +
                                     "' needs Int or Float, found " +
                                     l.to_string());
        }
        return l;
      }
    }
    throw TypeError(e.loc, "unsupported operator");
  }

  FunctionDef& def_;
  std::vector<std::vector<Binding>> scopes_;
  int next_slot_ = 0;
};

}  // namespace

void typecheck(FunctionDef& def) {
  def.slot_count = -1;
  Checker(def).run();
}

bool typechecks(FunctionDef& def) {
  try {
    typecheck(def);
    return true;
  } catch (const TypeError&) {
    return false;
  }
}

}  // namespace disambig::minifn
