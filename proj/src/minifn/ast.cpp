#include "disambig/minifn/ast.hpp"

#include <cstring>

namespace disambig::minifn {

std::string_view to_string(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add:
      return "+";
    case BinaryOp::Sub:
      return "-";
    case BinaryOp::Mul:
      return "*";
    case BinaryOp::Div:
      return "/";
    case BinaryOp::Mod:
      return "%";
    case BinaryOp::Eq:
      return "==";
    case BinaryOp::Ne:
      return "!=";
    case BinaryOp::Lt:
      return "<";
    case BinaryOp::Le:
      return "<=";
    case BinaryOp::Gt:
      return ">";
    case BinaryOp::Ge:
      return ">=";
    case BinaryOp::And:
      return "and";
    case BinaryOp::Or:
      return "or";
  }
  return "?";
}

std::string_view to_string(UnaryOp op) {
  return op == UnaryOp::Neg ? "-" : "not";
}

std::string_view to_string(Builtin b) {
  switch (b) {
    case Builtin::Len:
      return "len";
    case Builtin::Abs:
      return "abs";
    case Builtin::IsNan:
      return "is_nan";
  }
  return "?";
}

Expr Expr::int_lit(std::int64_t v, SourceLoc loc) {
  Expr e;
  e.kind = Kind::IntLit;
  e.int_value = v;
  e.loc = loc;
  return e;
}

Expr Expr::float_lit(double v, SourceLoc loc) {
  Expr e;
  e.kind = Kind::FloatLit;
  e.float_value = Value::Float(v).as_float();
  e.loc = loc;
  return e;
}

Expr Expr::bool_lit(bool v, SourceLoc loc) {
  Expr e;
  e.kind = Kind::BoolLit;
  e.bool_value = v;
  e.loc = loc;
  return e;
}

Expr Expr::str_lit(std::string v, SourceLoc loc) {
  Expr e;
  e.kind = Kind::StrLit;
  e.text = std::move(v);
  e.loc = loc;
  return e;
}

Expr Expr::var(std::string name, SourceLoc loc) {
  Expr e;
  e.kind = Kind::Var;
  e.text = std::move(name);
  e.loc = loc;
  return e;
}

Expr Expr::binary(BinaryOp op, Expr lhs, Expr rhs, SourceLoc loc) {
  Expr e;
  e.kind = Kind::Binary;
  e.binary_op = op;
  e.loc = loc;
  e.operands.push_back(std::move(lhs));
  e.operands.push_back(std::move(rhs));
  return e;
}

Expr Expr::unary(UnaryOp op, Expr operand, SourceLoc loc) {
  Expr e;
  e.kind = Kind::Unary;
  e.unary_op = op;
  e.loc = loc;
  e.operands.push_back(std::move(operand));
  return e;
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Expr::Kind::IntLit:
      return a.int_value == b.int_value;
    case Expr::Kind::FloatLit:
      return std::memcmp(&a.float_value, &b.float_value, sizeof(double)) == 0;
    case Expr::Kind::BoolLit:
      return a.bool_value == b.bool_value;
    case Expr::Kind::StrLit:
    case Expr::Kind::Var:
      return a.text == b.text;
    case Expr::Kind::Binary:
      if (a.binary_op != b.binary_op) return false;
      break;
    case Expr::Kind::Unary:
      if (a.unary_op != b.unary_op) return false;
      break;
    case Expr::Kind::Call:
      if (a.builtin != b.builtin) return false;
      break;
    case Expr::Kind::ListLit:
    case Expr::Kind::Index:
      break;
  }
  return a.operands == b.operands;
}

bool operator==(const Stmt& a, const Stmt& b) {
  if (a.kind != b.kind || a.name != b.name) return false;
  if (a.annotation.has_value() != b.annotation.has_value()) return false;
  if (a.annotation && !(*a.annotation == *b.annotation)) return false;
  return a.expr == b.expr && a.body == b.body && a.else_body == b.else_body;
}

bool operator==(const FunctionDef& a, const FunctionDef& b) {
  if (a.name != b.name || a.params.size() != b.params.size()) return false;
  for (std::size_t i = 0; i < a.params.size(); ++i) {
    if (a.params[i].name != b.params[i].name ||
        !(a.params[i].type == b.params[i].type)) {
      return false;
    }
  }
  return a.return_type == b.return_type && a.body == b.body;
}

namespace {

struct Walker {
  const std::function<bool(NodeRef, int)>& visit;
  int next = 0;

  bool expr(Expr& e) {
    if (!visit(NodeRef{nullptr, &e}, next++)) return false;
    for (auto& op : e.operands) {
      if (!expr(op)) return false;
    }
    return true;
  }

  bool block(Block& b) {
    for (auto& s : b) {
      if (!stmt(s)) return false;
    }
    return true;
  }

  bool stmt(Stmt& s) {
    if (!visit(NodeRef{&s, nullptr}, next++)) return false;
    if (!expr(s.expr)) return false;
    return block(s.body) && block(s.else_body);
  }
};

}  // namespace

void walk_preorder(FunctionDef& def,
                   const std::function<bool(NodeRef, int)>& visit) {
  Walker w{visit};
  w.block(def.body);
}

int count_nodes(const FunctionDef& def) {
  FunctionDef copy = def;
  int n = 0;
  walk_preorder(copy, [&](NodeRef, int) {
    ++n;
    return true;
  });
  return n;
}

}  // namespace disambig::minifn
