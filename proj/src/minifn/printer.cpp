#include "disambig/minifn/printer.hpp"

#include <cmath>

namespace disambig::minifn {

namespace {

enum Prec {
  kOr = 1,
  kAnd,
  kNot,
  kCompare,
  kAdd,
  kMul,
  kNeg,
  kPostfix,
  kAtom,
};

int binary_prec(BinaryOp op) {
  switch (op) {
    case BinaryOp::Or:
      return kOr;
    case BinaryOp::And:
      return kAnd;
    case BinaryOp::Eq:
    case BinaryOp::Ne:
    case BinaryOp::Lt:
    case BinaryOp::Le:
    case BinaryOp::Gt:
    case BinaryOp::Ge:
      return kCompare;
    case BinaryOp::Add:
    case BinaryOp::Sub:
      return kAdd;
    case BinaryOp::Mul:
    case BinaryOp::Div:
    case BinaryOp::Mod:
      return kMul;
  }
  return kAtom;
}

bool is_negative_literal(const Expr& e) {
  if (e.kind == Expr::Kind::IntLit) return e.int_value < 0;
  if (e.kind == Expr::Kind::FloatLit) {
    return !std::isnan(e.float_value) && std::signbit(e.float_value);
  }
  return false;
}

int prec_of(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Binary:
      return binary_prec(e.binary_op);
    case Expr::Kind::Unary:
      return e.unary_op == UnaryOp::Not ? kNot : kNeg;
    case Expr::Kind::Index:
      return kPostfix;
    case Expr::Kind::IntLit:
    case Expr::Kind::FloatLit:
      return is_negative_literal(e) ? kNeg : kAtom;
    default:
      return kAtom;
  }
}

void emit(std::string& out, const Expr& e, int min_prec);

bool starts_with_number(const Expr& e) {
  if (e.kind == Expr::Kind::IntLit || e.kind == Expr::Kind::FloatLit) {
    return true;
  }
  return e.kind == Expr::Kind::Index && starts_with_number(e.operands[0]);
}

void emit_inner(std::string& out, const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::IntLit:
      out += std::to_string(e.int_value);
      return;
    case Expr::Kind::FloatLit:
      out += format_float(e.float_value);
      return;
    case Expr::Kind::BoolLit:
      out += e.bool_value ? "true" : "false";
      return;
    case Expr::Kind::StrLit:
      out += to_literal(Value::Str(e.text));
      return;
    case Expr::Kind::Var:
      out += e.text;
      return;
    case Expr::Kind::ListLit: {
      out += '[';
      for (std::size_t i = 0; i < e.operands.size(); ++i) {
        if (i) out += ", ";
        emit(out, e.operands[i], kOr);
      }
      out += ']';
      return;
    }
    case Expr::Kind::Call:
      out += to_string(e.builtin);
      out += '(';
      emit(out, e.operands[0], kOr);
      out += ')';
      return;
    case Expr::Kind::Index:
      emit(out, e.operands[0], kPostfix);
      out += '[';
      emit(out, e.operands[1], kOr);
      out += ']';
      return;
    case Expr::Kind::Unary: {
      const Expr& operand = e.operands[0];
      if (e.unary_op == UnaryOp::Not) {
        out += "not ";
        emit(out, operand, kNot);
        return;
      }
      out += '-';
      if (starts_with_number(operand)) {
        // Keep the literal from absorbing the sign on re-parse.
        out += '(';
        emit_inner(out, operand);
        out += ')';
        return;
      }
      emit(out, operand, kNeg);
      return;
    }
    case Expr::Kind::Binary: {
      int p = binary_prec(e.binary_op);
      int lhs_min = p == kCompare ? p + 1 : p;
      emit(out, e.operands[0], lhs_min);
      out += ' ';
      out += to_string(e.binary_op);
      out += ' ';
      emit(out, e.operands[1], p + 1);
      return;
    }
  }
}

void emit(std::string& out, const Expr& e, int min_prec) {
  bool parens = prec_of(e) < min_prec;
  if (parens) out += '(';
  emit_inner(out, e);
  if (parens) out += ')';
}

void indent(std::string& out, int depth) { out.append(depth * 4, ' '); }

void emit_block(std::string& out, const Block& b, int depth);

void emit_if_tail(std::string& out, const Stmt& s, int depth) {
  out += "if ";
  emit(out, s.expr, kOr);
  out += " {\n";
  emit_block(out, s.body, depth + 1);
  indent(out, depth);
  out += '}';
  if (s.else_body.empty()) {
    out += '\n';
    return;
  }
  if (s.else_body.size() == 1 && s.else_body[0].kind == Stmt::Kind::If) {
    out += " else ";
    emit_if_tail(out, s.else_body[0], depth);
    return;
  }
  out += " else {\n";
  emit_block(out, s.else_body, depth + 1);
  indent(out, depth);
  out += "}\n";
}

void emit_stmt(std::string& out, const Stmt& s, int depth) {
  indent(out, depth);
  switch (s.kind) {
    case Stmt::Kind::Let:
      out += "let " + s.name;
      if (s.annotation) out += ": " + s.annotation->to_string();
      out += " = ";
      emit(out, s.expr, kOr);
      out += ";\n";
      return;
    case Stmt::Kind::Assign:
      out += s.name + " = ";
      emit(out, s.expr, kOr);
      out += ";\n";
      return;
    case Stmt::Kind::Return:
      out += "return ";
      emit(out, s.expr, kOr);
      out += ";\n";
      return;
    case Stmt::Kind::Raise:
      out += "raise(";
      emit(out, s.expr, kOr);
      out += ");\n";
      return;
    case Stmt::Kind::While:
      out += "while ";
      emit(out, s.expr, kOr);
      out += " {\n";
      emit_block(out, s.body, depth + 1);
      indent(out, depth);
      out += "}\n";
      return;
    case Stmt::Kind::For:
      out += "for " + s.name + " in ";
      emit(out, s.expr, kOr);
      out += " {\n";
      emit_block(out, s.body, depth + 1);
      indent(out, depth);
      out += "}\n";
      return;
    case Stmt::Kind::If:
      emit_if_tail(out, s, depth);
      return;
  }
}

void emit_block(std::string& out, const Block& b, int depth) {
  for (const auto& s : b) emit_stmt(out, s, depth);
}

}  // namespace

std::string print(const Expr& expr) {
  std::string out;
  emit(out, expr, kOr);
  return out;
}

std::string print_signature(const FunctionDef& def) {
  std::string out = "fn " + def.name + "(";
  for (std::size_t i = 0; i < def.params.size(); ++i) {
    if (i) out += ", ";
    out += def.params[i].name + ": " + def.params[i].type.to_string();
  }
  out += ") -> " + def.return_type.to_string();
  return out;
}

std::string print(const FunctionDef& def) {
  std::string out = print_signature(def) + " {\n";
  emit_block(out, def.body, 1);
  out += "}\n";
  return out;
}

}  // namespace disambig::minifn
