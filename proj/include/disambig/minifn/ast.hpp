#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "disambig/minifn/value.hpp"

namespace disambig::minifn {

struct SourceLoc {
  int line = 0;
  int column = 0;
};

enum class BinaryOp { Add, Sub, Mul, Div, Mod, Eq, Ne, Lt, Le, Gt, Ge, And, Or };
enum class UnaryOp { Neg, Not };
enum class Builtin { Len, Abs, IsNan };

std::string_view to_string(BinaryOp op);
std::string_view to_string(UnaryOp op);
std::string_view to_string(Builtin b);

struct Expr {
  enum class Kind {
    IntLit,
    FloatLit,
    BoolLit,
    StrLit,
    ListLit,
    Var,
    Index,
    Binary,
    Unary,
    Call
  };

  Kind kind = Kind::IntLit;
  SourceLoc loc;

  std::int64_t int_value = 0;
  double float_value = 0.0;
  bool bool_value = false;
  std::string text;  // variable name or string literal contents
  BinaryOp binary_op = BinaryOp::Add;
  UnaryOp unary_op = UnaryOp::Neg;
  Builtin builtin = Builtin::Len;
  std::vector<Expr> operands;

  // Filled in by typecheck; ignored by equality.
  std::optional<Type> type;
  int slot = -1;

  static Expr int_lit(std::int64_t v, SourceLoc loc = {});
  static Expr float_lit(double v, SourceLoc loc = {});
  static Expr bool_lit(bool v, SourceLoc loc = {});
  static Expr str_lit(std::string v, SourceLoc loc = {});
  static Expr var(std::string name, SourceLoc loc = {});
  static Expr binary(BinaryOp op, Expr lhs, Expr rhs, SourceLoc loc = {});
  static Expr unary(UnaryOp op, Expr operand, SourceLoc loc = {});
};

struct Stmt {
  enum class Kind { Let, Assign, If, While, For, Return, Raise };

  Kind kind = Kind::Return;
  SourceLoc loc;
  std::string name;               // Let / Assign / For binding
  std::optional<Type> annotation; // Let only
  Expr expr;                      // value, condition, iterable or message
  std::vector<Stmt> body;
  std::vector<Stmt> else_body;

  int slot = -1;  // filled by typecheck for Let / Assign / For
};

using Block = std::vector<Stmt>;

struct Param {
  std::string name;
  Type type;
};

struct FunctionDef {
  std::string name;
  std::vector<Param> params;
  Type return_type;
  Block body;
  SourceLoc loc;

  // Number of variable slots; set by typecheck. Negative means unchecked.
  int slot_count = -1;
  bool checked() const { return slot_count >= 0; }
};

// Structural equality ignoring source locations and typecheck annotations.
// Float literals compare bitwise.
bool operator==(const Expr& a, const Expr& b);
bool operator==(const Stmt& a, const Stmt& b);
bool operator==(const FunctionDef& a, const FunctionDef& b);

/// A node reached by a preorder walk. Exactly one pointer is set.
struct NodeRef {
  Stmt* stmt = nullptr;
  Expr* expr = nullptr;
};

// Preorder over statements and expressions; the visitor sees each node with
// its preorder index (its "site"). Return false from the visitor to stop.
void walk_preorder(FunctionDef& def,
                   const std::function<bool(NodeRef, int)>& visit);
int count_nodes(const FunctionDef& def);

}  // namespace disambig::minifn
