#include "disambig/mutation.hpp"

#include <array>
#include <cmath>
#include <limits>

#include "disambig/minifn/typecheck.hpp"

namespace disambig::mutation {

using minifn::BinaryOp;
using minifn::NodeRef;
using minifn::Stmt;
using minifn::TypeKind;

namespace {

constexpr std::array<MutationOperator, 5> kOperators{{
    {OperatorId::AOR, "AOR", "arithmetic operator replacement"},
    {OperatorId::ROR, "ROR", "relational operator replacement"},
    {OperatorId::COR, "COR", "conditional operator replacement"},
    {OperatorId::CRP, "CRP", "constant replacement"},
    {OperatorId::RVR, "RVR", "return value replacement"},
}};

constexpr std::array<BinaryOp, 5> kArithmetic{BinaryOp::Add, BinaryOp::Sub,
                                              BinaryOp::Mul, BinaryOp::Div,
                                              BinaryOp::Mod};
constexpr std::array<BinaryOp, 6> kRelational{BinaryOp::Lt, BinaryOp::Le,
                                              BinaryOp::Gt, BinaryOp::Ge,
                                              BinaryOp::Eq, BinaryOp::Ne};

template <std::size_t N>
bool in_set(const std::array<BinaryOp, N>& set, BinaryOp op) {
  for (auto o : set) {
    if (o == op) return true;
  }
  return false;
}

template <std::size_t N>
std::vector<Expr> swap_ops(const std::array<BinaryOp, N>& set, const Expr& node) {
  std::vector<Expr> out;
  for (auto op : set) {
    if (op == node.binary_op) continue;
    Expr e = node;
    e.binary_op = op;
    out.push_back(std::move(e));
  }
  return out;
}

void push_unique(std::vector<Expr>& out, const Expr& original, Expr e) {
  if (e == original) return;
  for (const auto& x : out) {
    if (x == e) return;
  }
  out.push_back(std::move(e));
}

}  // namespace

std::span<const MutationOperator> operator_table() { return kOperators; }

std::string_view to_string(OperatorId id) {
  return kOperators[static_cast<std::size_t>(id)].name;
}

std::optional<OperatorId> parse_operator(std::string_view name) {
  for (const auto& op : kOperators) {
    if (op.name == name) return op.id;
  }
  return std::nullopt;
}

std::vector<Expr> rewrite(OperatorId id, const Expr& node) {
  std::vector<Expr> out;
  switch (id) {
    case OperatorId::AOR:
      if (node.kind == Expr::Kind::Binary && in_set(kArithmetic, node.binary_op)) {
        out = swap_ops(kArithmetic, node);
      }
      break;
    case OperatorId::ROR:
      if (node.kind == Expr::Kind::Binary && in_set(kRelational, node.binary_op)) {
        out = swap_ops(kRelational, node);
      }
      break;
    case OperatorId::COR:
      if (node.kind == Expr::Kind::Binary &&
          (node.binary_op == BinaryOp::And || node.binary_op == BinaryOp::Or)) {
        Expr e = node;
        e.binary_op = node.binary_op == BinaryOp::And ? BinaryOp::Or : BinaryOp::And;
        out.push_back(std::move(e));
      }
      break;
    case OperatorId::CRP:
      if (node.kind == Expr::Kind::IntLit) {
        push_unique(out, node, Expr::int_lit(0, node.loc));
        push_unique(out, node, Expr::int_lit(1, node.loc));
        if (node.int_value != std::numeric_limits<std::int64_t>::max()) {
          push_unique(out, node, Expr::int_lit(node.int_value + 1, node.loc));
        }
      } else if (node.kind == Expr::Kind::FloatLit) {
        push_unique(out, node, Expr::float_lit(0.0, node.loc));
        push_unique(out, node, Expr::float_lit(1.0, node.loc));
      } else if (node.kind == Expr::Kind::StrLit) {
        push_unique(out, node, Expr::str_lit("", node.loc));
      }
      break;
    case OperatorId::RVR:
      break;
  }
  return out;
}

namespace {

Expr default_value(const minifn::Type& t, minifn::SourceLoc loc) {
  switch (t.kind()) {
    case TypeKind::Int:
      return Expr::int_lit(0, loc);
    case TypeKind::Float:
      return Expr::float_lit(0.0, loc);
    case TypeKind::Bool:
      return Expr::bool_lit(false, loc);
    case TypeKind::Str:
      return Expr::str_lit("", loc);
    case TypeKind::List: {
      Expr e;
      e.kind = Expr::Kind::ListLit;
      e.loc = loc;
      return e;
    }
  }
  return Expr::int_lit(0, loc);
}

}  // namespace

std::optional<Expr> return_default(const Expr& value,
                                   const minifn::Type& return_type) {
  Expr d = default_value(return_type, value.loc);
  if (d == value) return std::nullopt;
  return d;
}

std::vector<Mutant> mutate_all(const FunctionDef& def, std::size_t cap,
                               const std::string& parent_id) {
  std::vector<Mutant> out;
  if (cap == 0) return out;
  const int nodes = minifn::count_nodes(def);

  auto accept = [&](FunctionDef&& candidate, OperatorId op, int site,
                    minifn::SourceLoc loc) {
    if (candidate == def) return;
    for (const auto& m : out) {
      if (m.def == candidate) return;
    }
    if (!minifn::typechecks(candidate)) return;
    out.push_back(Mutant{std::move(candidate), parent_id, op, site, loc});
  };

  for (const auto& op : kOperators) {
    for (int site = 0; site < nodes; ++site) {
      // Collect the rewrites available at this site on a scratch copy.
      FunctionDef probe = def;
      std::vector<Expr> replacements;
      bool is_return = false;
      minifn::SourceLoc loc;
      minifn::walk_preorder(probe, [&](NodeRef ref, int idx) {
        if (idx != site) return true;
        if (ref.expr) {
          loc = ref.expr->loc;
          replacements = rewrite(op.id, *ref.expr);
        } else if (op.id == OperatorId::RVR && ref.stmt->kind == Stmt::Kind::Return) {
          loc = ref.stmt->loc;
          is_return = true;
          if (auto d = return_default(ref.stmt->expr, def.return_type)) {
            replacements.push_back(std::move(*d));
          }
        }
        return false;
      });

      for (auto& rep : replacements) {
        FunctionDef m = def;
        minifn::walk_preorder(m, [&](NodeRef ref, int idx) {
          if (idx != site) return true;
          if (is_return) {
            ref.stmt->expr = rep;
          } else {
            *ref.expr = rep;
          }
          return false;
        });
        accept(std::move(m), op.id, site, loc);
        if (out.size() >= cap) return out;
      }
    }
  }
  return out;
}

}  // namespace disambig::mutation
