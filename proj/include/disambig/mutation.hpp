#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "disambig/minifn/ast.hpp"

namespace disambig::mutation {

using minifn::Expr;
using minifn::FunctionDef;

enum class OperatorId { AOR, ROR, COR, CRP, RVR };

struct MutationOperator {
  OperatorId id;
  std::string_view name;
  std::string_view description;
};

std::span<const MutationOperator> operator_table();
std::string_view to_string(OperatorId id);
std::optional<OperatorId> parse_operator(std::string_view name);

// Replacement expressions the operator offers for a node; empty when the
// operator does not apply. Never contains the node itself.
//   AOR: + - * / %  pairwise      ROR: < <= > >= == !=  pairwise
//   COR: and <-> or               CRP: int c -> 0, 1, c+1; float -> 0.0, 1.0;
//                                      string -> ""
std::vector<Expr> rewrite(OperatorId id, const Expr& node);

// RVR: the return statement's value replaced by the return type's default
// (0, 0.0, false, "", []), unless it already is that default.
std::optional<Expr> return_default(const Expr& value,
                                   const minifn::Type& return_type);

struct Mutant {
  FunctionDef def;
  std::string parent_id;
  OperatorId op;
  int site;  // preorder index of the rewritten node
  minifn::SourceLoc loc;
};

inline constexpr std::size_t kDefaultCapPerParent = 40;
inline constexpr std::size_t kDefaultGlobalCap = 200;

// Every operator at every applicable site, ordered by (operator, site,
// table order). Ill-typed mutants and mutants structurally equal to the
// parent or to an earlier mutant are dropped; the rest is truncated to cap.
// Precondition: def typechecks.
std::vector<Mutant> mutate_all(const FunctionDef& def,
                               std::size_t cap = kDefaultCapPerParent,
                               const std::string& parent_id = "");

}  // namespace disambig::mutation
