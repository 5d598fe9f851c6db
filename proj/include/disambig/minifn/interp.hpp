#pragma once

#include <cstdint>
#include <span>

#include "disambig/minifn/ast.hpp"
#include "disambig/minifn/outcome.hpp"

namespace disambig::minifn {

inline constexpr std::uint64_t kDefaultFuel = 100000;

// Runs a typechecked definition. Every statement execution and every
// expression evaluation costs one unit of fuel; running out yields
// BudgetExhausted. Pure and reentrant.
//
// Throws std::invalid_argument if def is unchecked or args do not conform to
// the parameter types.
Outcome eval_call(const FunctionDef& def, std::span<const Value> args,
                  std::uint64_t fuel = kDefaultFuel);

}  // namespace disambig::minifn
