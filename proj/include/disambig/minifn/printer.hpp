#pragma once

#include <string>

#include "disambig/minifn/ast.hpp"

namespace disambig::minifn {

// Canonical pretty-printer. parse(print(def)) == def for every parsed def.
std::string print(const FunctionDef& def);
std::string print(const Expr& expr);
std::string print_signature(const FunctionDef& def);

}  // namespace disambig::minifn
