#pragma once

#include <stdexcept>
#include <string>

#include "disambig/minifn/ast.hpp"

namespace disambig::minifn {

class TypeError : public std::runtime_error {
 public:
  TypeError(SourceLoc loc, const std::string& message);
  SourceLoc loc() const { return loc_; }

 private:
  SourceLoc loc_;
};

// Checks the definition and annotates it in place (expression types, variable
// slots, slot_count). Throws TypeError on the first violation.
//
// Rules: arithmetic needs two Ints or two Floats (+ also concatenates Str and
// same-typed lists); == and != accept any two equal types; ordering accepts
// Int, Float or Str; and/or/not take Bool; every path must return or raise.
void typecheck(FunctionDef& def);

// Non-throwing convenience.
bool typechecks(FunctionDef& def);

}  // namespace disambig::minifn
