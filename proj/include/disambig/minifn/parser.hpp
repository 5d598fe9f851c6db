#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "disambig/minifn/ast.hpp"

namespace disambig::minifn {

class ParseError : public std::runtime_error {
 public:
  ParseError(SourceLoc loc, const std::string& message);
  SourceLoc loc() const { return loc_; }
  const std::string& detail() const { return detail_; }

 private:
  SourceLoc loc_;
  std::string detail_;
};

// Parses exactly one function definition. Total and deterministic: any input
// either yields a FunctionDef or throws ParseError.
FunctionDef parse(std::string_view source);

// Parses `fn name(p: T, ...) -> T` with no body.
struct Signature {
  std::string name;
  std::vector<Param> params;
  Type return_type;
};
Signature parse_signature(std::string_view text);

Type parse_type(std::string_view text);

// Parses a literal (numbers, nan/inf with optional sign, strings, bools,
// nested lists) against an expected type. Integer literals are accepted where
// Float is expected.
Value parse_value(std::string_view text, const Type& type);

// Parses a comma-separated literal list, e.g. the inside of `f([1], 2)`.
std::vector<Value> parse_values(std::string_view text,
                                const std::vector<Type>& types);

}  // namespace disambig::minifn
