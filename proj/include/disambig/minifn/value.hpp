#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace disambig::minifn {

enum class TypeKind { Int, Float, Bool, Str, List };

/// Static type of a MiniFn expression or value. Immutable; list element types
/// are shared between copies.
class Type {
 public:
  Type() = default;

  static Type Int() { return Type(TypeKind::Int); }
  static Type Float() { return Type(TypeKind::Float); }
  static Type Bool() { return Type(TypeKind::Bool); }
  static Type Str() { return Type(TypeKind::Str); }
  static Type List(Type elem);

  TypeKind kind() const { return kind_; }
  bool is_list() const { return kind_ == TypeKind::List; }
  bool is_numeric() const {
    return kind_ == TypeKind::Int || kind_ == TypeKind::Float;
  }
  // Precondition: is_list().
  const Type& elem() const { return *elem_; }

  // Surface syntax: Int, Float, Bool, Str, List[T].
  std::string to_string() const;

  friend bool operator==(const Type& a, const Type& b);

 private:
  explicit Type(TypeKind kind) : kind_(kind) {}

  TypeKind kind_ = TypeKind::Int;
  std::shared_ptr<const Type> elem_;
};

struct Value;

struct ListValue {
  Type elem;
  std::vector<Value> items;
};

/// Runtime value. Float NaNs are canonicalized to a single quiet NaN on
/// construction so that serialization round-trips bit-exactly.
struct Value {
  using Data = std::variant<std::int64_t, double, bool, std::string, ListValue>;
  Data data;

  static Value Int(std::int64_t v) { return Value{Data{v}}; }
  static Value Float(double v);
  static Value Bool(bool v) { return Value{Data{v}}; }
  static Value Str(std::string v) { return Value{Data{std::move(v)}}; }
  static Value List(Type elem, std::vector<Value> items = {});

  bool is_int() const { return data.index() == 0; }
  bool is_float() const { return data.index() == 1; }
  bool is_bool() const { return data.index() == 2; }
  bool is_str() const { return data.index() == 3; }
  bool is_list() const { return data.index() == 4; }

  std::int64_t as_int() const { return std::get<0>(data); }
  double as_float() const { return std::get<1>(data); }
  bool as_bool() const { return std::get<2>(data); }
  const std::string& as_str() const { return std::get<3>(data); }
  const ListValue& as_list() const { return std::get<4>(data); }
  ListValue& as_list() { return std::get<4>(data); }

  Type type() const;
};

// Bit-level identity: NaN equals NaN, -0.0 differs from 0.0. This is the
// equality used for argument tuples, AST literals and round-trip checks.
bool operator==(const Value& a, const Value& b);

// Policy equality for comparing candidate results: NaN equals NaN and
// +0.0 equals -0.0. Element types of lists must agree.
bool canonical_equal(const Value& a, const Value& b);

bool conforms(const Value& v, const Type& t);

// Shortest round-trip float text that always reads back as a Float literal:
// 3.7, 0.0, -0.0, 1e+20, nan, inf, -inf.
std::string format_float(double v);

// Canonical MiniFn literal text. Parsing it back with the value's type
// yields an identical value.
std::string to_literal(const Value& v);

// Comma-joined literals, as they appear inside a call's parentheses.
std::string args_literal(const std::vector<Value>& args);

}  // namespace disambig::minifn
