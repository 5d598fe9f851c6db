#include "disambig/minifn/value.hpp"

#include <charconv>
#include <cmath>
#include <cstring>
#include <limits>

#include "disambig/minifn/outcome.hpp"

namespace disambig::minifn {

Type Type::List(Type elem) {
  Type t(TypeKind::List);
  t.elem_ = std::make_shared<const Type>(std::move(elem));
  return t;
}

std::string Type::to_string() const {
  switch (kind_) {
    case TypeKind::Int:
      return "Int";
    case TypeKind::Float:
      return "Float";
    case TypeKind::Bool:
      return "Bool";
    case TypeKind::Str:
      return "Str";
    case TypeKind::List:
      return "List[" + elem_->to_string() + "]";
  }
  return "?";
}

bool operator==(const Type& a, const Type& b) {
  if (a.kind_ != b.kind_) return false;
  if (a.kind_ != TypeKind::List) return true;
  return *a.elem_ == *b.elem_;
}

Value Value::Float(double v) {
  if (std::isnan(v)) v = std::numeric_limits<double>::quiet_NaN();
  return Value{Data{v}};
}

Value Value::List(Type elem, std::vector<Value> items) {
  return Value{Data{ListValue{std::move(elem), std::move(items)}}};
}

Type Value::type() const {
  switch (data.index()) {
    case 0:
      return Type::Int();
    case 1:
      return Type::Float();
    case 2:
      return Type::Bool();
    case 3:
      return Type::Str();
    default:
      return Type::List(as_list().elem);
  }
}

namespace {

bool same_bits(double a, double b) {
  std::uint64_t x = 0, y = 0;
  std::memcpy(&x, &a, sizeof x);
  std::memcpy(&y, &b, sizeof y);
  return x == y;
}

template <typename FloatEq>
bool values_equal(const Value& a, const Value& b, FloatEq float_eq) {
  if (a.data.index() != b.data.index()) return false;
  switch (a.data.index()) {
    case 0:
      return a.as_int() == b.as_int();
    case 1:
      return float_eq(a.as_float(), b.as_float());
    case 2:
      return a.as_bool() == b.as_bool();
    case 3:
      return a.as_str() == b.as_str();
    default: {
      const auto& la = a.as_list();
      const auto& lb = b.as_list();
      if (!(la.elem == lb.elem) || la.items.size() != lb.items.size()) {
        return false;
      }
      for (std::size_t i = 0; i < la.items.size(); ++i) {
        if (!values_equal(la.items[i], lb.items[i], float_eq)) return false;
      }
      return true;
    }
  }
}

}  // namespace

bool operator==(const Value& a, const Value& b) {
  return values_equal(a, b, same_bits);
}

bool canonical_equal(const Value& a, const Value& b) {
  return values_equal(a, b, [](double x, double y) {
    if (std::isnan(x) || std::isnan(y)) return std::isnan(x) && std::isnan(y);
    return x == y;
  });
}

bool conforms(const Value& v, const Type& t) {
  switch (t.kind()) {
    case TypeKind::Int:
      return v.is_int();
    case TypeKind::Float:
      return v.is_float();
    case TypeKind::Bool:
      return v.is_bool();
    case TypeKind::Str:
      return v.is_str();
    case TypeKind::List: {
      if (!v.is_list() || !(v.as_list().elem == t.elem())) return false;
      for (const auto& item : v.as_list().items) {
        if (!conforms(item, t.elem())) return false;
      }
      return true;
    }
  }
  return false;
}

std::string format_float(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  std::string out(buf, res.ptr);
  if (out.find_first_of(".e") == std::string::npos) out += ".0";
  return out;
}

namespace {

void append_quoted(std::string& out, const std::string& s) {
  out += '"';
  for (char c : s) {
    switch (c) {
      case '"':
        out += "\\\"";
        break;
      case '\\':
        out += "\\\\";
        break;
      case '\n':
        out += "\\n";
        break;
      case '\t':
        out += "\\t";
        break;
      default:
        out += c;
    }
  }
  out += '"';
}

void append_literal(std::string& out, const Value& v) {
  switch (v.data.index()) {
    case 0:
      out += std::to_string(v.as_int());
      break;
    case 1:
      out += format_float(v.as_float());
      break;
    case 2:
      out += v.as_bool() ? "true" : "false";
      break;
    case 3:
      append_quoted(out, v.as_str());
      break;
    default: {
      out += '[';
      bool first = true;
      for (const auto& item : v.as_list().items) {
        if (!first) out += ", ";
        first = false;
        append_literal(out, item);
      }
      out += ']';
    }
  }
}

}  // namespace

std::string to_literal(const Value& v) {
  std::string out;
  append_literal(out, v);
  return out;
}

std::string args_literal(const std::vector<Value>& args) {
  std::string out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) out += ", ";
    append_literal(out, args[i]);
  }
  return out;
}

// --- Outcome ---------------------------------------------------------------

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DivisionByZero:
      return "DivisionByZero";
    case ErrorKind::IndexOutOfRange:
      return "IndexOutOfRange";
    case ErrorKind::UserRaised:
      return "UserRaised";
    case ErrorKind::Overflow:
      return "Overflow";
  }
  return "?";
}

std::optional<ErrorKind> parse_error_kind(std::string_view text) {
  for (auto k : {ErrorKind::DivisionByZero, ErrorKind::IndexOutOfRange,
                 ErrorKind::UserRaised, ErrorKind::Overflow}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

std::string Outcome::describe() const {
  if (is_value()) return to_literal(value());
  if (is_error()) return "error(" + std::string(to_string(error().kind)) + ")";
  return "timeout";
}

bool outcome_eq(const Outcome& a, const Outcome& b) {
  if (a.is_value() && b.is_value()) return canonical_equal(a.value(), b.value());
  if (a.is_error() && b.is_error()) return a.error().kind == b.error().kind;
  return a.is_exhausted() && b.is_exhausted();
}

}  // namespace disambig::minifn
