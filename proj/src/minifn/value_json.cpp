#include "disambig/minifn/value_json.hpp"

#include <cmath>
#include <limits>

namespace disambig::minifn {

using nlohmann::json;

json to_json(const Value& v) {
  switch (v.data.index()) {
    case 0:
      return v.as_int();
    case 1: {
      double d = v.as_float();
      if (std::isnan(d)) return "NaN";
      if (std::isinf(d)) return d > 0 ? "Inf" : "-Inf";
      return d;
    }
    case 2:
      return v.as_bool();
    case 3:
      return v.as_str();
    default: {
      json arr = json::array();
      for (const auto& item : v.as_list().items) arr.push_back(to_json(item));
      return arr;
    }
  }
}

Value value_from_json(const json& j, const Type& type) {
  auto fail = [&]() -> Value {
    throw ValueDecodeError("expected " + type.to_string() + ", got " + j.dump());
  };
  switch (type.kind()) {
    case TypeKind::Int:
      if (j.is_number_integer()) return Value::Int(j.get<std::int64_t>());
      return fail();
    case TypeKind::Float:
      if (j.is_number()) return Value::Float(j.get<double>());
      if (j.is_string()) {
        const auto& s = j.get_ref<const std::string&>();
        if (s == "NaN") return Value::Float(std::numeric_limits<double>::quiet_NaN());
        if (s == "Inf") return Value::Float(std::numeric_limits<double>::infinity());
        if (s == "-Inf") return Value::Float(-std::numeric_limits<double>::infinity());
      }
      return fail();
    case TypeKind::Bool:
      if (j.is_boolean()) return Value::Bool(j.get<bool>());
      return fail();
    case TypeKind::Str:
      if (j.is_string()) return Value::Str(j.get<std::string>());
      return fail();
    case TypeKind::List: {
      if (!j.is_array()) return fail();
      std::vector<Value> items;
      items.reserve(j.size());
      for (const auto& item : j) items.push_back(value_from_json(item, type.elem()));
      return Value::List(type.elem(), std::move(items));
    }
  }
  return fail();
}

json to_json(const Outcome& o) {
  if (o.is_value()) return {{"kind", "value"}, {"value", to_json(o.value())}};
  if (o.is_error()) {
    return {{"kind", "error"},
            {"error_kind", std::string(to_string(o.error().kind))},
            {"message", o.error().message}};
  }
  return {{"kind", "timeout"}};
}

Outcome outcome_from_json(const json& j, const Type& return_type) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    throw ValueDecodeError("outcome must be an object with a string 'kind'");
  }
  const auto& kind = j["kind"].get_ref<const std::string&>();
  if (kind == "value") {
    if (!j.contains("value")) throw ValueDecodeError("value outcome without 'value'");
    return Outcome::of_value(value_from_json(j["value"], return_type));
  }
  if (kind == "error") {
    ErrorKind ek = ErrorKind::UserRaised;
    if (j.contains("error_kind")) {
      if (!j["error_kind"].is_string()) throw ValueDecodeError("error_kind must be a string");
      auto parsed = parse_error_kind(j["error_kind"].get<std::string>());
      if (!parsed) throw ValueDecodeError("unknown error_kind " + j["error_kind"].dump());
      ek = *parsed;
    }
    std::string msg;
    if (j.contains("message") && j["message"].is_string()) msg = j["message"].get<std::string>();
    return Outcome::of_error(ek, std::move(msg));
  }
  if (kind == "timeout") return Outcome::exhausted();
  throw ValueDecodeError("unknown outcome kind '" + kind + "'");
}

}  // namespace disambig::minifn
