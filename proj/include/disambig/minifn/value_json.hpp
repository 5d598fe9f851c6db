#pragma once

#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "disambig/minifn/outcome.hpp"
#include "disambig/minifn/value.hpp"

namespace disambig::minifn {

class ValueDecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Wire encoding shared by reports, the HTTP service and the subprocess runner
// protocol. Floats are JSON numbers except NaN/Inf/-Inf, which become the
// strings "NaN", "Inf" and "-Inf". Decoding is type-directed.
nlohmann::json to_json(const Value& v);
Value value_from_json(const nlohmann::json& j, const Type& type);

// {"kind":"value","value":...} | {"kind":"error","error_kind":...,
// "message":...} | {"kind":"timeout"}
nlohmann::json to_json(const Outcome& o);
Outcome outcome_from_json(const nlohmann::json& j, const Type& return_type);

}  // namespace disambig::minifn
