#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "disambig/minifn/value.hpp"

namespace disambig::minifn {

enum class ErrorKind { DivisionByZero, IndexOutOfRange, UserRaised, Overflow };

std::string_view to_string(ErrorKind kind);
std::optional<ErrorKind> parse_error_kind(std::string_view text);

struct RuntimeError {
  ErrorKind kind;
  std::string message;
};

struct BudgetExhausted {};

/// Result of running a candidate on one argument tuple.
class Outcome {
 public:
  static Outcome of_value(Value v) { return Outcome(std::move(v)); }
  static Outcome of_error(ErrorKind kind, std::string message) {
    return Outcome(RuntimeError{kind, std::move(message)});
  }
  static Outcome exhausted() { return Outcome(BudgetExhausted{}); }

  bool is_value() const { return data_.index() == 0; }
  bool is_error() const { return data_.index() == 1; }
  bool is_exhausted() const { return data_.index() == 2; }
  bool is_failure() const { return !is_value(); }

  const Value& value() const { return std::get<0>(data_); }
  const RuntimeError& error() const { return std::get<1>(data_); }

  // Short behavior label: the value literal, "error(UserRaised)" or "timeout".
  std::string describe() const;

 private:
  using Data = std::variant<Value, RuntimeError, BudgetExhausted>;
  explicit Outcome(Data d) : data_(std::move(d)) {}
  Data data_;
};

// Equivalence used to decide whether two candidates behave the same:
// values by canonical_equal, errors by kind, timeouts equal each other.
bool outcome_eq(const Outcome& a, const Outcome& b);

}  // namespace disambig::minifn
