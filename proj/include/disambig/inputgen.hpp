#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "disambig/minifn/value.hpp"

namespace disambig::inputgen {

using minifn::Type;
using minifn::Value;

struct GenConfig {
  std::uint64_t seed = 0;
  std::size_t max_list_len = 8;
  std::size_t max_str_len = 8;
  std::int64_t int_min = -1000;
  std::int64_t int_max = 1000;
  std::size_t trials_per_target = 200;
  double special_value_bias = 0.25;

  // Throws std::invalid_argument on out-of-range settings.
  void validate() const;
};

// Characters drawn for random Str values.
inline constexpr std::string_view kStrAlphabet = "aeiouyAEIbcxz ";

/// Total order on argument tuples: smaller total first, then the canonical
/// text. "Simplest input" means minimal SizeScore.
struct SizeScore {
  std::uint64_t total = 0;
  std::string tiebreak;

  friend auto operator<=>(const SizeScore&, const SizeScore&) = default;
};

std::uint64_t value_size(const Value& v);
SizeScore size(std::span<const Value> args);

std::vector<Value> special_values(const Type& ty);

// Deterministic in (cfg.seed, position). Draws from special_values(ty) with
// probability cfg.special_value_bias; list elements recurse with the same
// bias.
Value generate(const Type& ty, const GenConfig& cfg, std::uint64_t position);

// One value per parameter type, all derived from the same position.
std::vector<Value> generate_args(std::span<const Type> types,
                                 const GenConfig& cfg, std::uint64_t position);

// Every tuple the generator can produce, when that set has at most `limit`
// members; nullopt otherwise (any Float parameter makes it unbounded).
std::optional<std::vector<std::vector<Value>>> enumerate_domain(
    std::span<const Type> types, const GenConfig& cfg, std::size_t limit);

using KeepFn = std::function<bool(const std::vector<Value>&)>;

inline constexpr std::size_t kDefaultShrinkBudget = 500;

// Greedy first-improvement shrinking. Structural moves (list to [], halving, element
// removal, string truncation) come before value moves (0, n/2, n - n/4,
// n - n/8, ..., n - sign; 0.0, -0.0 for negatives, 1.0, -1.0, truncation, the same halving steps
// for whole floats; true -> false); replacing NaN by 0.0 is tried last. A
// move is taken only if it strictly lowers SizeScore and keep still holds.
// `budget` bounds the number of keep evaluations.
std::vector<Value> shrink(std::vector<Value> args, const KeepFn& keep,
                          std::size_t budget = kDefaultShrinkBudget);

}  // namespace disambig::inputgen
