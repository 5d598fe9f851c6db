#include "disambig/inputgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace disambig::inputgen {

using minifn::TypeKind;

void GenConfig::validate() const {
  if (trials_per_target < 1) {
    throw std::invalid_argument("trials_per_target must be at least 1");
  }
  if (!(special_value_bias >= 0.0 && special_value_bias <= 1.0)) {
    throw std::invalid_argument("special_value_bias must lie in [0, 1]");
  }
  if (int_min > int_max) {
    throw std::invalid_argument("int range lower bound exceeds upper bound");
  }
}

std::uint64_t value_size(const Value& v) {
  switch (v.data.index()) {
    case 0: {
      std::int64_t n = v.as_int();
      std::uint64_t mag = n < 0 ? std::uint64_t(0) - static_cast<std::uint64_t>(n)
                                : static_cast<std::uint64_t>(n);
      std::uint64_t digits = 1;
      while (mag >= 10) {
        mag /= 10;
        ++digits;
      }
      return 1 + digits;
    }
    case 1:
      return v.as_float() == 0.0 ? 1 : 2;
    case 2:
      return 1;
    case 3:
      return 1 + v.as_str().size();
    default: {
      std::uint64_t total = 1;
      for (const auto& item : v.as_list().items) total += value_size(item);
      return total;
    }
  }
}

SizeScore size(std::span<const Value> args) {
  SizeScore s;
  for (const auto& a : args) s.total += value_size(a);
  s.tiebreak = minifn::args_literal(std::vector<Value>(args.begin(), args.end()));
  return s;
}

std::vector<Value> special_values(const Type& ty) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  switch (ty.kind()) {
    case TypeKind::Int:
      return {Value::Int(0), Value::Int(1), Value::Int(-1),
              Value::Int(std::numeric_limits<std::int64_t>::max()),
              Value::Int(std::numeric_limits<std::int64_t>::min())};
    case TypeKind::Float:
      return {Value::Float(0.0),  Value::Float(-0.0),
              Value::Float(1.0),  Value::Float(-1.0),
              Value::Float(std::numeric_limits<double>::quiet_NaN()),
              Value::Float(kInf), Value::Float(-kInf)};
    case TypeKind::Bool:
      return {Value::Bool(true), Value::Bool(false)};
    case TypeKind::Str:
      return {Value::Str(""), Value::Str(" "), Value::Str("a")};
    case TypeKind::List: {
      std::vector<Value> out{Value::List(ty.elem())};
      for (auto& s : special_values(ty.elem())) {
        out.push_back(Value::List(ty.elem(), {std::move(s)}));
      }
      return out;
    }
  }
  return {};
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class Draw {
 public:
  Draw(std::uint64_t seed, std::uint64_t position)
      : rng_(splitmix64(seed ^ splitmix64(position))) {}

  // Uniform in [0, n). n > 0.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
      x = rng_();
    } while (x >= limit);
    return x % n;
  }

  // Uniform in [lo, hi].
  std::int64_t between(std::int64_t lo, std::int64_t hi) {
    std::uint64_t span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo);
    std::uint64_t off = span == std::numeric_limits<std::uint64_t>::max()
                            ? rng_()
                            : below(span + 1);
    return static_cast<std::int64_t>(static_cast<std::uint64_t>(lo) + off);
  }

  double unit() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 rng_;
};

Value draw_value(const Type& ty, const GenConfig& cfg, Draw& d) {
  if (d.unit() < cfg.special_value_bias) {
    auto pool = special_values(ty);
    return pool[d.below(pool.size())];
  }
  switch (ty.kind()) {
    case TypeKind::Int:
      return Value::Int(d.between(cfg.int_min, cfg.int_max));
    case TypeKind::Float: {
      static constexpr double kDivisors[] = {1.0, 10.0, 100.0};
      double m = static_cast<double>(d.between(cfg.int_min, cfg.int_max));
      return Value::Float(m / kDivisors[d.below(3)]);
    }
    case TypeKind::Bool:
      return Value::Bool(d.below(2) == 1);
    case TypeKind::Str: {
      std::size_t n = d.below(cfg.max_str_len + 1);
      std::string s;
      for (std::size_t i = 0; i < n; ++i) s += kStrAlphabet[d.below(kStrAlphabet.size())];
      return Value::Str(std::move(s));
    }
    case TypeKind::List: {
      std::size_t n = d.below(cfg.max_list_len + 1);
      std::vector<Value> items;
      items.reserve(n);
      for (std::size_t i = 0; i < n; ++i) items.push_back(draw_value(ty.elem(), cfg, d));
      return Value::List(ty.elem(), std::move(items));
    }
  }
  return Value::Int(0);
}

}  // namespace

Value generate(const Type& ty, const GenConfig& cfg, std::uint64_t position) {
  Draw d(cfg.seed, position);
  return draw_value(ty, cfg, d);
}

std::vector<Value> generate_args(std::span<const Type> types,
                                 const GenConfig& cfg, std::uint64_t position) {
  std::vector<Value> out;
  out.reserve(types.size());
  Draw d(cfg.seed, position);
  for (const auto& t : types) out.push_back(draw_value(t, cfg, d));
  return out;
}

namespace {

// Sorted, duplicate-free support of one value type, or nullopt when larger
// than limit.
std::optional<std::vector<Value>> value_domain(const Type& ty,
                                               const GenConfig& cfg,
                                               std::size_t limit) {
  switch (ty.kind()) {
    case TypeKind::Bool:
      return std::vector<Value>{Value::Bool(false), Value::Bool(true)};
    case TypeKind::Int: {
      std::uint64_t span = static_cast<std::uint64_t>(cfg.int_max) -
                           static_cast<std::uint64_t>(cfg.int_min);
      if (span >= limit) return std::nullopt;
      std::vector<std::int64_t> ints;
      for (std::int64_t v = cfg.int_min;; ++v) {
        ints.push_back(v);
        if (v == cfg.int_max) break;
      }
      for (const auto& s : special_values(ty)) ints.push_back(s.as_int());
      std::sort(ints.begin(), ints.end());
      ints.erase(std::unique(ints.begin(), ints.end()), ints.end());
      if (ints.size() > limit) return std::nullopt;
      std::vector<Value> out;
      for (auto v : ints) out.push_back(Value::Int(v));
      return out;
    }
    case TypeKind::Float:
      return std::nullopt;
    case TypeKind::Str: {
      // Random strings over the alphabet plus the special pool.
      std::vector<std::string> layer{""};
      std::vector<std::string> all{""};
      for (std::size_t len = 1; len <= cfg.max_str_len; ++len) {
        std::vector<std::string> next;
        for (const auto& p : layer) {
          for (char c : kStrAlphabet) {
            next.push_back(p + c);
            if (all.size() + next.size() > limit) return std::nullopt;
          }
        }
        all.insert(all.end(), next.begin(), next.end());
        layer = std::move(next);
      }
      for (const auto& s : special_values(ty)) all.push_back(s.as_str());
      std::sort(all.begin(), all.end());
      all.erase(std::unique(all.begin(), all.end()), all.end());
      if (all.size() > limit) return std::nullopt;
      std::vector<Value> out;
      for (auto& s : all) out.push_back(Value::Str(std::move(s)));
      return out;
    }
    case TypeKind::List: {
      auto elems = value_domain(ty.elem(), cfg, limit);
      if (!elems) return std::nullopt;
      std::vector<Value> out{Value::List(ty.elem())};
      std::vector<Value> layer{Value::List(ty.elem())};
      for (std::size_t len = 1; len <= cfg.max_list_len; ++len) {
        std::vector<Value> next;
        for (const auto& p : layer) {
          for (const auto& e : *elems) {
            Value v = p;
            v.as_list().items.push_back(e);
            next.push_back(std::move(v));
            if (out.size() + next.size() > limit) return std::nullopt;
          }
        }
        out.insert(out.end(), next.begin(), next.end());
        layer = std::move(next);
      }
      // Special singletons draw from the element pool, which the element
      // domain already contains; only a zero length cap leaves them out.
      if (cfg.max_list_len == 0) {
        for (auto& s : special_values(ty)) {
          if (!s.as_list().items.empty()) out.push_back(std::move(s));
        }
        if (out.size() > limit) return std::nullopt;
      }
      return out;
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<std::vector<std::vector<Value>>> enumerate_domain(
    std::span<const Type> types, const GenConfig& cfg, std::size_t limit) {
  std::vector<std::vector<Value>> tuples{{}};
  for (const auto& t : types) {
    auto dom = value_domain(t, cfg, limit);
    if (!dom) return std::nullopt;
    if (tuples.size() * dom->size() > limit) return std::nullopt;
    std::vector<std::vector<Value>> next;
    next.reserve(tuples.size() * dom->size());
    for (const auto& prefix : tuples) {
      for (const auto& v : *dom) {
        auto tup = prefix;
        tup.push_back(v);
        next.push_back(std::move(tup));
      }
    }
    tuples = std::move(next);
  }
  return tuples;
}

// --- shrinking ---------------------------------------------------------------

namespace {

struct Moves {
  std::vector<Value> early;
  std::vector<Value> late;
};

void push_distinct(std::vector<Value>& out, const Value& original, Value v) {
  if (v == original) return;
  for (const auto& existing : out) {
    if (existing == v) return;
  }
  out.push_back(std::move(v));
}

Moves value_moves(const Value& v) {
  Moves m;
  switch (v.data.index()) {
    case 0: {
      std::int64_t n = v.as_int();
      if (n == 0) break;
      push_distinct(m.early, v, Value::Int(0));
      push_distinct(m.early, v, Value::Int(n / 2));
      // n - n/4, n - n/8, ...: lets a predicate with a threshold be
      // approached by bisection rather than one step at a time.
      for (std::int64_t d = n / 4; d >= 2 || d <= -2; d /= 2) {
        push_distinct(m.early, v, Value::Int(n - d));
      }
      push_distinct(m.early, v, Value::Int(n > 0 ? n - 1 : n + 1));
      break;
    }
    case 1: {
      double x = v.as_float();
      if (std::isnan(x)) {
        m.late.push_back(Value::Float(0.0));
        break;
      }
      if (x == 0.0) break;
      push_distinct(m.early, v, Value::Float(0.0));
      // Sign-sensitive predicates (signbit, 1/x) can keep -0.0 but not 0.0.
      if (x < 0) push_distinct(m.early, v, Value::Float(-0.0));
      push_distinct(m.early, v, Value::Float(1.0));
      if (x < 0) push_distinct(m.early, v, Value::Float(-1.0));
      if (std::isfinite(x)) {
        // Halving only whole numbers keeps results readable; halving 3.7
        // forever walks down to 2^-k, which the text tiebreak prefers.
        double t = std::trunc(x);
        if (t != x) {
          push_distinct(m.early, v, Value::Float(t));
        } else {
          if (std::fabs(x) >= 2.0) push_distinct(m.early, v, Value::Float(std::trunc(x / 2)));
          for (double d = std::trunc(x / 4); std::fabs(d) >= 2.0; d = std::trunc(d / 2)) {
            push_distinct(m.early, v, Value::Float(x - d));
          }
          push_distinct(m.early, v, Value::Float(x > 0 ? x - 1.0 : x + 1.0));
        }
      }
      break;
    }
    case 2:
      if (v.as_bool()) m.early.push_back(Value::Bool(false));
      break;
    case 3: {
      const auto& s = v.as_str();
      if (s.empty()) break;
      push_distinct(m.early, v, Value::Str(s.substr(0, s.size() / 2)));
      for (std::size_t i = 0; i < s.size(); ++i) {
        push_distinct(m.early, v, Value::Str(s.substr(0, i) + s.substr(i + 1)));
      }
      break;
    }
    default: {
      const auto& list = v.as_list();
      const auto& items = list.items;
      if (items.empty()) break;
      // Straight to [] first: from [a, b] halving and removal only reach
      // singletons, which may not keep when [] does.
      if (items.size() >= 2) push_distinct(m.early, v, Value::List(list.elem));
      push_distinct(m.early, v,
                    Value::List(list.elem, std::vector<Value>(
                                               items.begin(),
                                               items.begin() + items.size() / 2)));
      for (std::size_t i = 0; i < items.size(); ++i) {
        Value removed = v;
        auto& r = removed.as_list().items;
        r.erase(r.begin() + static_cast<std::ptrdiff_t>(i));
        push_distinct(m.early, v, std::move(removed));
      }
      for (std::size_t i = 0; i < items.size(); ++i) {
        Moves inner = value_moves(items[i]);
        for (auto* bucket : {&inner.early, &inner.late}) {
          auto& dest = bucket == &inner.early ? m.early : m.late;
          for (auto& rep : *bucket) {
            Value replaced = v;
            replaced.as_list().items[i] = std::move(rep);
            dest.push_back(std::move(replaced));
          }
        }
      }
    }
  }
  return m;
}

std::vector<std::vector<Value>> tuple_moves(const std::vector<Value>& args) {
  std::vector<std::vector<Value>> early, late;
  for (std::size_t i = 0; i < args.size(); ++i) {
    Moves m = value_moves(args[i]);
    for (auto& v : m.early) {
      auto t = args;
      t[i] = std::move(v);
      early.push_back(std::move(t));
    }
    for (auto& v : m.late) {
      auto t = args;
      t[i] = std::move(v);
      late.push_back(std::move(t));
    }
  }
  early.insert(early.end(), std::make_move_iterator(late.begin()),
               std::make_move_iterator(late.end()));
  return early;
}

}  // namespace

std::vector<Value> shrink(std::vector<Value> args, const KeepFn& keep,
                          std::size_t budget) {
  SizeScore current = inputgen::size(args);
  for (;;) {
    bool improved = false;
    for (auto& cand : tuple_moves(args)) {
      SizeScore s = inputgen::size(cand);
      if (!(s < current)) continue;
      if (budget == 0) return args;
      --budget;
      if (keep(cand)) {
        args = std::move(cand);
        current = std::move(s);
        improved = true;
        break;
      }
    }
    if (!improved) return args;
  }
}

}  // namespace disambig::inputgen
