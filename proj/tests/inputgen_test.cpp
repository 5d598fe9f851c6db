#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "disambig/inputgen.hpp"
#include "disambig/minifn/parser.hpp"

namespace disambig::inputgen {
namespace {

const Type kListFloat = Type::List(Type::Float());
const Type kListInt = Type::List(Type::Int());

std::vector<Value> one(Value v) { return {std::move(v)}; }

TEST(Config, Validates) {
  GenConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.special_value_bias = 1.5;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = GenConfig{};
  cfg.trials_per_target = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = GenConfig{};
  cfg.int_min = 3;
  cfg.int_max = 2;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(SpecialValues, Pools) {
  EXPECT_EQ(special_values(Type::Int()).size(), 5u);
  EXPECT_EQ(special_values(Type::Float()).size(), 7u);
  EXPECT_EQ(special_values(Type::Bool()).size(), 2u);
  auto strs = special_values(Type::Str());
  ASSERT_EQ(strs.size(), 3u);
  EXPECT_EQ(strs[0].as_str(), "");
  auto lists = special_values(kListFloat);
  ASSERT_EQ(lists.size(), 8u);
  EXPECT_TRUE(lists[0].as_list().items.empty());
  bool has_nan_singleton = false;
  for (const auto& l : lists) {
    const auto& items = l.as_list().items;
    if (items.size() == 1 && std::isnan(items[0].as_float())) has_nan_singleton = true;
  }
  EXPECT_TRUE(has_nan_singleton);
}

TEST(Generate, DeterministicAndWellTyped) {
  GenConfig cfg;
  cfg.seed = 42;
  const Type nested = Type::List(Type::List(Type::Str()));
  for (std::uint64_t pos = 0; pos < 300; ++pos) {
    for (const auto& ty : {Type::Int(), Type::Float(), Type::Str(), kListFloat, nested}) {
      auto a = generate(ty, cfg, pos);
      EXPECT_EQ(a, generate(ty, cfg, pos));
      EXPECT_TRUE(minifn::conforms(a, ty));
      if (ty == Type::Int()) {
        bool in_range = a.as_int() >= cfg.int_min && a.as_int() <= cfg.int_max;
        bool special = false;
        for (const auto& s : special_values(ty)) special = special || s == a;
        EXPECT_TRUE(in_range || special) << a.as_int();
      }
      if (ty.is_list()) EXPECT_LE(a.as_list().items.size(), cfg.max_list_len);
      if (ty == Type::Str()) EXPECT_LE(a.as_str().size(), cfg.max_str_len);
    }
  }
}

TEST(Generate, SeedChangesTheStream) {
  GenConfig a, b;
  a.seed = 1;
  b.seed = 2;
  int same = 0;
  for (std::uint64_t pos = 0; pos < 50; ++pos) {
    same += generate(kListInt, a, pos) == generate(kListInt, b, pos);
  }
  EXPECT_LT(same, 25);
}

TEST(Generate, EmptyAndNanListsAreReachable) {
  // Per draw, [] is at least bias/|pool| likely, so 200 draws miss it with
  // probability below (1 - 0.25/8)^200 < 0.2%; check across fixed seeds.
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    GenConfig cfg;
    cfg.seed = seed;
    bool empty = false, nan = false;
    for (std::uint64_t pos = 0; pos < cfg.trials_per_target; ++pos) {
      auto v = generate(kListFloat, cfg, pos);
      const auto& items = v.as_list().items;
      empty = empty || items.empty();
      nan = nan || (items.size() == 1 && std::isnan(items[0].as_float()));
    }
    EXPECT_TRUE(empty) << "seed " << seed;
    EXPECT_TRUE(nan) << "seed " << seed;
  }
}

TEST(Size, OrdersBySizeThenText) {
  auto s_empty = inputgen::size(one(Value::List(Type::Float())));
  auto s_zero = inputgen::size(one(minifn::parse_value("[0.0]", kListFloat)));
  auto s_big = inputgen::size(one(minifn::parse_value("[3.7, 1.0]", kListFloat)));
  EXPECT_LT(s_empty, s_zero);
  EXPECT_LT(s_zero, s_big);
  EXPECT_LT(value_size(Value::Int(1)), value_size(Value::Int(1000)));
  EXPECT_EQ(value_size(Value::Int(-5)), value_size(Value::Int(5)));
  EXPECT_LT(value_size(Value::Str("")), value_size(Value::Str("ab")));
  EXPECT_EQ(inputgen::size(one(Value::Int(2))), inputgen::size(one(Value::Int(2))));
}

TEST(EnumerateDomain, SmallListSpace) {
  GenConfig cfg;
  cfg.int_min = -2;
  cfg.int_max = 2;
  cfg.max_list_len = 2;
  std::vector<Type> types{kListInt};
  auto dom = enumerate_domain(types, cfg, 1000);
  ASSERT_TRUE(dom.has_value());
  // Elements: -2..2 plus the max and min specials = 7; lists of length 0..2.
  EXPECT_EQ(dom->size(), 1u + 7u + 49u);
  std::set<std::string> distinct;
  for (const auto& args : *dom) distinct.insert(minifn::args_literal(args));
  EXPECT_EQ(distinct.size(), dom->size());
  EXPECT_FALSE(enumerate_domain(types, cfg, 56).has_value());
  std::vector<Type> floats{Type::Float()};
  EXPECT_FALSE(enumerate_domain(floats, cfg, 100000).has_value());
}

TEST(Shrink, KeepsThePredicateAndNeverGrows) {
  GenConfig cfg;
  cfg.seed = 9;
  for (std::uint64_t pos = 0; pos < 100; ++pos) {
    auto args = one(generate(kListInt, cfg, pos));
    auto keep = [](const std::vector<Value>& a) {
      std::int64_t sum = 0;
      for (const auto& x : a[0].as_list().items) sum += x.as_int() > 0 ? 1 : 0;
      return sum >= 2;
    };
    if (!keep(args)) continue;
    auto out = shrink(args, keep);
    EXPECT_TRUE(keep(out));
    EXPECT_LE(size(out), size(args));
    EXPECT_EQ(minifn::args_literal(out), "[1, 1]");
  }
}

TEST(Shrink, EmptyListWitnessShrinksToEmpty) {
  auto args = one(minifn::parse_value("[0.0, 0.0, -0.0]", kListFloat));
  auto keep = [](const std::vector<Value>& a) {
    for (const auto& x : a[0].as_list().items) {
      if (x.as_float() != 0.0) return false;
    }
    return true;
  };
  EXPECT_EQ(minifn::args_literal(shrink(args, keep)), "[]");
}

TEST(Shrink, ThresholdsAreFoundByBisection) {
  std::size_t calls = 0;
  auto keep = [&](const std::vector<Value>& a) {
    ++calls;
    return a[0].as_int() >= 76911;
  };
  auto out = shrink(one(Value::Int(std::numeric_limits<std::int64_t>::max())), keep, 10000);
  EXPECT_EQ(out[0].as_int(), 76911);
  EXPECT_LT(calls, 2000u);
}

TEST(Shrink, NanIsReplacedLast) {
  auto args = one(minifn::parse_value("[5.5, nan]", kListFloat));
  auto keep = [](const std::vector<Value>& a) {
    for (const auto& x : a[0].as_list().items) {
      if (std::isnan(x.as_float())) return true;
    }
    return false;
  };
  EXPECT_EQ(minifn::args_literal(shrink(args, keep)), "[nan]");
}

TEST(Shrink, JumpsToEmptyWhenNoSingletonKeeps) {
  auto args = one(minifn::parse_value("[3.7, -2.5]", kListFloat));
  auto keep = [](const std::vector<Value>& a) { return a[0].as_list().items.size() != 1; };
  EXPECT_EQ(minifn::args_literal(shrink(args, keep)), "[]");
}

TEST(Shrink, NegativeZeroForSignSensitiveKeeps) {
  auto args = one(minifn::parse_value("[-2.5]", kListFloat));
  auto keep = [](const std::vector<Value>& a) {
    const auto& items = a[0].as_list().items;
    return !items.empty() && std::signbit(items[0].as_float());
  };
  EXPECT_EQ(minifn::args_literal(shrink(args, keep)), "[-0.0]");
}

TEST(Shrink, NoSmallerValueLeavesItAlone) {
  const Type nested = Type::List(kListInt);
  auto args = one(minifn::parse_value("[[]]", nested));
  auto nonempty = [](const std::vector<Value>& a) { return !a[0].as_list().items.empty(); };
  EXPECT_EQ(shrink(args, nonempty).at(0), args[0]);
  auto zero = one(Value::Int(0));
  EXPECT_EQ(shrink(zero, [](const auto&) { return true; }).at(0), Value::Int(0));
}

TEST(Shrink, RespectsTheBudget) {
  std::size_t calls = 0;
  auto keep = [&](const std::vector<Value>& a) {
    ++calls;
    return a[0].as_int() > 100;
  };
  shrink(one(Value::Int(1 << 30)), keep, 5);
  EXPECT_LE(calls, 5u);
}

TEST(Shrink, FloatsStayReadable) {
  auto args = one(minifn::parse_value("[-3.14]", kListFloat));
  auto keep = [](const std::vector<Value>& a) {
    const auto& items = a[0].as_list().items;
    return !items.empty() && items[0].as_float() < 0;
  };
  EXPECT_EQ(minifn::args_literal(shrink(args, keep)), "[-1.0]");
}

}  // namespace
}  // namespace disambig::inputgen
