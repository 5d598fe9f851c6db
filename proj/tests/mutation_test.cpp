#include <set>

#include <gtest/gtest.h>

#include "disambig/minifn/printer.hpp"
#include "disambig/mutation.hpp"
#include "support.hpp"

namespace disambig::mutation {
namespace {

using testing::checked;

constexpr const char* kRaising = R"(fn first_nonzero(nums: List[Float]) -> Float {
    for num in nums {
        if num != 0.0 {
            return num;
        }
    }
    raise("No non-zero numbers in the list");
}
)";

TEST(Operators, TableAndNames) {
  EXPECT_EQ(operator_table().size(), 5u);
  for (const auto& op : operator_table()) {
    EXPECT_EQ(parse_operator(op.name), op.id);
    EXPECT_EQ(to_string(op.id), op.name);
    EXPECT_FALSE(op.description.empty());
  }
  EXPECT_FALSE(parse_operator("XYZ").has_value());
}

TEST(Rewrite, ArithmeticAndRelational) {
  auto add = minifn::Expr::binary(minifn::BinaryOp::Add, minifn::Expr::var("a"),
                                  minifn::Expr::var("b"));
  auto out = rewrite(OperatorId::AOR, add);
  ASSERT_EQ(out.size(), 4u);
  for (const auto& e : out) EXPECT_NE(e.binary_op, minifn::BinaryOp::Add);
  EXPECT_TRUE(rewrite(OperatorId::ROR, add).empty());

  auto lt = minifn::Expr::binary(minifn::BinaryOp::Lt, minifn::Expr::var("a"),
                                 minifn::Expr::var("b"));
  EXPECT_EQ(rewrite(OperatorId::ROR, lt).size(), 5u);
  auto conj = minifn::Expr::binary(minifn::BinaryOp::And, lt, lt);
  auto cor = rewrite(OperatorId::COR, conj);
  ASSERT_EQ(cor.size(), 1u);
  EXPECT_EQ(cor[0].binary_op, minifn::BinaryOp::Or);
}

TEST(Rewrite, Constants) {
  auto seven = rewrite(OperatorId::CRP, minifn::Expr::int_lit(7));
  std::set<std::int64_t> ints;
  for (const auto& e : seven) ints.insert(e.int_value);
  EXPECT_EQ(ints, (std::set<std::int64_t>{0, 1, 8}));
  EXPECT_EQ(rewrite(OperatorId::CRP, minifn::Expr::int_lit(0)).size(), 1u);  // 0 + 1 == 1
  EXPECT_EQ(rewrite(OperatorId::CRP, minifn::Expr::float_lit(0.0)).size(), 1u);
  EXPECT_EQ(rewrite(OperatorId::CRP, minifn::Expr::str_lit("x")).size(), 1u);
  EXPECT_TRUE(rewrite(OperatorId::CRP, minifn::Expr::str_lit("")).empty());
}

TEST(ReturnDefault, SkipsValuesAlreadyDefault) {
  EXPECT_TRUE(return_default(minifn::Expr::var("x"), minifn::Type::Float()).has_value());
  EXPECT_FALSE(return_default(minifn::Expr::float_lit(0.0), minifn::Type::Float()).has_value());
}

TEST(MutateAll, RaisingFirstNonzero) {
  auto parent = checked(kRaising);
  auto mutants = mutate_all(parent);
  EXPECT_GE(mutants.size(), 8u);
  std::set<std::string> texts;
  std::set<OperatorId> ops;
  for (auto m : mutants) {
    EXPECT_TRUE(minifn::typechecks(m.def));
    EXPECT_EQ(testing::differing_sites(parent, m.def), 1) << minifn::print(m.def);
    texts.insert(minifn::print(m.def));
    ops.insert(m.op);
  }
  EXPECT_EQ(texts.size(), mutants.size());
  EXPECT_FALSE(texts.count(minifn::print(parent)));
  EXPECT_TRUE(ops.count(OperatorId::ROR));
  EXPECT_TRUE(ops.count(OperatorId::RVR));
  EXPECT_TRUE(ops.count(OperatorId::CRP));
}

TEST(MutateAll, KeepsTypesValid) {
  // `%` on strings and `<` between lists would not typecheck, so those
  // rewrites must be dropped rather than emitted.
  auto parent = checked(R"(fn f(s: Str, xs: List[Int]) -> Bool {
    let t = s + "x";
    return len(t) > len(xs) and xs == xs;
}
)");
  for (auto m : mutate_all(parent)) EXPECT_TRUE(minifn::typechecks(m.def));
}

TEST(MutateAll, CapAndOrder) {
  auto parent = checked(kRaising);
  auto all = mutate_all(parent, 1000);
  auto few = mutate_all(parent, 3);
  ASSERT_EQ(few.size(), 3u);
  for (std::size_t i = 0; i < few.size(); ++i) {
    EXPECT_EQ(minifn::print(few[i].def), minifn::print(all[i].def));
  }
  auto again = mutate_all(parent, 1000);
  ASSERT_EQ(again.size(), all.size());
  for (std::size_t i = 0; i < all.size(); ++i) {
    EXPECT_EQ(minifn::print(again[i].def), minifn::print(all[i].def));
    EXPECT_EQ(again[i].site, all[i].site);
  }
}

}  // namespace
}  // namespace disambig::mutation
