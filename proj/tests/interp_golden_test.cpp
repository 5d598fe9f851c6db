#include <gtest/gtest.h>

#include "disambig/minifn/interp.hpp"
#include "support.hpp"

namespace disambig::minifn {
namespace {

class Golden : public ::testing::TestWithParam<testing::GoldenProgram> {};

TEST_P(Golden, MatchesRecordedOutcomes) {
  const auto& g = GetParam();
  auto def = testing::checked(g.source);
  ASSERT_FALSE(g.calls.empty());
  std::vector<Type> types;
  for (const auto& p : def.params) types.push_back(p.type);
  for (const auto& call : g.calls) {
    auto args = parse_values(call.args, types);
    EXPECT_EQ(eval_call(def, args, g.fuel).describe(), call.expected) << "(" << call.args << ")";
  }
}

INSTANTIATE_TEST_SUITE_P(Suite, Golden, ::testing::ValuesIn(testing::load_golden()),
                         [](const auto& info) { return info.param.name; });

TEST(GoldenSuite, HasEnoughPrograms) { EXPECT_GE(testing::load_golden().size(), 40u); }

}  // namespace
}  // namespace disambig::minifn
