#include <gtest/gtest.h>

#include "lexp/lexp.hpp"

namespace {

using namespace lexp;

Term P(const char* s) { return parse_term(s); }

TEST(Redexes, LeftmostOutermostFirst) {
  Term t = P("(\\x. (\\y. y) x) ((\\z. z) w)");
  auto ps = redex_positions(t);
  ASSERT_EQ(ps.size(), 3u);
  EXPECT_TRUE(ps.front().empty());
  EXPECT_FALSE(is_normal_form(t));
  EXPECT_TRUE(is_normal_form(P("\\x. x")));
}

TEST(BetaStep, Root) {
  EXPECT_TRUE(alpha_eq(beta_step(P("(\\x. x x) (\\x. x)"), {}), P("(\\x. x) (\\y. y)")));
  EXPECT_THROW(beta_step(P("x y"), {}), NotARedex);
}

TEST(BetaStep, UnderBinder) {
  Term t = P("\\x. (\\y. z) x x");
  Term r = beta_step(t, {Step::Under, Step::Left});
  EXPECT_TRUE(alpha_eq(r, P("\\x. z x")));
}

TEST(WeakHead, StopsAtAbstraction) {
  EXPECT_FALSE(weak_head_position(P("\\x. (\\y. z) x x")));
  auto s = weak_head_step(P("(\\x. x) y z"));
  ASSERT_TRUE(s);
  EXPECT_TRUE(alpha_eq(s->first, P("y z")));
  EXPECT_FALSE(weak_head_position(P("x ((\\y. y) z)")));
}

TEST(Reduce, IdentityTwiceTakesTwoSteps) {
  auto r = reduce(P("(\\x. x x) (\\x. x)"), Strategy::Leftmost, 10);
  ASSERT_TRUE(std::holds_alternative<NormalForm>(r.outcome));
  EXPECT_TRUE(alpha_eq(std::get<NormalForm>(r.outcome).term, P("\\x. x")));
  EXPECT_EQ(r.trace.steps.size(), 2u);
  EXPECT_TRUE(replay_trace(r.trace));
}

TEST(Reduce, OmegaExhaustsFuel) {
  auto r = reduce(P("(\\x. x x) (\\x. x x)"), Strategy::Leftmost, 50);
  EXPECT_TRUE(r.exhausted());
  EXPECT_EQ(r.trace.steps.size(), 50u);
  EXPECT_TRUE(alpha_eq(r.trace.last(), r.trace.start));
}

TEST(Reduce, WeakHeadNormalForm) {
  auto r = reduce(P("(\\x. \\y. x) ((\\z. z) w)"), Strategy::WeakHead, 10);
  ASSERT_TRUE(std::holds_alternative<WeakHeadNF>(r.outcome));
  EXPECT_TRUE(alpha_eq(r.trace.last(), P("\\y. (\\z. z) w")));
  EXPECT_TRUE(replay_trace(r.trace));
}

TEST(Reduce, LeftmostNormalizesWhenNormalFormExists) {
  auto r = reduce(P("(\\x. \\y. y) ((\\x. x x) (\\x. x x))"), Strategy::Leftmost, 10);
  ASSERT_TRUE(std::holds_alternative<NormalForm>(r.outcome));
  EXPECT_EQ(r.trace.steps.size(), 1u);
}

TEST(Longest, ExploresAllChoices) {
  // Leftmost takes one step; contracting the argument first takes two.
  Term t = P("(\\x. \\y. y) ((\\z. z) w)");
  auto n = longest_reduction(t, 10);
  ASSERT_TRUE(n);
  EXPECT_EQ(*n, 2u);
  EXPECT_FALSE(longest_reduction(P("(\\x. x x) (\\x. x x)"), 20));
}

}  // namespace
