#include <gtest/gtest.h>

#include "lexp/lexp.hpp"

namespace {

using namespace lexp;

Term P(const char* s) { return parse_term(s); }
InterType I(const char* s) { return parse_inter_type(s); }

TEST(Infer, SelfApplicationKeepsOccurrenceOrder) {
  for (Flavor f : {Flavor::ACI, Flavor::AC, Flavor::A}) {
    InferResult r = infer(P("\\x. x x"), f);
    ASSERT_TRUE(r.typable());
    // Sequence equality: the domain lists the inner occurrences left to right.
    EXPECT_TRUE(equivalent_up_to_renaming(r.derivation->type, I("(a -> b) & a -> b"), Flavor::A) ||
                equivalent_up_to_renaming(r.derivation->type, I("a & (a -> b) -> b"), Flavor::A))
        << render(r.derivation->type);
    EXPECT_TRUE(equivalent_up_to_renaming(normalize(r.derivation->type, f), I("(a & (a -> b)) -> b"), Flavor::AC));
    EXPECT_TRUE(check_inter(*r.derivation).ok);
  }
}

TEST(Infer, TwiceIdentity) {
  InferResult r = infer(P("(\\x. x x) (\\x. x)"), Flavor::ACI);
  ASSERT_TRUE(r.typable());
  EXPECT_TRUE(equivalent_up_to_renaming(r.derivation->type, I("a -> a"), Flavor::ACI));
  EXPECT_TRUE(r.derivation->env.empty());
}

TEST(Infer, OmegaRunsOutOfFuel) {
  InferResult r = infer(P("(\\x. x x) (\\x. x x)"), Flavor::ACI, 200);
  EXPECT_FALSE(r.typable());
  EXPECT_GE(r.steps, 200u);
}

TEST(Infer, ErasingRedexWithOpenBody) {
  InferResult r = infer(P("\\x. (\\y. z) x x"), Flavor::AC);
  ASSERT_TRUE(r.typable());
  const InterType& t = r.derivation->type;
  ASSERT_FALSE(t.is_var());
  EXPECT_EQ(t.dom().size(), 2u);
  ASSERT_EQ(r.derivation->env.count("z"), 1u);
  EXPECT_EQ(r.derivation->env.at("z").size(), 1u);
  EXPECT_TRUE(check_inter(*r.derivation).ok);
}

TEST(Infer, AllClosedSmallTermsCheck) {
  for (const Term& t : enumerate_terms(6, true)) {
    for (Flavor f : {Flavor::ACI, Flavor::AC, Flavor::A}) {
      InferResult r = infer(t, f, 2000);
      if (!r.typable()) continue;
      auto c = check_inter(*r.derivation);
      EXPECT_TRUE(c.ok) << render(t) << ": " << c.diagnostic;
      EXPECT_TRUE(alpha_eq(r.derivation->subject, t));
      EXPECT_FALSE(reduce(t, Strategy::Leftmost, 2000).exhausted()) << render(t);
    }
  }
}

TEST(Infer, CurryTypableImpliesIntersectionTypable) {
  for (const Term& t : enumerate_terms(6, false)) {
    if (infer_curry(t)) {
      EXPECT_TRUE(infer(t, Flavor::ACI).typable()) << render(t);
    }
  }
}

TEST(SubjectReduction, ErasingStepShrinksTheDomain) {
  InferResult r = infer(P("\\x. (\\y. x) x"), Flavor::AC);
  ASSERT_TRUE(r.typable());
  ASSERT_EQ(r.derivation->type.dom().size(), 2u);
  auto next = subject_reduce(*r.derivation, {Step::Under});
  ASSERT_TRUE(next);
  EXPECT_EQ(next->type.dom().size(), 1u);
  EXPECT_TRUE(check_inter(*next).ok);
}

TEST(Check, RejectsWrongEnvironment) {
  InferResult r = infer(P("\\x. x x"), Flavor::A);
  ASSERT_TRUE(r.typable());
  InterDerivation bad = *r.derivation;
  bad.type = I("a -> a");
  EXPECT_FALSE(check_inter(bad).ok);
}

TEST(SubjectReduction, PreservesTypeOnLambdaI) {
  for (const Term& t : enumerate_terms(6, true)) {
    if (!classify(t).is_lambdaI) continue;
    InferResult r = infer(t, Flavor::AC, 2000);
    if (!r.typable()) continue;
    for (const auto& p : redex_positions(t)) {
      auto next = subject_reduce(*r.derivation, p);
      ASSERT_TRUE(next) << render(t);
      EXPECT_TRUE(inter_eq(next->type, r.derivation->type, Flavor::AC)) << render(t);
      EXPECT_TRUE(check_inter(*next).ok) << render(t);
      EXPECT_TRUE(alpha_eq(next->subject, beta_step(t, p)));
    }
  }
}

}  // namespace
