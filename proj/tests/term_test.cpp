#include <gtest/gtest.h>

#include "lexp/lexp.hpp"

namespace {

using namespace lexp;

Term v(const char* x) { return Term::var(x); }
Term lam(const char* x, const Term& b) { return Term::abs(x, b); }
Term ap(const Term& f, const Term& a) { return Term::app(f, a); }

TEST(FreeVars, FirstOccurrenceOrder) {
  Term t = ap(lam("x", ap(v("x"), v("z2"))), v("z1"));
  EXPECT_EQ(free_vars(t), (std::vector<std::string>{"z2", "z1"}));
  EXPECT_TRUE(free_vars(lam("x", v("x"))).empty());
  Term cex = lam("x", ap(ap(lam("y", v("z")), v("x")), v("x")));
  EXPECT_EQ(free_vars(cex), (std::vector<std::string>{"z"}));
}

TEST(FreeVars, CountsOccurrences) {
  EXPECT_EQ(count_free_occurrences(ap(v("x"), v("x")), "x"), 2u);
  EXPECT_EQ(count_free_occurrences(lam("x", v("x")), "x"), 0u);
  EXPECT_EQ(count_free_occurrences(ap(v("y"), lam("x", v("y"))), "y"), 2u);
}

TEST(Substitution, AvoidsCapture) {
  Term t = lam("y", ap(v("x"), v("y")));
  Term r = substitute(t, "x", v("y"));
  ASSERT_TRUE(r.is_abs());
  EXPECT_NE(r.name(), "y");
  EXPECT_TRUE(alpha_eq(r, lam("w", ap(v("y"), v("w")))));
}

TEST(Substitution, DuplicatesArgument) {
  Term id = lam("x", v("x"));
  Term r = substitute(ap(v("x"), v("x")), "x", id);
  EXPECT_TRUE(alpha_eq(r, ap(id, id)));
}

TEST(Substitution, SimultaneousRejectsDuplicates) {
  EXPECT_THROW(simultaneous_substitute(v("x"), {{"x", v("a")}, {"x", v("b")}}), DuplicateBinder);
  Term r = simultaneous_substitute(ap(v("x"), v("y")), {{"x", v("b")}, {"y", v("a")}});
  EXPECT_TRUE(alpha_eq(r, ap(v("b"), v("a"))));
}

TEST(Canonicalize, Barendregt) {
  Term t = ap(lam("x", ap(v("x"), v("x"))), lam("x", v("x")));
  Term c = canonicalize(t);
  EXPECT_TRUE(is_canonical(c));
  EXPECT_FALSE(is_canonical(t));
  EXPECT_TRUE(alpha_eq(c, t));
  Term clash = ap(lam("z", v("z")), v("z"));
  EXPECT_TRUE(is_canonical(canonicalize(clash)));
  EXPECT_EQ(free_vars(canonicalize(clash)), std::vector<std::string>{"z"});
}

TEST(Alpha, Equality) {
  EXPECT_TRUE(alpha_eq(lam("x", v("x")), lam("y", v("y"))));
  EXPECT_FALSE(alpha_eq(lam("x", v("z")), lam("y", v("y"))));
  EXPECT_FALSE(alpha_eq(v("a"), v("b")));
  auto m = alpha_eq_modulo_free(ap(v("a"), v("b")), ap(v("c"), v("d")));
  ASSERT_TRUE(m);
  EXPECT_EQ(m->at("a"), "c");
}

TEST(Classify, Examples) {
  auto k = classify(lam("x", ap(v("x"), v("x"))));
  EXPECT_TRUE(k.is_lambdaI);
  EXPECT_FALSE(k.is_affine);
  EXPECT_FALSE(k.is_linear);
  auto k2 = classify(lam("x", lam("y", v("x"))));
  EXPECT_FALSE(k2.is_lambdaI);
  EXPECT_TRUE(k2.is_affine);
  auto k3 = classify(ap(lam("x", v("x")), v("z")));
  EXPECT_TRUE(k3.is_linear);
  EXPECT_FALSE(classify(ap(v("z"), v("z"))).is_affine);
}

TEST(Paths, ReplaceAndContext) {
  Term t = lam("x", ap(v("x"), v("y")));
  Path p{Step::Under, Step::Right};
  ASSERT_TRUE(subterm_at(t, p));
  EXPECT_EQ(subterm_at(t, p)->name(), "y");
  Term r = replace_at(t, p, v("q"));
  EXPECT_TRUE(alpha_eq(r, lam("x", ap(v("x"), v("q")))));
  EXPECT_TRUE(alpha_eq(OneHoleContext::at(t, p).plug(v("q")), r));
  EXPECT_FALSE(subterm_at(t, {Step::Left}));
}

TEST(Fresh, IndexedNames) {
  FreshSupply s(ap(v("x1"), v("x")));
  EXPECT_EQ(s.fresh("x"), "x2");
  EXPECT_EQ(s.fresh("x"), "x3");
  EXPECT_EQ(s.fresh("f"), "f1");
}

// Closed terms: c(1,k) = k, c(n,k) = c(n-1,k+1) + sum c(i,k) c(n-1-i,k).
std::size_t closed_count(std::size_t n, std::size_t k) {
  if (n == 0) return 0;
  if (n == 1) return k;
  std::size_t total = closed_count(n - 1, k + 1);
  for (std::size_t i = 1; i + 1 < n; ++i) total += closed_count(i, k) * closed_count(n - 1 - i, k);
  return total;
}

// Terms with k binders in scope and exactly f free-occurrence holes.
std::size_t holes(std::size_t n, std::size_t k, std::size_t f) {
  if (n == 0) return 0;
  if (n == 1) return f == 0 ? k : f == 1 ? 1 : 0;
  std::size_t total = holes(n - 1, k + 1, f);
  for (std::size_t i = 1; i + 1 < n; ++i)
    for (std::size_t g = 0; g <= f; ++g) total += holes(i, k, g) * holes(n - 1 - i, k, f - g);
  return total;
}

std::size_t bell(std::size_t n) {
  std::vector<std::vector<std::size_t>> tri{{1}};
  for (std::size_t i = 1; i <= n; ++i) {
    std::vector<std::size_t> row{tri.back().back()};
    for (std::size_t j = 0; j < i; ++j) row.push_back(row.back() + tri.back()[j]);
    tri.push_back(row);
  }
  return tri[n][0];
}

TEST(Enumerate, ClosedCountsMatchRecursion) {
  for (std::size_t n = 1; n <= 8; ++n) {
    std::size_t expect = 0;
    for (std::size_t m = 1; m <= n; ++m) expect += closed_count(m, 0);
    EXPECT_EQ(enumerate_terms(n, true).size(), expect) << "size " << n;
  }
}

TEST(Enumerate, OpenCountsMatchPartitionOracle) {
  for (std::size_t n = 1; n <= 7; ++n) {
    std::size_t expect = 0;
    for (std::size_t m = 1; m <= n; ++m)
      for (std::size_t f = 0; f <= m; ++f) expect += holes(m, 0, f) * bell(f);
    EXPECT_EQ(enumerate_terms(n, false).size(), expect) << "size " << n;
  }
}

TEST(Enumerate, DistinctUpToRenaming) {
  auto ts = enumerate_terms(6, false);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    EXPECT_LE(ts[i].size(), 6u);
    EXPECT_TRUE(is_canonical(ts[i])) << render(ts[i]);
    for (std::size_t j = i + 1; j < ts.size(); ++j)
      EXPECT_FALSE(alpha_eq_modulo_free(ts[i], ts[j])) << render(ts[i]) << " vs " << render(ts[j]);
  }
}

TEST(Enumerate, CapIsEnforced) { EXPECT_THROW(enumerate_terms(10, true), CapExceeded); }

}  // namespace
