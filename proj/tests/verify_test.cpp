#include <gtest/gtest.h>

#include <set>

#include "lexp/lexp.hpp"

namespace {

using namespace lexp;

TEST(Registry, IdsAreUniqueAndKnown) {
  auto ids = property_ids();
  std::set<std::string> seen(ids.begin(), ids.end());
  EXPECT_EQ(seen.size(), ids.size());
  for (const char* id : {"Affine", "LinearTerms", "sn", "type_exp1", "type_exp2", "times", "occur", "exp_types",
                         "orderexp", "sub_sub", "subst", "tfive", "t5", "red", "LinearI", "icalculus", "dist_e", "dist_l"})
    EXPECT_TRUE(seen.count(id)) << id;
  for (const auto& p : properties()) EXPECT_NE(!p.per_term, !p.per_environment) << p.id;
  EXPECT_FALSE(find_property("nope"));
  EXPECT_THROW(run_matrix(golden_corpus(), {"nope"}, 100), Error);
}

TEST(Matrix, GoldenCorpusHasNoFailures) {
  auto reports = run_matrix(golden_corpus(), property_ids(), kDefaultFuel);
  for (const auto& r : reports) {
    EXPECT_TRUE(r.ok()) << r.id;
    EXPECT_EQ(r.instances.size(), r.id == "dist_e" || r.id == "dist_l" ? environment_pairs().size() : golden_corpus().terms.size());
  }
}

TEST(Matrix, ClosedTermsHaveNoFailures) {
  Corpus c{"closed:6", enumerate_terms(6, true)};
  std::vector<std::string> ids;
  for (const auto& id : property_ids())
    if (id != "dist_e" && id != "dist_l") ids.push_back(id);
  for (const auto& r : run_matrix(c, ids, kDefaultFuel)) EXPECT_TRUE(r.ok()) << r.id << "\n" << summary_table({r});
}

TEST(Matrix, OccurrenceBoundCounterexample) {
  Corpus c{"cex", {parse_term("(\\x. x x) z")}};
  auto reports = run_matrix(c, {"times", "occur"}, kDefaultFuel);
  ASSERT_EQ(reports.size(), 2u);
  for (const auto& r : reports) EXPECT_EQ(r.count(Outcome::Fail), 1u) << r.id;
}

TEST(Matrix, ErasingStepIsAnExpectedFailure) {
  Corpus c{"cex", {parse_term("\\x. (\\y. z) x x")}};
  auto reports = run_matrix(c, {"beta-unrestricted"}, kDefaultFuel);
  EXPECT_EQ(reports.at(0).count(Outcome::ExpectedFailure), 1u);
  EXPECT_TRUE(reports.at(0).ok());
}

TEST(Matrix, Deterministic) {
  Corpus c{"open:5", enumerate_terms(5, false)};
  auto a = to_json(run_matrix(c, property_ids(), kDefaultFuel)).dump();
  auto b = to_json(run_matrix(c, property_ids(), kDefaultFuel)).dump();
  EXPECT_EQ(a, b);
}

TEST(Corpus, Specs) {
  EXPECT_EQ(corpus_from_spec("closed:4")->terms.size(), 7u);
  EXPECT_EQ(corpus_from_spec("golden")->terms.size(), golden_sources().size());
  EXPECT_FALSE(corpus_from_spec("closed:"));
  EXPECT_FALSE(corpus_from_spec("some/file.txt"));
  Corpus lin = filter_corpus(*corpus_from_spec("open:5"), CorpusFilter::Linear);
  for (const auto& t : lin.terms) EXPECT_TRUE(classify(t).is_linear);
}

TEST(Environments, StratifiedPairs) {
  EXPECT_EQ(small_intersections().size(), 40u);
  auto pairs = environment_pairs();
  EXPECT_EQ(pairs.size(), 4800u);
  for (const auto& [g1, g2] : pairs) {
    EXPECT_LE(g1.size(), 3u);
    for (const auto& [x, ts] : g1) EXPECT_LE(ts.size(), 3u);
  }
}

}  // namespace
