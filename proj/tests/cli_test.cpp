#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "lexp/cli.hpp"
#include "lexp/lexp.hpp"

namespace {

using namespace lexp;

struct CliOutcome {
  int code;
  std::string out, err;
};

CliOutcome cli(std::vector<std::string> args, const std::string& input = "") {
  std::istringstream in(input);
  std::ostringstream out, err;
  int code = cli::run(args, in, out, err);
  return {code, out.str(), err.str()};
}

TEST(Cli, ParseCanonicalizes) {
  CliOutcome r = cli({"parse", "(\\x. x x) (\\x. x)"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "(\\x. x x) (\\x1. x1)\n");
  EXPECT_EQ(cli({"--unicode", "parse", "\\x. x"}).out, "λx. x\n");
  EXPECT_EQ(cli({"parse", "-"}, "\\y. y").out, "\\y. y\n");
}

TEST(Cli, SyntaxAndUsageErrorsExitThree) {
  EXPECT_EQ(cli({"parse", "(\\x."}).code, 3);
  EXPECT_EQ(cli({}).code, 3);
  EXPECT_EQ(cli({"bogus"}).code, 3);
  EXPECT_EQ(cli({"check", "--system", "nope", "x"}).code, 3);
  EXPECT_EQ(cli({"--format", "dot", "reduce", "x"}).code, 3);
  EXPECT_EQ(cli({"enumerate", "--max-size", "12"}).code, 3);
  EXPECT_EQ(cli({"verify", "--props", "nope"}).code, 3);
}

TEST(Cli, InferIntersection) {
  CliOutcome r = cli({"infer", "--system", "intersection", "--flavor", "aci", "\\x. x x"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "(a & (a -> b)) -> b\n");
  EXPECT_EQ(cli({"infer", "--system", "intersection", "(\\x. x x) (\\x. x)"}).out, "a -> a\n");
  EXPECT_EQ(cli({"infer", "--system", "intersection", "(\\x. x x) (\\x. x x)"}).code, 2);
  EXPECT_EQ(cli({"infer", "--system", "curry", "\\x. x x"}).code, 1);
  EXPECT_EQ(cli({"infer", "--system", "curry", "\\x. x"}).out, "a -> a\n");
}

TEST(Cli, CheckVerdicts) {
  const std::string t = "(\\x. x z2) z1";
  auto ordered = [&](const char* basis) {
    return cli({"check", "--system", "ordered", "--basis", basis, "--type", "b", t}).code;
  };
  EXPECT_EQ(ordered("z1: a -o_r b, z2: a"), 0);
  EXPECT_EQ(ordered("z2: a, z1: a -o_l b"), 0);
  EXPECT_EQ(ordered("z2: a, z1: a -o_r b"), 1);
  EXPECT_EQ(ordered("z1: a -o_l b, z2: a"), 1);
  EXPECT_EQ(cli({"check", "--system", "linear", "\\x y. x"}).code, 1);
  EXPECT_EQ(cli({"check", "--system", "affine", "\\x y. x"}).code, 0);
  EXPECT_EQ(cli({"check", "--system", "linear", "--type", "a -> a", "\\x. x"}).code, 0);
}

TEST(Cli, ExpandGoldens) {
  CliOutcome a = cli({"expand", "--flavor", "aci", "--type", "a -> a", "(\\x. x x)(\\x. x)"});
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, "(\\x1 x2. x1 x2) (\\x3. x3) (\\x4. x4)\ntype a -> a\ncontext {}\n");
  CliOutcome o = cli({"expand", "--flavor", "ordered", "--type", "b", "(\\x. x z) z"});
  EXPECT_EQ(o.code, 0);
  EXPECT_EQ(o.out, "(\\x1. x1 z1) z2\ntype b\ncontext [z:[z2: a -o_r b, z1: a]]\n");
  EXPECT_EQ(cli({"expand", "--flavor", "ordered", "--orientation", "right", "--type", "b", "(\\x. x z) z"}).code, 1);
  EXPECT_EQ(cli({"expand", "--flavor", "aci", "--type", "a -> b", "\\x. x"}).code, 1);
  EXPECT_EQ(cli({"expand", "--flavor", "ordered", "\\x y z. x z (y z)"}).code, 1);
}

TEST(Cli, ReduceAndFuel) {
  CliOutcome r = cli({"reduce", "(\\x. x x) (\\x. x)"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("steps 2"), std::string::npos);
  EXPECT_EQ(cli({"reduce", "--fuel", "5", "(\\x. x x) (\\x. x x)"}).code, 2);
  setenv("LEXP_FUEL", "3", 1);
  CliOutcome f = cli({"reduce", "(\\x. x x) (\\x. x x)"});
  unsetenv("LEXP_FUEL");
  EXPECT_EQ(f.code, 2);
  EXPECT_NE(f.out.find("steps 3"), std::string::npos);
  EXPECT_NE(cli({"reduce", "--strategy", "weak-head", "\\x. (\\y. y) x"}).out.find("steps 0"), std::string::npos);
}

TEST(Cli, EnumerateAndVerify) {
  CliOutcome e = cli({"enumerate", "--max-size", "3"});
  EXPECT_EQ(e.out, "\\x. x\n\\x y. x\n\\x y. y\n");
  EXPECT_EQ(cli({"enumerate", "--max-size", "2", "--open"}).out, "z\n\\x. x\n\\x. z\n");
  EXPECT_EQ(cli({"verify", "--corpus", "closed:5", "--props", "Affine,LinearTerms"}).code, 0);
  EXPECT_EQ(cli({"verify", "--corpus", "open:6", "--props", "times"}).code, 1);
  std::string path = ::testing::TempDir() + "corpus.txt";
  std::ofstream(path) << "# comment\n\\x. x\n(\\x. x x) (\\x. x)\n";
  CliOutcome v = cli({"verify", "--corpus", path, "--props", "sn"});
  EXPECT_EQ(v.code, 0);
  EXPECT_NE(v.out.find("2 terms"), std::string::npos);
}

TEST(Cli, JsonDocuments) {
  CliOutcome r = cli({"--format", "json", "infer", "--system", "intersection", "\\x. x x"});
  json j = json::parse(r.out);
  EXPECT_EQ(j["schema"], "lambda-expand/v1");
  EXPECT_EQ(j["kind"], "infer");
  EXPECT_EQ(j["text"], "(a & (a -> b)) -> b");
  InterDerivation d = inter_derivation_from_json(j["derivation"]);
  EXPECT_TRUE(check_inter(d).ok);
  json rep = json::parse(cli({"--format", "json", "verify", "--corpus", "golden", "--props", "FV"}).out);
  EXPECT_EQ(rep["properties"][0]["id"], "FV");
}

TEST(Cli, DotOutput) {
  CliOutcome r = cli({"--format", "dot", "check", "--system", "curry", "\\x. x"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("digraph", 0), 0u);
  EXPECT_NE(r.out.find("ArrowI"), std::string::npos);
  EXPECT_NE(r.out.find("n0 -> n1"), std::string::npos);
}

TEST(Json, TermAndTypeRoundTrips) {
  for (const auto& t : enumerate_terms(5, false)) EXPECT_EQ(render(term_from_json(to_json(t))), render(t));
  for (const char* s : {"a", "a -> b", "a -o_r b -o_l c", "(a -o b) -o b"}) {
    Type t = parse_type(s);
    EXPECT_EQ(type_from_json(json::parse(to_json(t).dump())), t);
  }
  InterType it = parse_inter_type("(a & (a -> b) & a) -> b");
  EXPECT_EQ(inter_type_from_json(to_json(it)), it);
  EXPECT_THROW(term_from_json(json::parse(R"({"oops":1})")), FormatError);
}

TEST(Json, DerivationAndContextRoundTrips) {
  for (const auto& src : golden_sources()) {
    Term t = parse_term(src);
    for (Flavor f : {Flavor::ACI, Flavor::AC, Flavor::A}) {
      InferResult r = infer(t, f);
      if (!r.typable()) continue;
      const InterDerivation& d = *r.derivation;
      json j = json::parse(to_json(d).dump());
      EXPECT_EQ(to_json(inter_derivation_from_json(j)), to_json(d)) << src;
    }
    for (System s : {System::Curry, System::Affine, System::Linear, System::Relevant})
      if (auto d = decide(s, t)) {
        Derivation back = derivation_from_json(to_json(*d));
        EXPECT_EQ(to_json(back), to_json(*d));
        EXPECT_TRUE(check_derivation(back).ok);
      }
    InferResult r = infer(t, Flavor::ACI);
    if (!r.typable()) continue;
    ExpansionResult e = expand_aci(*r.derivation);
    EXPECT_EQ(to_json(context_from_json(to_json(e.context))), to_json(e.context));
    EXPECT_TRUE(list_ctx_eq(context_from_json(to_json(e.context)), e.context));
  }
  TypeEnv g{{"x", {parse_inter_type("a"), parse_inter_type("a -> b")}}};
  EXPECT_TRUE(env_eq(env_from_json(to_json(g)), g, Flavor::A));
  Basis b = parse_basis("x: a -o_r b, y: a");
  EXPECT_EQ(to_json(basis_from_json(to_json(b))), to_json(b));
}

}  // namespace
