// Acceptance gate: one PASS/FAIL line per criterion, with sub-checks indented below.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "lexp/cli.hpp"
#include "lexp/lexp.hpp"

namespace {

using namespace lexp;
using Clock = std::chrono::steady_clock;

// Pinned tolerances.
constexpr double kGoldenSeconds = 1.0;
constexpr double kCharacterizationSeconds = 300.0;
constexpr std::size_t kCharacterizationSize = 7;
constexpr std::size_t kExpansionSize = 6;
constexpr std::size_t kDiagramSize = 6;
constexpr std::size_t kSubstitutionSize = 6;
constexpr std::size_t kLinearSize = 9;

struct Check {
  std::string name;
  bool ok;
  std::string detail;
};

struct Criterion {
  int number;
  std::string title;
  std::vector<Check> checks;
  bool ok() const {
    for (const auto& c : checks)
      if (!c.ok) return false;
    return true;
  }
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct CliRun {
  int code;
  std::string out;
  double seconds;
};

CliRun cli(std::vector<std::string> args) {
  std::istringstream in;
  std::ostringstream out, err;
  auto t0 = Clock::now();
  int code = cli::run(args, in, out, err);
  return {code, out.str(), seconds_since(t0)};
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

std::string timing(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3fs", s);
  return buf;
}

Check property_check(const std::string& label, const PropertyReport& r) {
  std::ostringstream d;
  d << "pass=" << r.count(Outcome::Pass) << " vacuous=" << r.count(Outcome::Vacuous)
    << " fail=" << r.count(Outcome::Fail);
  if (std::size_t n = r.count(Outcome::OrderViolation)) d << " order-violation=" << n;
  if (std::size_t n = r.count(Outcome::Inconclusive)) d << " inconclusive=" << n;
  for (const auto& i : r.instances)
    if (i.outcome == Outcome::Fail) {
      d << "; first failure " << i.instance << ": " << i.detail;
      break;
    }
  return {label + " [" + r.id + "]", r.ok() && r.count(Outcome::Inconclusive) == 0, d.str()};
}

std::vector<Check> matrix(const Corpus& c, const std::vector<std::string>& ids, const std::string& prefix) {
  std::vector<Check> out;
  for (const auto& r : run_matrix(c, ids, kDefaultFuel)) out.push_back(property_check(prefix, r));
  return out;
}

Criterion golden() {
  Criterion c{1, "golden examples", {}};
  auto expect_term = [&](const std::string& name, const CliRun& r, const char* want) {
    bool ok = r.code == 0 && r.seconds < kGoldenSeconds;
    if (ok) {
      try {
        ok = alpha_eq(parse_term(first_line(r.out)), parse_term(want));
      } catch (const Error&) {
        ok = false;
      }
    }
    c.checks.push_back({name, ok, first_line(r.out) + " in " + timing(r.seconds)});
    return ok;
  };

  CliRun a = cli({"expand", "--flavor", "aci", "--type", "a -> a", "(\\x. x x)(\\x. x)"});
  expect_term("expand aci twice-identity", a, "(\\x1 x2. x1 x2)(\\x.x)(\\x.x)");
  c.checks.push_back({"expand aci context empty", a.out.find("context {}\n") != std::string::npos, ""});

  CliRun b = cli({"expand", "--flavor", "ac", "--type", "a -> a", "(\\f. f (\\x. x x) (f (\\x.x)))(\\x.x)"});
  expect_term("expand ac three f-copies", b, "(\\f1 f2 f3. f1 (\\x1 x2. x1 x2) (f2 (\\x.x)) (f3 (\\x.x))) (\\x.x) (\\x.x) (\\x.x)");

  CliRun o = cli({"expand", "--flavor", "ordered", "--type", "b", "(\\x. x z) z"});
  expect_term("expand ordered open application", o, "(\\x1. x1 z1) z2");
  c.checks.push_back({"ordered context", o.out.find("context [z:[z2: a -o_r b, z1: a]]\n") != std::string::npos,
                      first_line(o.out.substr(std::min(o.out.find("context"), o.out.size())))});
  {
    auto d = instantiate(*infer(parse_term("(\\x. x z) z"), Flavor::A).derivation, parse_inter_type("b"));
    bool ok = false;
    std::string why = "no instance";
    if (d) {
      ExpansionResult e = expand_ordered(*d);
      CheckResult r = check_derivation(e.derivation);
      ok = r.ok && e.derivation.system == System::Ordered;
      why = r.ok ? "ordered derivation checks" : r.diagnostic;
    }
    c.checks.push_back({"ordered derivation", ok, why});
  }

  const std::string t = "(\\x. x z2) z1";
  struct Case {
    const char* basis;
    int code;
  };
  for (const Case& k : {Case{"z1: a -o_r b, z2: a", 0}, Case{"z2: a, z1: a -o_l b", 0}, Case{"z2: a, z1: a -o_r b", 1},
                        Case{"z1: a -o_l b, z2: a", 1}}) {
    CliRun r = cli({"check", "--system", "ordered", "--basis", k.basis, "--type", "b", t});
    c.checks.push_back({std::string("ordered check [") + k.basis + "]", r.code == k.code && r.seconds < kGoldenSeconds,
                        "exit " + std::to_string(r.code) + " in " + timing(r.seconds)});
  }

  CliRun s = cli({"infer", "--system", "intersection", "\\x. x x"});
  bool self_ok = false;
  try {
    self_ok = s.code == 0 && equivalent_up_to_renaming(parse_inter_type(first_line(s.out)),
                                                      parse_inter_type("(a & (a -> b)) -> b"), Flavor::A);
  } catch (const Error&) {
  }
  c.checks.push_back({"infer self-application", self_ok && s.seconds < kGoldenSeconds, first_line(s.out)});
  CliRun ti = cli({"infer", "--system", "intersection", "(\\x.x x)(\\x.x)"});
  c.checks.push_back({"infer twice-identity", ti.code == 0 && first_line(ti.out) == "a -> a" && ti.seconds < kGoldenSeconds,
                      first_line(ti.out)});
  CliRun om = cli({"infer", "--system", "intersection", "(\\x.x x)(\\x.x x)"});
  c.checks.push_back({"infer omega exits 2", om.code == 2 && om.seconds < kGoldenSeconds,
                      "exit " + std::to_string(om.code) + " in " + timing(om.seconds)});
  return c;
}

Criterion characterization() {
  Criterion c{2, "characterization suites", {}};
  auto t0 = Clock::now();
  Corpus closed{"closed", enumerate_terms(kCharacterizationSize, true)};
  auto checks = matrix(closed, {"Affine", "LinearTerms", "sn"}, "closed size<=7");
  // Every returned derivation is checked independently of the properties above.
  std::size_t bad = 0, seen = 0;
  for (const auto& t : closed.terms)
    for (System s : {System::Affine, System::Linear})
      if (auto d = decide(s, t)) {
        ++seen;
        if (!check_derivation(*d).ok) ++bad;
      }
  checks.push_back({"decided derivations check", bad == 0, std::to_string(seen) + " derivations"});
  double secs = seconds_since(t0);
  checks.push_back({"runtime", secs < kCharacterizationSeconds, timing(secs)});
  c.checks = std::move(checks);
  return c;
}

Criterion expansion() {
  Criterion c{3, "expansion soundness and completeness", {}};
  Corpus typable = filter_corpus({"open", enumerate_terms(kExpansionSize, false)}, CorpusFilter::Typable);
  c.checks = matrix(typable,
                    {"exp_types", "exp_types_Relevant", "exp_typesAffine", "exp_types_Linear", "orderexp", "type_exp1",
                     "type_exp1_ac", "type_exp1_ordered", "type_exp2", "times", "occur"},
                    "typable size<=6");
  std::size_t violations = 0;
  std::string where;
  for (const char* src : {"(\\x. x x) (\\x. x)", "(\\f. f (\\x. x x) (f (\\x. x))) (\\x. x)", "(\\x. x z) z",
                          "(\\x. x z2) z1", "\\x. x x", "\\f x. f (f x)"}) {
    InferResult r = infer(parse_term(src), Flavor::A);
    try {
      expand_ordered(*r.derivation);
    } catch (const OrderViolation&) {
      ++violations;
      where += std::string(" ") + src;
    }
  }
  c.checks.push_back({"order violations on worked examples", violations == 0, std::to_string(violations) + where});
  return c;
}

Criterion diagrams() {
  Criterion c{4, "reduction diagrams", {}};
  Corpus all{"open", enumerate_terms(kDiagramSize, false)};
  c.checks = matrix(all, {"tfive", "t5", "red", "LinearI", "icalculus"}, "size<=6");
  for (ExpansionFlavor f : {ExpansionFlavor::ACI, ExpansionFlavor::AC}) {
    InterDerivation d = *infer(parse_term("\\x. (\\y. z) x x"), source_flavor(f)).derivation;
    DiagramReport r = verify_beta_diagram(d, f, false);
    bool failed = !r.steps.empty() && !r.ok();
    c.checks.push_back({std::string("negative control fails under ") + std::string(to_string(f)), failed,
                        r.steps.empty() ? "no steps" : r.steps.front().detail});
  }
  return c;
}

// A1 + A2 from its three defining clauses, on plain owner/binding lists.
using Flat = std::vector<std::pair<std::string, std::vector<std::pair<std::string, std::string>>>>;

Flat plus(Flat a1, Flat a2) {
  if (a2.empty()) return a1;
  auto head = a2.front();
  a2.erase(a2.begin());
  for (auto& entry : a1)
    if (entry.first == head.first) {
      entry.second.insert(entry.second.end(), head.second.begin(), head.second.end());
      return plus(std::move(a1), std::move(a2));
    }
  a1.push_back(std::move(head));
  return plus(std::move(a1), std::move(a2));
}

std::vector<Flat> contexts(const std::string& tag) {
  const std::vector<std::string> owners{"x", "y", "z"};
  std::vector<std::string> types;
  for (const char* t : {"a", "a -> b", "a & b -> a"}) types.push_back(render(parse_inter_type(t)));
  std::vector<Flat> out{{}};
  std::function<void(Flat, std::size_t)> grow = [&](Flat cur, std::size_t depth) {
    if (depth == 3) return;
    for (const auto& o : owners) {
      bool used = false;
      for (const auto& e : cur) used = used || e.first == o;
      if (used) continue;
      for (std::size_t n = 1; n <= 2; ++n) {
        Flat next = cur;
        next.push_back({o, {}});
        for (std::size_t k = 0; k < n; ++k)
          next.back().second.push_back({o + tag + std::to_string(k), types[(depth + k) % types.size()]});
        out.push_back(next);
        grow(next, depth + 1);
      }
    }
  };
  grow({}, 0);
  return out;
}

ExpansionContext build(const Flat& f) {
  ExpansionContext c;
  for (const auto& [o, bs] : f) {
    VarExpansion e{o, {}};
    for (const auto& [v, t] : bs) e.bindings.push_back({v, parse_inter_type(t)});
    c.entries.push_back(std::move(e));
  }
  return c;
}

Flat flatten(const ExpansionContext& c) {
  Flat out;
  for (const auto& e : c.entries) {
    out.push_back({e.owner, {}});
    for (const auto& b : e.bindings) out.back().second.push_back({b.var, render(b.type)});
  }
  return out;
}

Criterion algebra() {
  Criterion c{5, "context and substitution algebra", {}};
  c.checks = matrix(Corpus{"none", {}}, {"dist_e", "dist_l"}, "environments");
  auto subst = matrix(Corpus{"open", enumerate_terms(kSubstitutionSize, false)}, {"sub_sub", "subst"}, "redexes size<=6");
  c.checks.insert(c.checks.end(), subst.begin(), subst.end());
  std::size_t n = 0, bad = 0;
  auto ls = contexts("p"), rs = contexts("q");
  for (const auto& a : ls)
    for (const auto& b : rs) {
      ++n;
      if (flatten(ctx_append(build(a), build(b))) != plus(a, b)) ++bad;
    }
  c.checks.push_back({"+ against clause oracle", bad == 0, std::to_string(n) + " pairs, " + std::to_string(bad) + " mismatches"});
  return c;
}

Criterion linear_steps() {
  Criterion c{6, "linear-term step bound", {}};
  Corpus lin = filter_corpus({"open", enumerate_terms(kLinearSize, false)}, CorpusFilter::Linear);
  c.checks = matrix(lin, {"linear-length"}, "linear size<=9");
  return c;
}

}  // namespace

int main() {
  std::vector<std::function<Criterion()>> all{golden, characterization, expansion, diagrams, algebra, linear_steps};
  int failed = 0;
  for (const auto& f : all) {
    auto t0 = Clock::now();
    Criterion c = f();
    std::cout << (c.ok() ? "PASS" : "FAIL") << " criterion " << c.number << ": " << c.title << " ("
              << timing(seconds_since(t0)) << ")\n";
    for (const auto& k : c.checks)
      std::cout << "  " << (k.ok ? "PASS" : "FAIL") << " " << k.name << (k.detail.empty() ? "" : ": " + k.detail) << "\n";
    if (!c.ok()) ++failed;
  }
  std::cout << (failed == 0 ? "all criteria pass" : std::to_string(failed) + " criteria fail") << "\n";
  return failed == 0 ? 0 : 1;
}
