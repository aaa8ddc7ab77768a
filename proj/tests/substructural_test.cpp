#include <gtest/gtest.h>

#include <map>
#include <optional>

#include "lexp/lexp.hpp"

namespace {

using namespace lexp;

Term P(const char* s) { return parse_term(s); }
Type T(const char* s) { return parse_type(s); }

// Independent inference over integer-indexed type variables.
struct Oracle {
  struct Ty {
    int var = -1;  // >= 0: variable
    std::shared_ptr<Ty> dom, cod;
  };
  using P = std::shared_ptr<Ty>;
  std::map<int, P> bound;
  int next = 0;

  P fresh() { return std::make_shared<Ty>(Ty{next++, nullptr, nullptr}); }
  P arrow(P a, P b) { return std::make_shared<Ty>(Ty{-1, std::move(a), std::move(b)}); }
  P walk(P t) {
    while (t->var >= 0 && bound.count(t->var)) t = bound[t->var];
    return t;
  }
  bool occurs(int v, P t) {
    t = walk(t);
    if (t->var >= 0) return t->var == v;
    return occurs(v, t->dom) || occurs(v, t->cod);
  }
  bool unify(P a, P b) {
    a = walk(a);
    b = walk(b);
    if (a->var >= 0 && b->var >= 0 && a->var == b->var) return true;
    if (a->var >= 0) {
      if (occurs(a->var, b)) return false;
      bound[a->var] = b;
      return true;
    }
    if (b->var >= 0) return unify(b, a);
    return unify(a->dom, b->dom) && unify(a->cod, b->cod);
  }
  std::optional<P> infer(const Term& t, std::map<std::string, P>& env) {
    switch (t.kind()) {
      case Term::Kind::Var: {
        auto it = env.find(t.name());
        if (it != env.end()) return it->second;
        return env[t.name()] = fresh();
      }
      case Term::Kind::Abs: {
        P a = fresh();
        auto saved = env.find(t.name()) == env.end() ? std::optional<P>{} : std::optional<P>{env[t.name()]};
        env[t.name()] = a;
        auto b = infer(t.body(), env);
        if (saved) env[t.name()] = *saved;
        else env.erase(t.name());
        if (!b) return std::nullopt;
        return arrow(a, *b);
      }
      case Term::Kind::App: {
        auto f = infer(t.fun(), env);
        if (!f) return std::nullopt;
        auto x = infer(t.arg(), env);
        if (!x) return std::nullopt;
        P r = fresh();
        if (!unify(*f, arrow(*x, r))) return std::nullopt;
        return r;
      }
    }
    return std::nullopt;
  }
  // Renders with variables numbered by first appearance.
  void show(P t, std::map<int, int>& names, std::string& out) {
    t = walk(t);
    if (t->var >= 0) {
      auto [it, _] = names.emplace(t->var, static_cast<int>(names.size()));
      out += "v" + std::to_string(it->second);
      return;
    }
    out += "(";
    show(t->dom, names, out);
    out += ">";
    show(t->cod, names, out);
    out += ")";
  }
};

std::string shape(const Type& t, std::map<std::string, int>& names) {
  if (t.is_var()) {
    auto [it, _] = names.emplace(t.name(), static_cast<int>(names.size()));
    return "v" + std::to_string(it->second);
  }
  std::string d = shape(t.dom(), names);
  return "(" + d + ">" + shape(t.cod(), names) + ")";
}

TEST(CurryInference, PrincipalTypeOfS) {
  auto c = infer_curry(P("\\x y z. x z (y z)"));
  ASSERT_TRUE(c);
  std::map<std::string, int> n1, n2;
  // Hand unification: z:a, x:a->b->c, y:a->b.
  EXPECT_EQ(shape(c->type, n1), shape(T("(a -> b -> c) -> (a -> b) -> a -> c"), n2));
}

TEST(CurryInference, AgreesWithOracle) {
  for (const Term& t : enumerate_terms(7, false)) {
    Oracle o;
    std::map<std::string, Oracle::P> env;
    auto expect = o.infer(t, env);
    auto got = infer_curry(t);
    ASSERT_EQ(expect.has_value(), got.has_value()) << render(t);
    if (!got) continue;
    // Compare the whole typing: result type then basis in first-occurrence order.
    std::map<int, int> on;
    std::string want;
    o.show(*expect, on, want);
    for (const auto& x : free_vars(t)) {
      want += "|";
      o.show(env.at(x), on, want);
    }
    std::map<std::string, int> gn;
    std::string have = shape(got->type, gn);
    for (const auto& a : got->basis) have += "|" + shape(a.type, gn);
    EXPECT_EQ(have, want) << render(t);
  }
}

TEST(CurryInference, SelfApplicationUntypable) {
  EXPECT_FALSE(infer_curry(P("\\x. x x")));
  EXPECT_FALSE(decide(System::Curry, P("\\x. x x")));
}

TEST(Decide, StructuralRules) {
  Term k = P("\\x y. x");
  EXPECT_TRUE(decide(System::Curry, k));
  EXPECT_TRUE(decide(System::Affine, k));
  EXPECT_FALSE(decide(System::Relevant, k));
  EXPECT_FALSE(decide(System::Linear, k));
  Term dup = P("\\f x. f x x");
  EXPECT_TRUE(decide(System::Relevant, dup));
  EXPECT_FALSE(decide(System::Affine, dup));
  EXPECT_TRUE(decide(System::Linear, P("\\x. x")));
  EXPECT_TRUE(decide(System::Linear, P("(\\x. x) z")));
}

TEST(Decide, DerivationsCheck) {
  for (const Term& t : enumerate_terms(6, true))
    for (System s : {System::Curry, System::Relevant, System::Affine, System::Linear})
      if (auto d = decide(s, t)) {
        auto r = check_derivation(*d);
        EXPECT_TRUE(r.ok) << render(t) << ": " << r.diagnostic;
        EXPECT_EQ(d->system, s);
        EXPECT_TRUE(alpha_eq(d->subject, t));
      }
}

TEST(CheckDerivation, RejectsMissingStructuralRule) {
  auto d = decide(System::Affine, P("\\x y. x"));
  ASSERT_TRUE(d);
  EXPECT_GT(count_rule(*d, Rule::Weak), 0u);
  Derivation forged = *d;
  auto relabel = [](auto&& self, Derivation& n) -> void {
    n.system = System::Linear;
    if (n.type.is_arrow()) n.type = with_arrow_kind(n.type, ArrowKind::Lolli);
    for (auto& a : n.basis) a.type = with_arrow_kind(a.type, ArrowKind::Lolli);
    for (auto& p : n.premises) self(self, p);
  };
  relabel(relabel, forged);
  EXPECT_FALSE(check_derivation(forged).ok);
}

TEST(CheckTyping, InstancesOfThePrincipalType) {
  EXPECT_TRUE(check_typing(System::Curry, {}, P("\\x. x"), T("(b -> b) -> b -> b")));
  EXPECT_FALSE(check_typing(System::Curry, {}, P("\\x. x"), T("a -> b")));
  EXPECT_TRUE(check_typing(System::Linear, {}, P("\\x. x"), T("a -o a")));
  Basis b{{"z", T("a")}};
  EXPECT_TRUE(check_typing(System::Relevant, b, P("(\\x. x) z"), T("a")));
}

TEST(Ordered, FourOrderings) {
  Term t = P("(\\x. x z2) z1");
  auto basis = [](const char* s) { return parse_basis(s); };
  EXPECT_TRUE(check_ordered(basis("z1: a -o_r b, z2: a"), t, T("b")));
  EXPECT_TRUE(check_ordered(basis("z2: a, z1: a -o_l b"), t, T("b")));
  EXPECT_FALSE(check_ordered(basis("z2: a, z1: a -o_r b"), t, T("b")));
  EXPECT_FALSE(check_ordered(basis("z1: a -o_l b, z2: a"), t, T("b")));
}

TEST(Ordered, DerivationsCheckAndKeepRigidVariables) {
  auto d = check_ordered({}, P("\\x. x"), T("a -o_r a"));
  ASSERT_TRUE(d);
  EXPECT_EQ(d->type, T("a -o_r a"));
  EXPECT_TRUE(check_derivation(*d).ok);
  EXPECT_FALSE(check_ordered({}, P("\\x. x"), T("a -o_r b")));
  EXPECT_FALSE(check_ordered({}, P("\\x y. x"), T("a -o_r b -o_r a")));
}

TEST(Ordered, BudgetIsReported) {
  EXPECT_THROW(check_ordered({}, P("\\f x. f (f (f x))"), T("(a -o_r a) -o_r a -o_r a"), 1), SizeBoundExceeded);
}

}  // namespace
