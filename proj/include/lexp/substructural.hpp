#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "lexp/syntax.hpp"
#include "lexp/term.hpp"
#include "lexp/types.hpp"

namespace lexp {

enum class System : std::uint8_t { Curry, Relevant, Affine, Linear, Ordered };

enum class Rule : std::uint8_t { Ax, Weak, Ex, Ctr, ArrowI, ArrowE, ArrowIL, ArrowIR, ArrowEL, ArrowER };

inline std::string_view to_string(System s) {
  switch (s) {
    case System::Curry: return "curry";
    case System::Relevant: return "relevant";
    case System::Affine: return "affine";
    case System::Linear: return "linear";
    case System::Ordered: return "ordered";
  }
  return "?";
}

inline std::string_view to_string(Rule r) {
  switch (r) {
    case Rule::Ax: return "Ax";
    case Rule::Weak: return "Weak";
    case Rule::Ex: return "Ex";
    case Rule::Ctr: return "Ctr";
    case Rule::ArrowI: return "ArrowI";
    case Rule::ArrowE: return "ArrowE";
    case Rule::ArrowIL: return "ArrowIL";
    case Rule::ArrowIR: return "ArrowIR";
    case Rule::ArrowEL: return "ArrowEL";
    case Rule::ArrowER: return "ArrowER";
  }
  return "?";
}

inline bool admits(System s, Rule r) {
  switch (r) {
    case Rule::Ax: return true;
    case Rule::Weak: return s == System::Curry || s == System::Affine;
    case Rule::Ex: return s != System::Ordered;
    case Rule::Ctr: return s == System::Curry || s == System::Relevant;
    case Rule::ArrowI:
    case Rule::ArrowE: return s != System::Ordered;
    case Rule::ArrowIL:
    case Rule::ArrowIR:
    case Rule::ArrowEL:
    case Rule::ArrowER: return s == System::Ordered;
  }
  return false;
}

/// Arrow kind of the implication in a non-ordered system.
inline ArrowKind arrow_of(System s) {
  return (s == System::Affine || s == System::Linear) ? ArrowKind::Lolli : ArrowKind::Simple;
}

/// Premises of ArrowE/ArrowEL/ArrowER are always stored function first.
struct Derivation {
  System system;
  Rule rule;
  Basis basis;
  Term subject;
  Type type;
  std::vector<Derivation> premises;
};

struct CheckResult {
  bool ok = true;
  std::string diagnostic;
  explicit operator bool() const noexcept { return ok; }
};

inline std::size_t count_nodes(const Derivation& d) {
  std::size_t n = 1;
  for (const auto& p : d.premises) n += count_nodes(p);
  return n;
}

inline std::size_t count_rule(const Derivation& d, Rule r) {
  std::size_t n = d.rule == r ? 1 : 0;
  for (const auto& p : d.premises) n += count_rule(p, r);
  return n;
}

namespace detail {

inline std::string judgment(const Derivation& d) {
  return "[" + render(d.basis) + "] |- " + render(d.subject) + " : " + render(d.type);
}

inline bool kinds_fit(System s, const Type& t) {
  if (s == System::Ordered) return uses_only(t, {ArrowKind::LolliL, ArrowKind::LolliR});
  return uses_only(t, {arrow_of(s)});
}

inline std::string check_node(const Derivation& d) {
  const auto& ps = d.premises;
  auto arity = [&](std::size_t n) { return ps.size() == n; };
  if (!admits(d.system, d.rule)) return "rule not admitted";
  if (!is_consistent(d.basis)) return "inconsistent basis";
  if (!kinds_fit(d.system, d.type)) return "arrow kind foreign to the system";
  for (const auto& a : d.basis)
    if (!kinds_fit(d.system, a.type)) return "arrow kind foreign to the system in basis";
  for (const auto& p : ps)
    if (p.system != d.system) return "premise from another system";

  switch (d.rule) {
    case Rule::Ax: {
      if (!arity(0)) return "Ax takes no premises";
      if (!d.subject.is_var()) return "Ax subject must be a variable";
      if (d.basis.size() != 1 || d.basis[0].var != d.subject.name() || d.basis[0].type != d.type)
        return "Ax basis must be exactly x:type";
      return {};
    }
    case Rule::Weak: {
      if (!arity(1)) return "Weak takes one premise";
      const auto& p = ps[0];
      if (p.subject != d.subject || p.type != d.type) return "Weak changes the judgment";
      if (d.basis.size() != p.basis.size() + 1) return "Weak must add exactly one assumption";
      for (std::size_t i = 0; i < d.basis.size(); ++i) {
        Basis without = d.basis;
        without.erase(without.begin() + static_cast<std::ptrdiff_t>(i));
        if (without == p.basis) return {};
      }
      return "Weak conclusion is not premise plus one assumption";
    }
    case Rule::Ex: {
      if (!arity(1)) return "Ex takes one premise";
      const auto& p = ps[0];
      if (p.subject != d.subject || p.type != d.type) return "Ex changes the judgment";
      if (p.basis.size() != d.basis.size()) return "Ex changes the basis size";
      std::vector<std::size_t> diff;
      for (std::size_t i = 0; i < d.basis.size(); ++i)
        if (!(d.basis[i] == p.basis[i])) diff.push_back(i);
      if (diff.size() != 2 || diff[1] != diff[0] + 1 || !(d.basis[diff[0]] == p.basis[diff[1]]) ||
          !(d.basis[diff[1]] == p.basis[diff[0]]))
        return "Ex must swap one adjacent pair";
      return {};
    }
    case Rule::Ctr: {
      if (!arity(1)) return "Ctr takes one premise";
      const auto& p = ps[0];
      if (p.type != d.type) return "Ctr changes the type";
      if (p.basis.size() != d.basis.size() + 1) return "Ctr must merge two assumptions";
      for (std::size_t i = 0; i + 1 < p.basis.size(); ++i) {
        const auto& a1 = p.basis[i];
        const auto& a2 = p.basis[i + 1];
        if (a1.type != a2.type) continue;
        const auto& merged = d.basis[i];
        if (merged.type != a1.type) continue;
        bool rest = true;
        for (std::size_t j = 0; j < i && rest; ++j) rest = d.basis[j] == p.basis[j];
        for (std::size_t j = i + 1; j < d.basis.size() && rest; ++j) rest = d.basis[j] == p.basis[j + 1];
        if (!rest) continue;
        Term expect = rename_free(rename_free(p.subject, a1.var, merged.var), a2.var, merged.var);
        if (expect == d.subject) return {};
      }
      return "Ctr conclusion does not merge an adjacent equal-typed pair";
    }
    case Rule::ArrowI:
    case Rule::ArrowIL:
    case Rule::ArrowIR: {
      if (!arity(1)) return "introduction takes one premise";
      const auto& p = ps[0];
      if (!d.subject.is_abs() || p.subject != d.subject.body()) return "premise subject must be the body";
      if (!d.type.is_arrow() || p.type != d.type.cod()) return "type must be an arrow onto the body type";
      ArrowKind want = d.rule == Rule::ArrowI ? arrow_of(d.system)
                                              : (d.rule == Rule::ArrowIL ? ArrowKind::LolliL : ArrowKind::LolliR);
      if (d.type.arrow_kind() != want) return "wrong arrow kind";
      if (p.basis.empty()) return "binder missing from premise basis";
      Assumption bound{d.subject.name(), d.type.dom()};
      Basis rest = p.basis;
      if (d.rule == Rule::ArrowIL) {
        if (!(rest.front() == bound)) return "binder must be first in the premise basis";
        rest.erase(rest.begin());
      } else {
        if (!(rest.back() == bound)) return "binder must be last in the premise basis";
        rest.pop_back();
      }
      if (rest != d.basis) return "conclusion basis must be premise basis without the binder";
      return {};
    }
    case Rule::ArrowE:
    case Rule::ArrowEL:
    case Rule::ArrowER: {
      if (!arity(2)) return "elimination takes two premises";
      const auto& f = ps[0];
      const auto& a = ps[1];
      if (!d.subject.is_app() || f.subject != d.subject.fun() || a.subject != d.subject.arg())
        return "premise subjects must be the function and the argument";
      ArrowKind want = d.rule == Rule::ArrowE ? arrow_of(d.system)
                                              : (d.rule == Rule::ArrowEL ? ArrowKind::LolliL : ArrowKind::LolliR);
      if (!f.type.is_arrow() || f.type.arrow_kind() != want) return "function type has the wrong arrow";
      if (f.type.dom() != a.type || f.type.cod() != d.type) return "argument or result type mismatch";
      Basis joined = d.rule == Rule::ArrowEL ? a.basis : f.basis;
      const Basis& second = d.rule == Rule::ArrowEL ? f.basis : a.basis;
      joined.insert(joined.end(), second.begin(), second.end());
      if (joined != d.basis) return "conclusion basis must concatenate the premise bases in rule order";
      return {};
    }
  }
  return "unknown rule";
}

inline CheckResult check_rec(const Derivation& d, const std::string& path) {
  if (std::string msg = check_node(d); !msg.empty())
    return {false, "node " + (path.empty() ? std::string("root") : path) + " (" + std::string(to_string(d.rule)) +
                       ", " + judgment(d) + "): " + msg};
  for (std::size_t i = 0; i < d.premises.size(); ++i) {
    auto r = check_rec(d.premises[i], path + (path.empty() ? "" : ".") + std::to_string(i));
    if (!r) return r;
  }
  return {};
}

}  // namespace detail

/// Verifies every node against its rule schema; reports the first failing node.
inline CheckResult check_derivation(const Derivation& d) { return detail::check_rec(d, ""); }

// ---------------------------------------------------------------------------
// Principal Curry types

using TypeSubst = std::map<std::string, Type>;

inline Type apply_subst(const TypeSubst& s, const Type& t) {
  if (t.is_var()) {
    auto it = s.find(t.name());
    return it == s.end() ? t : apply_subst(s, it->second);
  }
  return Type::arrow(t.arrow_kind(), apply_subst(s, t.dom()), apply_subst(s, t.cod()));
}

inline bool occurs_in(const std::string& v, const Type& t) {
  if (t.is_var()) return t.name() == v;
  return occurs_in(v, t.dom()) || occurs_in(v, t.cod());
}

inline bool is_meta(const Type& t) { return t.is_var() && !t.name().empty() && t.name()[0] == '?'; }

/// Most general unifier with occurs check; arrow kinds must agree. Only
/// metavariables (`?n`) are bound; other type variables are rigid.
inline bool unify(const Type& a, const Type& b, TypeSubst& s) {
  Type x = apply_subst(s, a);
  Type y = apply_subst(s, b);
  if (x.is_var() && y.is_var() && x.name() == y.name()) return true;
  if (!is_meta(x) && is_meta(y)) std::swap(x, y);
  if (x.is_var()) {
    if (!is_meta(x)) return false;
    if (occurs_in(x.name(), y)) return false;
    s.insert_or_assign(x.name(), y);
    return true;
  }
  if (y.is_var()) return false;
  if (x.arrow_kind() != y.arrow_kind()) return false;
  return unify(x.dom(), y.dom(), s) && unify(x.cod(), y.cod(), s);
}

/// Applies s without chasing bindings; for substitutions produced by match_type.
inline Type apply_once(const TypeSubst& s, const Type& t) {
  if (t.is_var()) {
    auto it = s.find(t.name());
    return it == s.end() ? t : it->second;
  }
  return Type::arrow(t.arrow_kind(), apply_once(s, t.dom()), apply_once(s, t.cod()));
}

/// One-way matching: finds s with apply_subst(s, pattern) == target.
inline bool match_type(const Type& pattern, const Type& target, TypeSubst& s) {
  if (pattern.is_var()) {
    auto it = s.find(pattern.name());
    if (it == s.end()) {
      s.emplace(pattern.name(), target);
      return true;
    }
    return it->second == target;
  }
  if (target.is_var() || pattern.arrow_kind() != target.arrow_kind()) return false;
  return match_type(pattern.dom(), target.dom(), s) && match_type(pattern.cod(), target.cod(), s);
}

/// Term annotated with a type at every node; abstractions carry their arrow type.
struct TypedTerm {
  Term term;
  Type type;
  std::vector<TypedTerm> kids;
};

inline TypedTerm map_types(const TypedTerm& n, const std::function<Type(const Type&)>& f) {
  TypedTerm out{n.term, f(n.type), {}};
  for (const auto& k : n.kids) out.kids.push_back(map_types(k, f));
  return out;
}

/// Type variable names a, b, ..., z, a1, b1, ...
inline std::string pretty_tvar(std::size_t i) {
  std::string s(1, static_cast<char>('a' + i % 26));
  if (i >= 26) s += std::to_string(i / 26);
  return s;
}

struct CurryTyping {
  Type type;
  Basis basis;  // free variables in first-occurrence order
  TypedTerm tree;
};

namespace detail {
struct CurryInfer {
  TypeSubst s;
  std::size_t next = 0;
  std::map<std::string, Type> free;
  bool failed = false;

  Type fresh() { return Type::tvar("?" + std::to_string(next++)); }

  TypedTerm walk(const Term& t, std::map<std::string, Type>& env) {
    switch (t.kind()) {
      case Term::Kind::Var: {
        if (auto it = env.find(t.name()); it != env.end()) return {t, it->second, {}};
        auto [it, inserted] = free.try_emplace(t.name(), Type::tvar(""));
        if (inserted) it->second = fresh();
        return {t, it->second, {}};
      }
      case Term::Kind::Abs: {
        Type a = fresh();
        auto saved = env.find(t.name()) != env.end() ? std::optional<Type>(env.at(t.name())) : std::nullopt;
        env.insert_or_assign(t.name(), a);
        TypedTerm body = walk(t.body(), env);
        if (saved) env.insert_or_assign(t.name(), *saved);
        else env.erase(t.name());
        Type ty = Type::fn(a, body.type);
        return {t, ty, {std::move(body)}};
      }
      case Term::Kind::App: {
        TypedTerm f = walk(t.fun(), env);
        TypedTerm a = walk(t.arg(), env);
        Type r = fresh();
        if (!unify(f.type, Type::fn(a.type, r), s)) failed = true;
        return {t, r, {std::move(f), std::move(a)}};
      }
    }
    return {t, fresh(), {}};
  }
};
}  // namespace detail

/// Principal Curry type with the minimal basis; absent when untypable.
inline std::optional<CurryTyping> infer_curry(const Term& t) {
  detail::CurryInfer inf;
  std::map<std::string, Type> env;
  TypedTerm tree = inf.walk(t, env);
  if (inf.failed) return std::nullopt;
  TypedTerm resolved = map_types(tree, [&](const Type& x) { return apply_subst(inf.s, x); });
  // Rename metavariables by first appearance: result type first, then the basis.
  std::vector<std::string> order;
  type_vars(resolved.type, order);
  auto fv = free_vars(t);
  for (const auto& x : fv) type_vars(apply_subst(inf.s, inf.free.at(x)), order);
  auto collect = [&](auto&& self, const TypedTerm& n) -> void {
    type_vars(n.type, order);
    for (const auto& k : n.kids) self(self, k);
  };
  collect(collect, resolved);
  TypeSubst pretty;
  for (std::size_t i = 0; i < order.size(); ++i) pretty.emplace(order[i], Type::tvar(pretty_tvar(i)));
  TypedTerm final_tree = map_types(resolved, [&](const Type& x) { return apply_subst(pretty, x); });
  Basis basis;
  for (const auto& x : fv) basis.push_back({x, apply_subst(pretty, apply_subst(inf.s, inf.free.at(x)))});
  return CurryTyping{final_tree.type, std::move(basis), std::move(final_tree)};
}

// ---------------------------------------------------------------------------
// Reconstruction of explicit-structural derivations

struct BuildFailure {
  Rule needed;
  std::string reason;
};

namespace detail {

inline Derivation rename_in(const Derivation& d, const std::string& from, const std::string& to) {
  Derivation out{d.system, d.rule, d.basis, rename_free(d.subject, from, to), d.type, {}};
  for (auto& a : out.basis)
    if (a.var == from) a.var = to;
  for (const auto& p : d.premises) out.premises.push_back(rename_in(p, from, to));
  return out;
}

class Builder {
 public:
  Builder(System s, FreshSupply& supply) : sys_(s), supply_(supply) {}

  std::optional<BuildFailure> failure;

  std::optional<Derivation> build(const TypedTerm& n) {
    switch (n.term.kind()) {
      case Term::Kind::Var:
        return Derivation{sys_, Rule::Ax, {{n.term.name(), n.type}}, n.term, n.type, {}};
      case Term::Kind::Abs: {
        auto body = build(n.kids[0]);
        if (!body) return std::nullopt;
        const std::string& x = n.term.name();
        Type dom = n.type.dom();
        if (!lookup(body->basis, x)) {
          if (!require(Rule::Weak, "vacuous abstraction over " + x)) return std::nullopt;
          Basis b = body->basis;
          b.push_back({x, dom});
          body = Derivation{sys_, Rule::Weak, b, body->subject, body->type, {std::move(*body)}};
        }
        auto moved = move_to_end(std::move(*body), x);
        if (!moved) return std::nullopt;
        Basis b = moved->basis;
        b.pop_back();
        return Derivation{sys_, Rule::ArrowI, b, n.term, n.type, {std::move(*moved)}};
      }
      case Term::Kind::App: {
        auto f = build(n.kids[0]);
        if (!f) return std::nullopt;
        auto a = build(n.kids[1]);
        if (!a) return std::nullopt;
        std::vector<std::pair<std::string, std::string>> shared;
        for (const auto& asn : f->basis)
          if (lookup(a->basis, asn.var)) shared.emplace_back(asn.var, supply_.fresh(asn.var));
        for (const auto& [v, v2] : shared) a = rename_in(*a, v, v2);
        Basis b = f->basis;
        b.insert(b.end(), a->basis.begin(), a->basis.end());
        Term subj = Term::app(f->subject, a->subject);
        Derivation cur{sys_, Rule::ArrowE, b, subj, n.type, {std::move(*f), std::move(*a)}};
        for (const auto& [v, v2] : shared) {
          if (!require(Rule::Ctr, "variable " + v + " used twice")) return std::nullopt;
          auto next = contract(std::move(cur), v, v2);
          if (!next) return std::nullopt;
          cur = std::move(*next);
        }
        return cur;
      }
    }
    return std::nullopt;
  }

  /// Adds missing assumptions with Weak and permutes with Ex until the basis equals `target`.
  std::optional<Derivation> reach(Derivation d, const Basis& target) {
    for (const auto& a : target) {
      if (lookup(d.basis, a.var)) continue;
      if (!require(Rule::Weak, "assumption " + a.var + " unused")) return std::nullopt;
      Basis b = d.basis;
      b.push_back(a);
      d = Derivation{sys_, Rule::Weak, b, d.subject, d.type, {std::move(d)}};
    }
    for (const auto& a : d.basis)
      if (!lookup(target, a.var)) {
        failure = BuildFailure{Rule::Ax, "free variable " + a.var + " missing from the basis"};
        return std::nullopt;
      }
    // Bubble into target order, one Ex per adjacent swap.
    auto rank = [&](const std::string& v) {
      for (std::size_t i = 0; i < target.size(); ++i)
        if (target[i].var == v) return i;
      return target.size();
    };
    for (std::size_t pass = 0; pass < d.basis.size(); ++pass) {
      for (std::size_t i = 0; i + 1 < d.basis.size(); ++i) {
        if (rank(d.basis[i].var) > rank(d.basis[i + 1].var)) {
          auto s = swap(std::move(d), i);
          if (!s) return std::nullopt;
          d = std::move(*s);
        }
      }
    }
    if (d.basis != target) {
      failure = BuildFailure{Rule::Ax, "basis types disagree with the requested basis"};
      return std::nullopt;
    }
    return d;
  }

 private:
  bool require(Rule r, std::string why) {
    if (admits(sys_, r)) return true;
    failure = BuildFailure{r, std::move(why)};
    return false;
  }

  std::optional<Derivation> swap(Derivation d, std::size_t i) {
    if (!require(Rule::Ex, "assumptions out of order")) return std::nullopt;
    Basis b = d.basis;
    std::swap(b[i], b[i + 1]);
    return Derivation{sys_, Rule::Ex, b, d.subject, d.type, {std::move(d)}};
  }

  std::optional<Derivation> move_to_end(Derivation d, const std::string& x) {
    std::size_t i = 0;
    while (d.basis[i].var != x) ++i;
    for (; i + 1 < d.basis.size(); ++i) {
      auto s = swap(std::move(d), i);
      if (!s) return std::nullopt;
      d = std::move(*s);
    }
    return d;
  }

  std::optional<Derivation> contract(Derivation d, const std::string& v, const std::string& v2) {
    std::size_t i = 0, j = 0;
    for (std::size_t k = 0; k < d.basis.size(); ++k) {
      if (d.basis[k].var == v) i = k;
      if (d.basis[k].var == v2) j = k;
    }
    while (j > i + 1) {
      auto s = swap(std::move(d), j - 1);
      if (!s) return std::nullopt;
      d = std::move(*s);
      --j;
    }
    Basis b = d.basis;
    b.erase(b.begin() + static_cast<std::ptrdiff_t>(j));
    Term subj = rename_free(d.subject, v2, v);
    return Derivation{sys_, Rule::Ctr, b, subj, d.type, {std::move(d)}};
  }

  System sys_;
  FreshSupply& supply_;
};

}  // namespace detail

/// Builds a derivation in a non-ordered system from a typed term, using Weak,
/// Ex and Ctr only where needed; fails when the system lacks a required rule.
inline std::optional<Derivation> build_structural(System s, const TypedTerm& tree, const Basis& target,
                                                  BuildFailure* why = nullptr) {
  FreshSupply supply(tree.term);
  for (const auto& a : target) supply.reserve(a.var);
  detail::Builder b(s, supply);
  auto d = b.build(tree);
  if (d) d = b.reach(std::move(*d), target);
  if (!d && why && b.failure) *why = *b.failure;
  return d;
}

inline TypedTerm with_kind(const TypedTerm& t, ArrowKind k) {
  return map_types(t, [k](const Type& x) { return with_arrow_kind(x, k); });
}

/// Typability in the relevant, affine or linear system (Curry also accepted),
/// with a reconstructed derivation.
inline std::optional<Derivation> decide(System s, const Term& t) {
  auto c = infer_curry(t);
  if (!c) return std::nullopt;
  ArrowKind k = arrow_of(s);
  Basis target = c->basis;
  for (auto& a : target) a.type = with_arrow_kind(a.type, k);
  auto d = build_structural(s, with_kind(c->tree, k), target);
  if (!d) return std::nullopt;
  if (s == System::Relevant && !check_derivation(*d)) return std::nullopt;
  return d;
}

/// Derivation of `basis |- t : ty` in a non-ordered system, if the typing is an
/// instance of the principal one.
inline std::optional<Derivation> check_typing(System s, const Basis& basis, const Term& t, const Type& ty) {
  auto c = infer_curry(t);
  if (!c) return std::nullopt;
  ArrowKind k = arrow_of(s);
  TypeSubst m;
  if (!match_type(with_arrow_kind(c->type, k), ty, m)) return std::nullopt;
  for (const auto& a : c->basis) {
    const Type* given = lookup(basis, a.var);
    if (!given || !match_type(with_arrow_kind(a.type, k), *given, m)) return std::nullopt;
  }
  // Variables left unconstrained by the request stay as they are.
  TypedTerm inst = map_types(with_kind(c->tree, k), [&](const Type& x) { return apply_once(m, x); });
  auto d = build_structural(s, inst, basis);
  if (d && !check_derivation(*d)) return std::nullopt;
  return d;
}

// ---------------------------------------------------------------------------
// Ordered type checking

class SizeBoundExceeded : public Error {
 public:
  using Error::Error;
};

inline constexpr std::size_t kOrderedBudget = 100000;

namespace detail {

class OrderedSearch {
 public:
  using Cont = std::function<bool(const TypeSubst&, const Derivation&)>;

  explicit OrderedSearch(std::size_t budget) : budget_(budget) {}

  bool go(const Basis& g, const Term& t, const Type& goal, const TypeSubst& s, const Cont& k) {
    if (++visited_ > budget_) throw SizeBoundExceeded("ordered search budget exhausted");
    Type resolved = apply_subst(s, goal);
    std::optional<std::string> key;
    if (ground(resolved) && ground_basis(g, s)) {
      key = render(g) + "|" + render(t) + "|" + render(resolved);
      if (failed_.count(*key)) return false;
    }
    bool called = false;
    Cont wrapped = [&](const TypeSubst& s2, const Derivation& d) {
      called = true;
      return k(s2, d);
    };
    bool ok = dispatch(g, t, resolved, s, wrapped);
    if (!ok && !called && key) failed_.insert(*key);
    return ok;
  }

  Type fresh() { return Type::tvar("?" + std::to_string(next_++)); }

 private:
  static bool ground(const Type& t) {
    if (t.is_var()) return t.name().empty() || t.name()[0] != '?';
    return ground(t.dom()) && ground(t.cod());
  }
  static bool ground_basis(const Basis& g, const TypeSubst& s) {
    return std::all_of(g.begin(), g.end(), [&](const Assumption& a) { return ground(apply_subst(s, a.type)); });
  }

  static bool vars_match(const Basis& g, std::size_t from, std::size_t to, const std::vector<std::string>& fv) {
    if (to - from != fv.size()) return false;
    for (std::size_t i = from; i < to; ++i)
      if (std::find(fv.begin(), fv.end(), g[i].var) == fv.end()) return false;
    return true;
  }

  bool dispatch(const Basis& g, const Term& t, const Type& goal, const TypeSubst& s, const Cont& k) {
    switch (t.kind()) {
      case Term::Kind::Var: {
        if (g.size() != 1 || g[0].var != t.name()) return false;
        TypeSubst s2 = s;
        if (!unify(g[0].type, goal, s2)) return false;
        return k(s2, Derivation{System::Ordered, Rule::Ax, g, t, goal, {}});
      }
      case Term::Kind::Abs: {
        const std::string& x = t.name();
        for (ArrowKind kind : {ArrowKind::LolliR, ArrowKind::LolliL}) {
          TypeSubst s2 = s;
          Type dom = fresh();
          Type cod = fresh();
          if (!unify(goal, Type::arrow(kind, dom, cod), s2)) continue;
          Basis inner = g;
          if (kind == ArrowKind::LolliR) inner.push_back({x, dom});
          else inner.insert(inner.begin(), {x, dom});
          Rule r = kind == ArrowKind::LolliR ? Rule::ArrowIR : Rule::ArrowIL;
          bool ok = go(inner, t.body(), cod, s2, [&](const TypeSubst& s3, const Derivation& body) {
            return k(s3, Derivation{System::Ordered, r, g, t, Type::arrow(kind, dom, cod), {body}});
          });
          if (ok) return true;
        }
        return false;
      }
      case Term::Kind::App: {
        auto fvf = free_vars(t.fun());
        auto fva = free_vars(t.arg());
        if (fvf.size() + fva.size() != g.size()) return false;
        for (ArrowKind kind : {ArrowKind::LolliR, ArrowKind::LolliL}) {
          std::size_t split = kind == ArrowKind::LolliR ? fvf.size() : fva.size();
          Basis left(g.begin(), g.begin() + static_cast<std::ptrdiff_t>(split));
          Basis right(g.begin() + static_cast<std::ptrdiff_t>(split), g.end());
          const Basis& gf = kind == ArrowKind::LolliR ? left : right;
          const Basis& ga = kind == ArrowKind::LolliR ? right : left;
          if (!vars_match(gf, 0, gf.size(), fvf) || !vars_match(ga, 0, ga.size(), fva)) continue;
          Type arg = fresh();
          Rule r = kind == ArrowKind::LolliR ? Rule::ArrowER : Rule::ArrowEL;
          bool ok = go(gf, t.fun(), Type::arrow(kind, arg, goal), s, [&](const TypeSubst& s2, const Derivation& df) {
            return go(ga, t.arg(), arg, s2, [&](const TypeSubst& s3, const Derivation& da) {
              return k(s3, Derivation{System::Ordered, r, g, t, goal, {df, da}});
            });
          });
          if (ok) return true;
        }
        return false;
      }
    }
    return false;
  }

  std::size_t budget_;
  std::size_t visited_ = 0;
  std::size_t next_ = 0;
  std::set<std::string> failed_;
};

inline Derivation resolve(const Derivation& d, const TypeSubst& s) {
  Derivation out{d.system, d.rule, d.basis, d.subject, apply_subst(s, d.type), {}};
  for (auto& a : out.basis) a.type = apply_subst(s, a.type);
  for (const auto& p : d.premises) out.premises.push_back(resolve(p, s));
  return out;
}

}  // namespace detail

/// Goal-directed search for `basis |-o t : ty`. Bases split into contiguous
/// segments fixed by the free variables of each side; right rules are tried first.
inline std::optional<Derivation> check_ordered(const Basis& basis, const Term& t, const Type& ty,
                                               std::size_t budget = kOrderedBudget) {
  if (!is_consistent(basis)) return std::nullopt;
  detail::OrderedSearch search(budget);
  std::optional<Derivation> found;
  search.go(basis, t, ty, {}, [&](const TypeSubst& s, const Derivation& d) {
    TypeSubst closed = s;
    // Metavariables nothing constrains become ordinary type variables.
    auto close = [&](auto&& self, const Type& x) -> void {
      Type r = apply_subst(closed, x);
      if (r.is_var()) {
        if (!r.name().empty() && r.name()[0] == '?') closed.insert_or_assign(r.name(), Type::tvar("t" + r.name().substr(1)));
        return;
      }
      self(self, r.dom());
      self(self, r.cod());
    };
    auto walk = [&](auto&& self, const Derivation& n) -> void {
      close(close, n.type);
      for (const auto& a : n.basis) close(close, a.type);
      for (const auto& p : n.premises) self(self, p);
    };
    walk(walk, d);
    found = detail::resolve(d, closed);
    return true;
  });
  return found;
}

}  // namespace lexp
