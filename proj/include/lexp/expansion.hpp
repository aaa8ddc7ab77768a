#pragma once

#include <algorithm>
#include <cstddef>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "lexp/context.hpp"
#include "lexp/intersection.hpp"
#include "lexp/reduction.hpp"
#include "lexp/substructural.hpp"
#include "lexp/term.hpp"
#include "lexp/types.hpp"

namespace lexp {

enum class ExpansionFlavor : std::uint8_t { ACI, AC, Ordered };
enum class Orientation : std::uint8_t { RightOnly, Mixed };

inline std::string_view to_string(ExpansionFlavor f) {
  switch (f) {
    case ExpansionFlavor::ACI: return "aci";
    case ExpansionFlavor::AC: return "ac";
    case ExpansionFlavor::Ordered: return "ordered";
  }
  return "?";
}

/// Flavor of the intersection derivations each expansion consumes.
inline Flavor source_flavor(ExpansionFlavor f) {
  switch (f) {
    case ExpansionFlavor::ACI: return Flavor::ACI;
    case ExpansionFlavor::AC: return Flavor::AC;
    case ExpansionFlavor::Ordered: return Flavor::A;
  }
  return Flavor::ACI;
}

class OrderViolation : public Error {
 public:
  using Error::Error;
};

class ExpansionError : public Error {
 public:
  using Error::Error;
};

struct ExpansionResult {
  ExpansionFlavor flavor;
  Term expanded;
  Type annotation;
  ExpansionContext context;
  Derivation derivation;                   // Curry, Affine or Ordered
  std::optional<Derivation> strict;        // Relevant or Linear, for lambda-I subjects
};

inline System target_system(ExpansionFlavor f) {
  switch (f) {
    case ExpansionFlavor::ACI: return System::Curry;
    case ExpansionFlavor::AC: return System::Affine;
    case ExpansionFlavor::Ordered: return System::Ordered;
  }
  return System::Curry;
}

inline Target target_of(ExpansionFlavor f) {
  switch (f) {
    case ExpansionFlavor::ACI: return Target::ToSimple;
    case ExpansionFlavor::AC: return Target::ToLinear;
    case ExpansionFlavor::Ordered: return Target::ToOrdered;
  }
  return Target::ToSimple;
}

namespace detail {

inline std::vector<InterType> dedup_list(const std::vector<InterType>& xs) {
  std::vector<InterType> out;
  for (const auto& x : xs)
    if (std::none_of(out.begin(), out.end(), [&](const InterType& y) { return inter_eq(x, y, Flavor::ACI); }))
      out.push_back(x);
  return out;
}

inline InterDerivation dedup_env(InterDerivation d) {
  for (auto& [x, ts] : d.env) ts = dedup_list(ts);
  return d;
}

/// Idempotent normal form of an ACI derivation: duplicate members are dropped
/// (first occurrence kept) and argument premises of equal type merged.
inline InterDerivation aci_normalize(const InterDerivation& d) {
  switch (d.rule) {
    case InterRule::Ax:
      return inter_ax(d.subject.name(), dedup_stable(d.type), d.flavor);
    case InterRule::ArrowI:
    case InterRule::ArrowIPrime: {
      InterDerivation body = aci_normalize(d.premises[0]);
      InterDerivation r = dedup_env(inter_abs(d.subject.name(), std::move(body), dedup_stable(d.type.dom().front())));
      if (r.rule == InterRule::ArrowI) {
        std::vector<InterType> dom;
        for (const auto& t : d.type.dom()) dom.push_back(dedup_stable(t));
        dom = dedup_list(dom);
        if (inter_list_eq(dom, r.type.dom(), Flavor::ACI)) r.type = InterType::arrow(std::move(dom), r.type.cod());
      }
      return r;
    }
    case InterRule::ArrowE: {
      InterDerivation fn = aci_normalize(d.premises[0]);
      std::vector<InterDerivation> all;
      for (std::size_t i = 1; i < d.premises.size(); ++i) all.push_back(aci_normalize(d.premises[i]));
      std::vector<InterDerivation> args;
      for (const auto& member : fn.type.dom()) {
        const InterDerivation* chosen = nullptr;
        for (const auto& a : all) {
          if (!inter_eq(a.type, member, Flavor::ACI)) continue;
          if (!chosen) chosen = &a;
          else if (!env_eq(chosen->env, a.env, Flavor::ACI))
            throw ExpansionError("argument premises of equal type disagree on their environments");
        }
        if (!chosen) throw ExpansionError("no argument premise for a domain member");
        args.push_back(*chosen);
      }
      return dedup_env(inter_app(std::move(fn), std::move(args)));
    }
  }
  return d;
}

/// Typed abstraction chain \y1 ... yn. body.
inline TypedTerm abs_chain(const std::vector<std::string>& binders, const std::vector<Type>& doms, TypedTerm body,
                           ArrowKind k) {
  TypedTerm acc = std::move(body);
  for (std::size_t i = binders.size(); i-- > 0;) {
    Type ty = Type::arrow(k, doms[i], acc.type);
    Term tm = Term::abs(binders[i], acc.term);
    acc = TypedTerm{tm, ty, {std::move(acc)}};
  }
  return acc;
}

inline TypedTerm app_chain(TypedTerm fn, std::vector<TypedTerm> args) {
  TypedTerm acc = std::move(fn);
  for (auto& a : args) {
    if (!acc.type.is_arrow()) throw ExpansionError("application of a non-arrow");
    Type ty = acc.type.cod();
    Term tm = Term::app(acc.term, a.term);
    acc = TypedTerm{tm, ty, {std::move(acc), std::move(a)}};
  }
  return acc;
}

struct Expanded {
  TypedTerm typed;
  ExpansionContext ctx;
};

/// ACI: occurrences of a variable at equal types share one expansion variable.
class AciExpander {
 public:
  explicit AciExpander(FreshSupply& s) : supply_(s) {}

  Expanded run(const InterDerivation& d) {
    switch (d.rule) {
      case InterRule::Ax: {
        const std::string& x = d.subject.name();
        std::string y = name_for(x, d.type);
        return {TypedTerm{Term::var(y), translate(d.type, Target::ToSimple), {}},
                ExpansionContext{{VarExpansion{x, {Binding{y, d.type}}}}}};
      }
      case InterRule::ArrowI: {
        const std::string& x = d.subject.name();
        std::vector<std::pair<InterType, std::string>> frame;
        std::vector<std::string> binders;
        std::vector<Type> doms;
        for (const auto& s : d.type.dom()) {
          frame.emplace_back(s, supply_.fresh(x));
          binders.push_back(frame.back().second);
          doms.push_back(translate(s, Target::ToSimple));
        }
        scopes_.emplace_back(x, std::move(frame));
        Expanded body = run(d.premises[0]);
        scopes_.pop_back();
        const VarExpansion* e = body.ctx.find(x);
        if (!e || e->bindings.size() != binders.size())
          throw ExpansionError("binder " + x + " does not expand to one variable per domain member");
        return {abs_chain(binders, doms, std::move(body.typed), ArrowKind::Simple), remove_owner(body.ctx, x)};
      }
      case InterRule::ArrowIPrime: {
        const std::string& x = d.subject.name();
        std::string y = supply_.fresh(x);
        scopes_.emplace_back(x, std::vector<std::pair<InterType, std::string>>{});
        Expanded body = run(d.premises[0]);
        scopes_.pop_back();
        return {abs_chain({y}, {translate(d.type.dom().front(), Target::ToSimple)}, std::move(body.typed),
                          ArrowKind::Simple),
                std::move(body.ctx)};
      }
      case InterRule::ArrowE: {
        Expanded fn = run(d.premises[0]);
        ExpansionContext ctx = fn.ctx;
        std::vector<TypedTerm> args;
        for (std::size_t i = 1; i < d.premises.size(); ++i) {
          Expanded a = run(d.premises[i]);
          ctx = ctx_union(ctx, a.ctx, UnionMode::MergeIdentical);
          args.push_back(std::move(a.typed));
        }
        return {app_chain(std::move(fn.typed), std::move(args)), std::move(ctx)};
      }
    }
    throw ExpansionError("unknown rule");
  }

 private:
  std::string name_for(const std::string& x, const InterType& t) {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      if (it->first != x) continue;
      for (const auto& [ty, name] : it->second)
        if (inter_eq(ty, t, Flavor::ACI)) return name;
      throw ExpansionError("occurrence of " + x + " at a type outside its domain");
    }
    for (const auto& [key, name] : free_)
      if (key.first == x && inter_eq(key.second, t, Flavor::ACI)) return name;
    std::string y = supply_.fresh(x);
    free_.emplace_back(std::make_pair(x, t), y);
    return y;
  }

  FreshSupply& supply_;
  std::vector<std::pair<std::string, std::vector<std::pair<InterType, std::string>>>> scopes_;
  std::vector<std::pair<std::pair<std::string, InterType>, std::string>> free_;
};

/// Matches the members of `want` to distinct members of `have` (multiset), in order of `want`.
inline std::optional<std::vector<std::size_t>> multiset_assign(const std::vector<InterType>& want,
                                                               const std::vector<InterType>& have) {
  if (want.size() != have.size()) return std::nullopt;
  std::vector<bool> used(have.size(), false);
  std::vector<std::size_t> out;
  for (const auto& w : want) {
    bool found = false;
    for (std::size_t j = 0; j < have.size() && !found; ++j)
      if (!used[j] && inter_eq(w, have[j], Flavor::AC)) {
        used[j] = true;
        out.push_back(j);
        found = true;
      }
    if (!found) return std::nullopt;
  }
  return out;
}

/// AC: every occurrence gets its own expansion variable.
class AcExpander {
 public:
  explicit AcExpander(FreshSupply& s) : supply_(s) {}

  Expanded run(const InterDerivation& d) {
    switch (d.rule) {
      case InterRule::Ax: {
        const std::string& x = d.subject.name();
        std::string y = supply_.fresh(x);
        return {TypedTerm{Term::var(y), translate(d.type, Target::ToLinear), {}},
                ExpansionContext{{VarExpansion{x, {Binding{y, d.type}}}}}};
      }
      case InterRule::ArrowI: {
        const std::string& x = d.subject.name();
        Expanded body = run(d.premises[0]);
        const VarExpansion* e = body.ctx.find(x);
        if (!e) throw ExpansionError("binder " + x + " has no expansion");
        std::vector<InterType> have;
        for (const auto& b : e->bindings) have.push_back(b.type);
        auto assign = multiset_assign(d.type.dom(), have);
        if (!assign) throw ExpansionError("expansion of " + x + " does not match its domain");
        std::vector<std::string> binders;
        std::vector<Type> doms;
        for (std::size_t i = 0; i < assign->size(); ++i) {
          binders.push_back(e->bindings[(*assign)[i]].var);
          doms.push_back(translate(d.type.dom()[i], Target::ToLinear));
        }
        return {abs_chain(binders, doms, std::move(body.typed), ArrowKind::Lolli), remove_owner(body.ctx, x)};
      }
      case InterRule::ArrowIPrime: {
        std::string y = supply_.fresh(d.subject.name());
        Expanded body = run(d.premises[0]);
        return {abs_chain({y}, {translate(d.type.dom().front(), Target::ToLinear)}, std::move(body.typed),
                          ArrowKind::Lolli),
                std::move(body.ctx)};
      }
      case InterRule::ArrowE: {
        Expanded fn = run(d.premises[0]);
        std::vector<InterType> have;
        for (std::size_t i = 1; i < d.premises.size(); ++i) have.push_back(d.premises[i].type);
        auto assign = multiset_assign(d.premises[0].type.dom(), have);
        if (!assign) throw ExpansionError("argument premises do not match the function domain");
        ExpansionContext ctx = fn.ctx;
        std::vector<TypedTerm> args;
        for (std::size_t j : *assign) {
          Expanded a = run(d.premises[j + 1]);
          ctx = ctx_union(ctx, a.ctx);
          args.push_back(std::move(a.typed));
        }
        return {app_chain(std::move(fn.typed), std::move(args)), std::move(ctx)};
      }
    }
    throw ExpansionError("unknown rule");
  }

 private:
  FreshSupply& supply_;
};

struct OrderedPiece {
  Term term;
  Type annotation;
  ExpansionContext ctx;
  Derivation derivation;
};

/// Ordered expansion over list contexts, building the ordered derivation alongside.
class OrderedExpander {
 public:
  OrderedExpander(FreshSupply& s, Orientation o) : supply_(s), orientation_(o) {}

  OrderedPiece run(const InterDerivation& d) {
    switch (d.rule) {
      case InterRule::Ax: {
        std::string y = supply_.fresh(d.subject.name());
        Type ann = translate(d.type, Target::ToOrdered);
        Term v = Term::var(y);
        return {v, ann, ExpansionContext{{VarExpansion{d.subject.name(), {Binding{y, d.type}}}}},
                Derivation{System::Ordered, Rule::Ax, {{y, ann}}, v, ann, {}}};
      }
      case InterRule::ArrowIPrime:
        throw OrderViolation("abstraction over " + d.subject.name() + " is vacuous; ordered expansion needs a lambda-I term");
      case InterRule::ArrowI: return abstraction(d);
      case InterRule::ArrowE: return application(d);
    }
    throw ExpansionError("unknown rule");
  }

 private:
  OrderedPiece abstraction(const InterDerivation& d) {
    const std::string& x = d.subject.name();
    OrderedPiece body = run(d.premises[0]);
    const auto& entries = body.ctx.entries;
    std::size_t idx = 0;
    while (idx < entries.size() && entries[idx].owner != x) ++idx;
    if (idx == entries.size()) throw OrderViolation("binder " + x + " has no expansion");
    const auto& bs = entries[idx].bindings;
    const auto& dom = d.type.dom();
    auto types_match = [&](bool reversed) {
      if (bs.size() != dom.size()) return false;
      for (std::size_t i = 0; i < bs.size(); ++i)
        if (!inter_eq(bs[reversed ? bs.size() - 1 - i : i].type, dom[i], Flavor::A)) return false;
      return true;
    };
    bool right = idx + 1 == entries.size() && types_match(false);
    bool left = idx == 0 && types_match(true);
    if (!right && (orientation_ == Orientation::RightOnly || !left))
      throw OrderViolation("binder " + x + " is neither last (right rule) nor first in reverse (left rule)");
    std::size_t n = bs.size();
    std::vector<std::string> binders(n);
    for (std::size_t i = 0; i < n; ++i) binders[i] = bs[right ? i : n - 1 - i].var;
    ArrowKind kind = right ? ArrowKind::LolliR : ArrowKind::LolliL;
    Rule rule = right ? Rule::ArrowIR : Rule::ArrowIL;
    Derivation cur = std::move(body.derivation);
    Term term = body.term;
    Type ann = body.annotation;
    for (std::size_t i = n; i-- > 0;) {
      Type dom_i = translate(dom[i], Target::ToOrdered);
      Basis b = cur.basis;
      Assumption want{binders[i], dom_i};
      if (b.empty() || !((right ? b.back() : b.front()) == want))
        throw OrderViolation("binder " + binders[i] + " is not at the " + (right ? "end" : "start") +
                             " of the induced basis");
      if (right) b.pop_back();
      else b.erase(b.begin());
      term = Term::abs(binders[i], term);
      ann = Type::arrow(kind, dom_i, ann);
      cur = Derivation{System::Ordered, rule, b, term, ann, {std::move(cur)}};
    }
    return {term, ann, remove_owner(body.ctx, x), std::move(cur)};
  }

  OrderedPiece application(const InterDerivation& d) {
    OrderedPiece acc = run(d.premises[0]);
    for (std::size_t i = 1; i < d.premises.size(); ++i) {
      OrderedPiece a = run(d.premises[i]);
      if (!acc.annotation.is_arrow()) throw OrderViolation("function annotation has too few arrows");
      ArrowKind k = acc.annotation.arrow_kind();
      if (acc.annotation.dom() != a.annotation)
        throw OrderViolation("argument annotation " + render(a.annotation) + " differs from the function domain " +
                             render(acc.annotation.dom()));
      Term term = Term::app(acc.term, a.term);
      Type ann = acc.annotation.cod();
      Basis b;
      ExpansionContext ctx;
      Rule rule;
      if (k == ArrowKind::LolliR) {
        b = acc.derivation.basis;
        b.insert(b.end(), a.derivation.basis.begin(), a.derivation.basis.end());
        ctx = ctx_append(acc.ctx, a.ctx);
        rule = Rule::ArrowER;
      } else if (k == ArrowKind::LolliL) {
        b = a.derivation.basis;
        b.insert(b.end(), acc.derivation.basis.begin(), acc.derivation.basis.end());
        ctx = ctx_append(a.ctx, acc.ctx);
        rule = Rule::ArrowEL;
      } else {
        throw OrderViolation("function annotation uses a non-ordered arrow");
      }
      Derivation der{System::Ordered, rule, b, term, ann, {std::move(acc.derivation), std::move(a.derivation)}};
      acc = OrderedPiece{term, ann, std::move(ctx), std::move(der)};
    }
    return acc;
  }

  FreshSupply& supply_;
  Orientation orientation_;
};

inline FreshSupply supply_for(const InterDerivation& d) {
  // Every binder and occurrence is renamed, so only free names need avoiding.
  FreshSupply s;
  for (const auto& x : free_vars(d.subject)) s.reserve(x);
  for (const auto& [x, ts] : d.env) s.reserve(x);
  return s;
}

}  // namespace detail

/// Expansion under idempotent intersections: the derivation is first put in
/// idempotent normal form. Induces a Curry derivation, and a Relevant one for
/// lambda-I subjects.
inline ExpansionResult expand_aci(const InterDerivation& d) {
  InterDerivation n = detail::aci_normalize(with_flavor(d, Flavor::ACI));
  FreshSupply supply = detail::supply_for(n);
  detail::AciExpander ex(supply);
  detail::Expanded e = ex.run(n);
  ExpansionContext ctx = order_owners(e.ctx, free_vars(d.subject));
  Basis basis = expctx_to_basis(ctx, Target::ToSimple);
  BuildFailure why;
  auto der = build_structural(System::Curry, e.typed, basis, &why);
  if (!der) throw ExpansionError("no Curry derivation for the expansion: " + why.reason);
  std::optional<Derivation> strict;
  if (classify(d.subject).is_lambdaI) strict = build_structural(System::Relevant, e.typed, basis);
  return {ExpansionFlavor::ACI, e.typed.term, e.typed.type, std::move(ctx), std::move(*der), std::move(strict)};
}

/// Expansion under commutative intersections: one variable per occurrence.
/// Induces an Affine derivation, and a Linear one for lambda-I subjects.
inline ExpansionResult expand_ac(const InterDerivation& d) {
  InterDerivation n = with_flavor(d, Flavor::AC);
  FreshSupply supply = detail::supply_for(n);
  detail::AcExpander ex(supply);
  detail::Expanded e = ex.run(n);
  ExpansionContext ctx = order_owners(e.ctx, free_vars(d.subject));
  Basis basis = expctx_to_basis(ctx, Target::ToLinear);
  BuildFailure why;
  auto der = build_structural(System::Affine, e.typed, basis, &why);
  if (!der) throw ExpansionError("no Affine derivation for the expansion: " + why.reason);
  std::optional<Derivation> strict;
  if (classify(d.subject).is_lambdaI) strict = build_structural(System::Linear, e.typed, basis);
  return {ExpansionFlavor::AC, e.typed.term, e.typed.type, std::move(ctx), std::move(*der), std::move(strict)};
}

/// Ordered expansion of a flavor-A derivation of a lambda-I term. Throws
/// OrderViolation when the induced ordered derivation does not exist or does
/// not have T_e(context) as its basis.
inline ExpansionResult expand_ordered(const InterDerivation& d, Orientation o = Orientation::Mixed) {
  InterDerivation n = with_flavor(d, Flavor::A);
  FreshSupply supply = detail::supply_for(n);
  detail::OrderedExpander ex(supply, o);
  detail::OrderedPiece p = ex.run(n);
  if (auto c = check_derivation(p.derivation); !c) throw OrderViolation("induced derivation fails: " + c.diagnostic);
  if (p.derivation.basis != expctx_to_basis(p.ctx, Target::ToOrdered))
    throw OrderViolation("induced basis [" + render(p.derivation.basis) + "] differs from T_e(context) [" +
                         render(expctx_to_basis(p.ctx, Target::ToOrdered)) + "]");
  return {ExpansionFlavor::Ordered, p.term, p.annotation, std::move(p.ctx), std::move(p.derivation), std::nullopt};
}

inline ExpansionResult expand(const InterDerivation& d, ExpansionFlavor f, Orientation o = Orientation::Mixed) {
  switch (f) {
    case ExpansionFlavor::ACI: return expand_aci(d);
    case ExpansionFlavor::AC: return expand_ac(d);
    case ExpansionFlavor::Ordered: return expand_ordered(d, o);
  }
  throw ExpansionError("unknown flavor");
}

/// Instantiates the derivation's type variables so that its type becomes
/// `target`; variables the target does not fix are renamed away from it.
inline std::optional<InterDerivation> instantiate(const InterDerivation& d, const InterType& target) {
  auto s = match(d.type, target, d.flavor);
  if (!s) return std::nullopt;
  std::vector<std::string> taken;
  type_vars(target, taken);
  std::vector<std::string> all;
  type_vars(d.type, all);
  for (const auto& [x, ts] : d.env)
    for (const auto& t : ts) type_vars(t, all);
  auto walk = [&](auto&& self, const InterDerivation& n) -> void {
    type_vars(n.type, all);
    for (const auto& p : n.premises) self(self, p);
  };
  walk(walk, d);
  std::size_t k = 0;
  for (const auto& v : all) {
    if (s->count(v)) continue;
    std::string name;
    do name = pretty_tvar(k++);
    while (std::find(taken.begin(), taken.end(), name) != taken.end());
    taken.push_back(name);
    s->emplace(v, InterType::tvar(name));
  }
  return apply_subst(*s, d);
}

// ---------------------------------------------------------------------------
// Reduction diagrams

struct DiagramStep {
  Term before;
  Term after;
  RedexPosition position;
  bool ok = false;
  std::string detail;
};

struct DiagramReport {
  std::vector<DiagramStep> steps;
  bool precondition = true;  // subject typable (and lambda-I where required)
  std::size_t order_violations = 0;
  bool ok() const {
    return precondition && std::all_of(steps.begin(), steps.end(), [](const DiagramStep& s) { return s.ok; });
  }
};

namespace detail {

inline bool same_type(const InterDerivation& a, const InterDerivation& b, Flavor f) { return inter_eq(a.type, b.type, f); }

/// Weak-head steps from `from` looking for `to` modulo free renaming; returns the renaming of `to`'s free variables.
inline std::optional<std::map<std::string, std::string>> whd_reach(const Term& from, const Term& to, std::size_t fuel) {
  Term cur = from;
  for (std::size_t i = 0;; ++i) {
    if (auto r = alpha_eq_modulo_free(to, cur)) return r;
    if (i == fuel) return std::nullopt;
    auto s = weak_head_step(cur);
    if (!s) return std::nullopt;
    cur = s->first;
  }
}

/// Breadth-first search over beta reducts of `from` for a term that matches `to`
/// modulo free renaming and satisfies `accept`.
template <class Accept>
bool beta_reach(const Term& from, const Term& to, std::size_t node_cap, Accept accept) {
  std::deque<Term> queue{from};
  std::vector<Term> seen{from};
  while (!queue.empty() && seen.size() <= node_cap) {
    Term cur = queue.front();
    queue.pop_front();
    if (auto r = alpha_eq_modulo_free(to, cur); r && accept(*r)) return true;
    for (const auto& p : redex_positions(cur)) {
      Term next = beta_step(cur, p);
      bool dup = std::any_of(seen.begin(), seen.end(), [&](const Term& s) { return alpha_eq(s, next); });
      if (dup) continue;
      seen.push_back(next);
      queue.push_back(next);
    }
  }
  return false;
}

}  // namespace detail

/// Along the weak-head reduction of the subject of `d`: expanding a term and
/// its weak-head reduct gives N1, A1 and N2, A2 with N1 ->>w N2 and A2 below A1.
inline DiagramReport verify_whd_diagram(const InterDerivation& d, ExpansionFlavor f, std::size_t fuel = 1000) {
  DiagramReport rep;
  Flavor fl = source_flavor(f);
  InterDerivation cur = with_flavor(d, fl);
  for (std::size_t n = 0; n < fuel; ++n) {
    auto pos = weak_head_position(cur.subject);
    if (!pos) break;
    DiagramStep step{cur.subject, beta_step(cur.subject, *pos), *pos, false, {}};
    auto next = subject_reduce(cur, *pos);
    if (!next || !detail::same_type(*next, cur, fl)) {
      step.detail = "subject reduction does not preserve the type";
      rep.steps.push_back(std::move(step));
      break;
    }
    try {
      ExpansionResult e1 = expand(cur, f);
      ExpansionResult e2 = expand(*next, f);
      auto ren = detail::whd_reach(e1.expanded, e2.expanded, fuel);
      if (!ren) {
        step.detail = render(e1.expanded) + " does not weak-head reduce to " + render(e2.expanded);
      } else if (!ctx_leq(rename_vars(e2.context, *ren), e1.context, fl)) {
        step.detail = "context of the reduct expansion is not below the original";
      } else {
        step.ok = true;
      }
    } catch (const Error& ex) {
      step.detail = ex.what();
    }
    rep.steps.push_back(std::move(step));
    cur = std::move(*next);
  }
  return rep;
}

/// For every single beta step of the subject of `d`: the expansion of the redex
/// term beta-reduces to an expansion of the reduct with the same context.
/// `require_lambda_i` off turns this into the negative harness for erasing steps.
inline DiagramReport verify_beta_diagram(const InterDerivation& d, ExpansionFlavor f, bool require_lambda_i = true,
                                         std::size_t node_cap = 2000) {
  DiagramReport rep;
  if (require_lambda_i && !classify(d.subject).is_lambdaI) {
    rep.precondition = false;
    return rep;
  }
  Flavor fl = source_flavor(f);
  InterDerivation base = with_flavor(d, fl);
  std::optional<ExpansionResult> e1;
  try {
    e1 = expand(base, f);
  } catch (const OrderViolation&) {
    ++rep.order_violations;
    return rep;
  }
  for (const auto& p : redex_positions(base.subject)) {
    DiagramStep step{base.subject, beta_step(base.subject, p), p, false, {}};
    auto next = subject_reduce(base, p);
    if (!next || !detail::same_type(*next, base, fl)) {
      step.detail = "the reduct has no expansion at the original type";
      rep.steps.push_back(std::move(step));
      continue;
    }
    try {
      ExpansionResult e2 = expand(*next, f);
      bool found = detail::beta_reach(e1->expanded, e2.expanded, node_cap, [&](const std::map<std::string, std::string>& r) {
        ExpansionContext moved = rename_vars(e2.context, r);
        return f == ExpansionFlavor::Ordered ? list_ctx_eq(moved, e1->context, fl) : set_ctx_eq(moved, e1->context, fl);
      });
      step.ok = found;
      if (!found) step.detail = "no beta reduct of " + render(e1->expanded) + " matches " + render(e2.expanded);
    } catch (const OrderViolation& ex) {
      ++rep.order_violations;
      step.detail = std::string("order violation: ") + ex.what();
    } catch (const Error& ex) {
      step.detail = ex.what();
    }
    rep.steps.push_back(std::move(step));
  }
  return rep;
}

}  // namespace lexp
