#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lexp/reduction.hpp"
#include "lexp/syntax.hpp"
#include "lexp/term.hpp"
#include "lexp/types.hpp"

namespace lexp {

enum class InterRule : std::uint8_t { Ax, ArrowI, ArrowIPrime, ArrowE };

inline std::string_view to_string(InterRule r) {
  switch (r) {
    case InterRule::Ax: return "Ax";
    case InterRule::ArrowI: return "ArrowI";
    case InterRule::ArrowIPrime: return "ArrowI'";
    case InterRule::ArrowE: return "ArrowE";
  }
  return "?";
}

/// ArrowE premises: the function first, then one premise per member of its domain.
struct InterDerivation {
  InterRule rule;
  TypeEnv env;
  Term subject;
  InterType type;
  std::vector<InterDerivation> premises;
  Flavor flavor = Flavor::ACI;
};

inline const TypeEnv& env_of(const InterDerivation& d) { return d.env; }

class InternalError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Smart constructors: environments and types follow from the premises.

inline InterDerivation inter_ax(const std::string& x, const InterType& t, Flavor f) {
  return {InterRule::Ax, TypeEnv{{x, {t}}}, Term::var(x), t, {}, f};
}

/// ArrowI when the premise environment mentions the binder, otherwise ArrowI'
/// with domain `vacuous`.
inline InterDerivation inter_abs(const std::string& x, InterDerivation body, const InterType& vacuous) {
  TypeEnv env = body.env;
  Term subj = Term::abs(x, body.subject);
  Flavor f = body.flavor;
  if (auto it = env.find(x); it != env.end()) {
    auto dom = it->second;
    env.erase(it);
    InterType ty = InterType::arrow(std::move(dom), body.type);
    return {InterRule::ArrowI, std::move(env), subj, ty, {std::move(body)}, f};
  }
  InterType ty = InterType::arrow(vacuous, body.type);
  return {InterRule::ArrowIPrime, std::move(env), subj, ty, {std::move(body)}, f};
}

inline InterDerivation inter_app(InterDerivation fun, std::vector<InterDerivation> args) {
  if (!fun.type.is_arrow() || args.empty()) throw InternalError("ArrowE needs an arrow and at least one argument");
  TypeEnv env = fun.env;
  for (const auto& a : args) env = env_meet(env, a.env);
  Term subj = Term::app(fun.subject, args.front().subject);
  InterType ty = fun.type.cod();
  Flavor f = fun.flavor;
  std::vector<InterDerivation> ps;
  ps.reserve(args.size() + 1);
  ps.push_back(std::move(fun));
  for (auto& a : args) ps.push_back(std::move(a));
  return {InterRule::ArrowE, std::move(env), subj, ty, std::move(ps), f};
}

inline InterDerivation with_flavor(InterDerivation d, Flavor f) {
  d.flavor = f;
  for (auto& p : d.premises) p = with_flavor(std::move(p), f);
  return d;
}

/// Rebuilds `d` so its subjects are `target` (same shape, possibly other names);
/// environments and types are recomputed bottom-up.
inline InterDerivation retarget(const InterDerivation& d, const Term& target) {
  switch (d.rule) {
    case InterRule::Ax:
      if (!target.is_var()) throw InternalError("retarget: shape mismatch at variable");
      return inter_ax(target.name(), d.type, d.flavor);
    case InterRule::ArrowI:
    case InterRule::ArrowIPrime: {
      if (!target.is_abs()) throw InternalError("retarget: shape mismatch at abstraction");
      InterDerivation r = inter_abs(target.name(), retarget(d.premises[0], target.body()), d.type.dom().front());
      if (r.rule == InterRule::ArrowI) r.type = InterType::arrow(d.type.dom(), r.type.cod());
      return r;
    }
    case InterRule::ArrowE: {
      if (!target.is_app()) throw InternalError("retarget: shape mismatch at application");
      InterDerivation f = retarget(d.premises[0], target.fun());
      std::vector<InterDerivation> args;
      for (std::size_t i = 1; i < d.premises.size(); ++i) args.push_back(retarget(d.premises[i], target.arg()));
      return inter_app(std::move(f), std::move(args));
    }
  }
  throw InternalError("retarget: unknown rule");
}

/// Applies `s` to every type in the derivation.
inline InterDerivation apply_subst(const InterSubst& s, const InterDerivation& d) {
  InterDerivation out{d.rule, apply_subst(s, d.env), d.subject, apply_subst(s, d.type), {}, d.flavor};
  for (const auto& p : d.premises) out.premises.push_back(apply_subst(s, p));
  return out;
}

/// Renames type variables to a, b, c, ... by first appearance (root type, root
/// environment, then the rest of the tree).
inline InterDerivation prettify(const InterDerivation& d) {
  std::vector<std::string> order;
  type_vars(d.type, order);
  for (const auto& [x, ts] : d.env)
    for (const auto& t : ts) type_vars(t, order);
  auto walk = [&](auto&& self, const InterDerivation& n) -> void {
    type_vars(n.type, order);
    for (const auto& p : n.premises) self(self, p);
  };
  walk(walk, d);
  InterSubst s;
  for (std::size_t i = 0; i < order.size(); ++i) {
    std::string name(1, static_cast<char>('a' + i % 26));
    if (i >= 26) name += std::to_string(i / 26);
    s.emplace(order[i], InterType::tvar(name));
  }
  return apply_subst(s, d);
}

// ---------------------------------------------------------------------------
// Checking

struct InterCheck {
  bool ok = true;
  std::string diagnostic;
  explicit operator bool() const noexcept { return ok; }
};

namespace detail {

inline std::string inter_check_node(const InterDerivation& d) {
  const Flavor f = d.flavor;
  const auto& ps = d.premises;
  for (const auto& p : ps)
    if (p.flavor != f) return "premise under another flavor";
  for (const auto& [x, ts] : d.env)
    if (ts.empty()) return "empty intersection for " + x;
  switch (d.rule) {
    case InterRule::Ax: {
      if (!ps.empty()) return "Ax takes no premises";
      if (!d.subject.is_var()) return "Ax subject must be a variable";
      auto it = d.env.find(d.subject.name());
      if (d.env.size() != 1 || it == d.env.end() || it->second.size() != 1 || !inter_eq(it->second[0], d.type, f))
        return "Ax environment must be exactly {x:type}";
      return {};
    }
    case InterRule::ArrowI: {
      if (ps.size() != 1) return "ArrowI takes one premise";
      const auto& p = ps[0];
      if (!d.subject.is_abs() || p.subject != d.subject.body()) return "premise subject must be the body";
      const std::string& x = d.subject.name();
      auto it = p.env.find(x);
      if (it == p.env.end()) return "binder not declared in the premise environment";
      if (!d.type.is_arrow() || !inter_list_eq(d.type.dom(), it->second, f))
        return "domain must be the full intersection declared for the binder";
      if (!inter_eq(d.type.cod(), p.type, f)) return "codomain must be the body type";
      TypeEnv rest = p.env;
      rest.erase(x);
      if (!env_eq(rest, d.env, f)) return "environment must be the premise environment without the binder";
      return {};
    }
    case InterRule::ArrowIPrime: {
      if (ps.size() != 1) return "ArrowI' takes one premise";
      const auto& p = ps[0];
      if (!d.subject.is_abs() || p.subject != d.subject.body()) return "premise subject must be the body";
      if (occurs_free(p.subject, d.subject.name())) return "ArrowI' requires the binder not to occur free";
      if (!d.type.is_arrow() || d.type.dom().size() != 1) return "ArrowI' domain must be a single type";
      if (!inter_eq(d.type.cod(), p.type, f)) return "codomain must be the body type";
      if (!env_eq(p.env, d.env, f)) return "environment must be unchanged";
      return {};
    }
    case InterRule::ArrowE: {
      if (ps.size() < 2) return "ArrowE takes a function and at least one argument premise";
      const auto& fn = ps[0];
      if (!d.subject.is_app() || fn.subject != d.subject.fun()) return "function premise subject mismatch";
      if (!fn.type.is_arrow()) return "function type must be an arrow";
      std::vector<InterType> args;
      TypeEnv env = fn.env;
      for (std::size_t i = 1; i < ps.size(); ++i) {
        if (ps[i].subject != d.subject.arg()) return "argument premise subject mismatch";
        args.push_back(ps[i].type);
        env = env_meet(env, ps[i].env);
      }
      if (!inter_list_eq(fn.type.dom(), args, f)) return "argument types must form the function domain";
      if (!inter_eq(fn.type.cod(), d.type, f)) return "result must be the function codomain";
      if (!env_eq(env, d.env, f)) return "environment must be the meet of the premise environments";
      return {};
    }
  }
  return "unknown rule";
}

inline InterCheck inter_check_rec(const InterDerivation& d, const std::string& path) {
  if (std::string msg = inter_check_node(d); !msg.empty())
    return {false, "node " + (path.empty() ? std::string("root") : path) + " (" + std::string(to_string(d.rule)) +
                       ", " + render(d.env) + " |- " + render(d.subject) + " : " + render(d.type) + "): " + msg};
  for (std::size_t i = 0; i < d.premises.size(); ++i) {
    auto r = inter_check_rec(d.premises[i], path + (path.empty() ? "" : ".") + std::to_string(i));
    if (!r) return r;
  }
  return {};
}

}  // namespace detail

/// Local rule conformance at every node, comparing types under the derivation's flavor.
inline InterCheck check_inter(const InterDerivation& d) { return detail::inter_check_rec(d, ""); }

/// Every node's environment declares exactly the free variables of its subject.
inline bool env_is_relevant(const InterDerivation& d) {
  auto fv = free_vars(d.subject);
  if (fv.size() != d.env.size()) return false;
  for (const auto& x : fv)
    if (!d.env.count(x)) return false;
  return std::all_of(d.premises.begin(), d.premises.end(), env_is_relevant);
}

// ---------------------------------------------------------------------------
// Inference

class TypeVarSupply {
 public:
  InterType fresh() { return InterType::tvar("t" + std::to_string(next_++)); }

 private:
  std::size_t next_ = 0;
};

namespace detail {
inline std::pair<Term, std::vector<Term>> spine(const Term& t) {
  std::vector<Term> args;
  Term h = t;
  while (h.is_app()) {
    args.push_back(h.arg());
    h = h.fun();
  }
  std::reverse(args.begin(), args.end());
  return {h, args};
}

inline InterDerivation nf_rec(const Term& t, Flavor f, TypeVarSupply& tv) {
  if (t.is_abs()) {
    InterDerivation body = nf_rec(t.body(), f, tv);
    InterType vac = body.env.count(t.name()) ? body.type : tv.fresh();
    return inter_abs(t.name(), std::move(body), vac);
  }
  auto [head, args] = spine(t);
  if (!head.is_var()) throw InternalError("infer_nf: term is not in normal form");
  std::vector<InterDerivation> ds;
  for (const auto& a : args) ds.push_back(nf_rec(a, f, tv));
  InterType ty = tv.fresh();
  for (auto it = ds.rbegin(); it != ds.rend(); ++it) ty = InterType::arrow(it->type, ty);
  InterDerivation acc = inter_ax(head.name(), ty, f);
  for (auto& d : ds) acc = inter_app(std::move(acc), {std::move(d)});
  return acc;
}
}  // namespace detail

/// Principal typing of a beta normal form: applications get singleton domains,
/// abstractions collect the occurrence types of their binder left to right.
inline InterDerivation infer_nf(const Term& t, Flavor f) {
  TypeVarSupply tv;
  return prettify(detail::nf_rec(t, f, tv));
}

struct InferResult {
  std::optional<InterDerivation> derivation;  // absent: not typable within fuel
  std::size_t steps = 0;                      // contractions spent, erased arguments included
  bool typable() const noexcept { return derivation.has_value(); }
};

namespace detail {

class Inferencer {
 public:
  Inferencer(Flavor f, std::size_t fuel) : f_(f), fuel_(fuel) {}

  std::size_t steps = 0;

  std::optional<InterDerivation> run(const Term& t) {
    // Contract head redexes until a head normal form, remembering each redex.
    std::vector<Term> chain;
    Term cur = t;
    for (;;) {
      auto [head, args] = spine(cur);
      if (!head.is_abs() || args.empty()) break;
      if (steps >= fuel_) return std::nullopt;
      ++steps;
      chain.push_back(cur);
      cur = beta_step(cur, *weak_head_position(cur));
    }
    auto d = head_normal(cur);
    if (!d) return std::nullopt;
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
      d = expand_head(*it, *d);
      if (!d) return std::nullopt;
    }
    return d;
  }

 private:
  std::optional<InterDerivation> head_normal(const Term& t) {
    if (t.is_abs()) {
      auto body = run(t.body());
      if (!body) return std::nullopt;
      InterType vac = body->env.count(t.name()) ? body->type : tv_.fresh();
      return inter_abs(t.name(), std::move(*body), vac);
    }
    auto [head, args] = spine(t);
    std::vector<InterDerivation> ds;
    for (const auto& a : args) {
      auto d = run(a);
      if (!d) return std::nullopt;
      ds.push_back(std::move(*d));
    }
    InterType ty = tv_.fresh();
    for (auto it = ds.rbegin(); it != ds.rend(); ++it) ty = InterType::arrow(it->type, ty);
    InterDerivation acc = inter_ax(head.name(), ty, f_);
    for (auto& d : ds) acc = inter_app(std::move(acc), {std::move(d)});
    return acc;
  }

  /// Detaches the subderivations that sit where `p` has the variable x.
  InterDerivation detach(const InterDerivation& d, const Term& p, const std::string& x, const Term& q,
                         std::vector<InterDerivation>& out) {
    switch (p.kind()) {
      case Term::Kind::Var:
        if (p.name() == x) {
          out.push_back(retarget(d, q));
          return inter_ax(x, d.type, f_);
        }
        return inter_ax(p.name(), d.type, f_);
      case Term::Kind::Abs: {
        InterDerivation body = detach(d.premises.at(0), p.body(), x, q, out);
        return inter_abs(p.name(), std::move(body), d.type.dom().front());
      }
      case Term::Kind::App: {
        InterDerivation fn = detach(d.premises.at(0), p.fun(), x, q, out);
        std::vector<InterDerivation> args;
        for (std::size_t i = 1; i < d.premises.size(); ++i) args.push_back(detach(d.premises[i], p.arg(), x, q, out));
        return inter_app(std::move(fn), std::move(args));
      }
    }
    throw InternalError("detach: unknown term");
  }

  /// Given a derivation of the contractum of the head redex of `t`, types `t`.
  std::optional<InterDerivation> expand_head(const Term& t, const InterDerivation& reduct) {
    auto [head, args] = spine(t);
    Term lam = head;
    Term q = args.front();
    // Peel the spine arguments N1..Nk off the reduct derivation.
    std::vector<const InterDerivation*> levels;
    const InterDerivation* cur = &reduct;
    for (std::size_t i = 1; i < args.size(); ++i) {
      levels.push_back(cur);
      cur = &cur->premises.at(0);
    }
    const std::string& x = lam.name();
    Term p = lam.body();
    std::optional<InterDerivation> redex;
    if (occurs_free(p, x)) {
      std::vector<InterDerivation> copies;
      InterDerivation body = detach(*cur, p, x, q, copies);
      InterType vac = copies.front().type;
      InterDerivation fn = inter_abs(x, std::move(body), vac);
      redex = inter_app(std::move(fn), std::move(copies));
    } else {
      auto dq = run(q);
      if (!dq) return std::nullopt;
      InterType vac = dq->type;
      InterDerivation fn = inter_abs(x, retarget(*cur, p), vac);
      redex = inter_app(std::move(fn), {std::move(*dq)});
    }
    InterDerivation acc = std::move(*redex);
    for (std::size_t i = 1; i < args.size(); ++i) {
      const InterDerivation* lvl = levels[levels.size() - i];
      std::vector<InterDerivation> as;
      for (std::size_t j = 1; j < lvl->premises.size(); ++j) as.push_back(retarget(lvl->premises[j], args[i]));
      acc = inter_app(std::move(acc), std::move(as));
    }
    return acc;
  }

  Flavor f_;
  std::size_t fuel_;
  TypeVarSupply tv_;
};

}  // namespace detail

/// Typability by subject expansion along the leftmost reduction: the head redex
/// is contracted, the contractum typed, and the redex typing rebuilt from it.
/// Erased arguments are typed on their own. The result is checked before return.
inline InferResult infer(const Term& t, Flavor f, std::size_t fuel = kDefaultFuel) {
  detail::Inferencer inf(f, fuel);
  auto d = inf.run(t);
  InferResult r;
  r.steps = inf.steps;
  if (!d) return r;
  InterDerivation out = prettify(with_flavor(std::move(*d), f));
  if (auto c = check_inter(out); !c) throw InternalError("inferred derivation fails to check: " + c.diagnostic);
  r.derivation = std::move(out);
  return r;
}

// ---------------------------------------------------------------------------
// Subject reduction on derivations

namespace detail {

/// Rebuilds an abstraction over a new body. The old domain is kept when it is a
/// permutation of the binder's new environment entry, so the type stays put.
inline InterDerivation rebuild_abs(const InterDerivation& old, InterDerivation body) {
  InterDerivation r = inter_abs(old.subject.name(), std::move(body), old.type.dom().front());
  Flavor cmp = old.flavor == Flavor::ACI ? Flavor::ACI : Flavor::AC;
  if (r.rule == InterRule::ArrowI && old.rule == InterRule::ArrowI && inter_list_eq(r.type.dom(), old.type.dom(), cmp))
    r.type = InterType::arrow(old.type.dom(), r.type.cod());
  return r;
}

/// Replaces the Ax leaves of x by argument derivations picked by `pick`.
inline InterDerivation plug_leaves(const InterDerivation& d, const std::string& x,
                                   const std::function<std::optional<InterDerivation>(const InterType&)>& pick,
                                   bool& ok) {
  switch (d.rule) {
    case InterRule::Ax: {
      if (d.subject.name() != x) return d;
      auto a = pick(d.type);
      if (!a) {
        ok = false;
        return d;
      }
      return *a;
    }
    case InterRule::ArrowI:
    case InterRule::ArrowIPrime:
      return rebuild_abs(d, plug_leaves(d.premises[0], x, pick, ok));
    case InterRule::ArrowE: {
      InterDerivation fn = plug_leaves(d.premises[0], x, pick, ok);
      std::vector<InterDerivation> args;
      for (std::size_t i = 1; i < d.premises.size(); ++i) args.push_back(plug_leaves(d.premises[i], x, pick, ok));
      return inter_app(std::move(fn), std::move(args));
    }
  }
  return d;
}

inline std::optional<InterDerivation> contract_node(const InterDerivation& d) {
  if (d.rule != InterRule::ArrowE) return std::nullopt;
  const InterDerivation& fn = d.premises[0];
  if (fn.rule == InterRule::ArrowIPrime) return fn.premises[0];
  if (fn.rule != InterRule::ArrowI) return std::nullopt;
  const std::string& x = fn.subject.name();
  std::vector<bool> used(d.premises.size(), false);
  std::size_t next = 1;
  Flavor f = d.flavor;
  auto pick = [&](const InterType& ty) -> std::optional<InterDerivation> {
    if (f == Flavor::A) {
      if (next >= d.premises.size() || !inter_eq(d.premises[next].type, ty, f)) return std::nullopt;
      return d.premises[next++];
    }
    for (std::size_t i = 1; i < d.premises.size(); ++i) {
      if (f == Flavor::AC && used[i]) continue;
      if (inter_eq(d.premises[i].type, ty, f)) {
        used[i] = true;
        return d.premises[i];
      }
    }
    return std::nullopt;
  };
  bool ok = true;
  InterDerivation out = plug_leaves(fn.premises[0], x, pick, ok);
  if (!ok) return std::nullopt;
  return out;
}

inline std::optional<InterDerivation> reduce_at(const InterDerivation& d, const Path& p, std::size_t i) {
  if (i == p.size()) return contract_node(d);
  switch (p[i]) {
    case Step::Under: {
      if (d.rule != InterRule::ArrowI && d.rule != InterRule::ArrowIPrime) return std::nullopt;
      auto body = reduce_at(d.premises[0], p, i + 1);
      if (!body) return std::nullopt;
      return rebuild_abs(d, std::move(*body));
    }
    case Step::Left: {
      if (d.rule != InterRule::ArrowE) return std::nullopt;
      auto fn = reduce_at(d.premises[0], p, i + 1);
      if (!fn) return std::nullopt;
      std::vector<InterDerivation> args(d.premises.begin() + 1, d.premises.end());
      return inter_app(std::move(*fn), std::move(args));
    }
    case Step::Right: {
      if (d.rule != InterRule::ArrowE) return std::nullopt;
      std::vector<InterDerivation> args;
      for (std::size_t j = 1; j < d.premises.size(); ++j) {
        auto a = reduce_at(d.premises[j], p, i + 1);
        if (!a) return std::nullopt;
        args.push_back(std::move(*a));
      }
      return inter_app(d.premises[0], std::move(args));
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// Derivation of the reduct obtained by contracting the redex at `p` in every
/// copy of it inside `d`. Absent when the arguments cannot be matched to the
/// binder's occurrences. The type may differ from the original when an erased
/// argument carried the only occurrences of an enclosing binder; callers compare.
inline std::optional<InterDerivation> subject_reduce(const InterDerivation& d, const RedexPosition& p) {
  auto raw = detail::reduce_at(d, p, 0);
  if (!raw) return std::nullopt;
  return retarget(*raw, beta_step(d.subject, p));
}

}  // namespace lexp
