#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "lexp/context.hpp"
#include "lexp/expansion.hpp"
#include "lexp/intersection.hpp"
#include "lexp/reduction.hpp"
#include "lexp/substructural.hpp"
#include "lexp/syntax.hpp"
#include "lexp/term.hpp"
#include "lexp/types.hpp"

namespace lexp {

class CapExceeded : public Error {
 public:
  using Error::Error;
};

inline constexpr std::size_t kEnumerationCap = 9;

// ---------------------------------------------------------------------------
// Enumeration

namespace detail {

inline constexpr std::array<const char*, 9> kBinderNames{"x", "y", "u", "v", "w", "p", "q", "r", "s"};
inline constexpr std::array<const char*, 5> kFreeNames{"z", "a", "b", "c", "d"};

/// Terms of exactly `n` constructors under `depth` binders, having used `nfree`
/// free names so far. Free names are introduced in order of first appearance.
class Enumerator {
 public:
  explicit Enumerator(bool closed) : closed_(closed) {}

  const std::vector<std::pair<Term, std::size_t>>& gen(std::size_t n, std::size_t depth, std::size_t nfree) {
    auto key = std::make_tuple(n, depth, nfree);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    std::vector<std::pair<Term, std::size_t>> out;
    if (n == 1) {
      for (std::size_t i = 0; i < depth; ++i) out.emplace_back(Term::var(kBinderNames[i]), nfree);
      if (!closed_) {
        for (std::size_t i = 0; i < nfree; ++i) out.emplace_back(Term::var(kFreeNames[i]), nfree);
        if (nfree < kFreeNames.size()) out.emplace_back(Term::var(kFreeNames[nfree]), nfree + 1);
      }
    } else {
      for (const auto& [body, nf] : gen(n - 1, depth + 1, nfree)) out.emplace_back(Term::abs(kBinderNames[depth], body), nf);
      for (std::size_t i = 1; i + 1 < n; ++i) {
        auto left = gen(i, depth, nfree);
        for (const auto& [l, nf1] : left)
          for (const auto& [r, nf2] : gen(n - 1 - i, depth, nf1)) out.emplace_back(Term::app(l, r), nf2);
      }
    }
    return memo_.emplace(key, std::move(out)).first->second;
  }

 private:
  bool closed_;
  std::map<std::tuple<std::size_t, std::size_t, std::size_t>, std::vector<std::pair<Term, std::size_t>>> memo_;
};

}  // namespace detail

/// All terms of size 1..max_size, one per alpha class (open terms: one per
/// class up to renaming of free variables), smaller sizes first.
inline std::vector<Term> enumerate_terms(std::size_t max_size, bool closed_only, std::size_t cap = kEnumerationCap) {
  if (max_size > cap)
    throw CapExceeded("enumeration size " + std::to_string(max_size) + " exceeds the cap " + std::to_string(cap));
  detail::Enumerator en(closed_only);
  std::vector<Term> out;
  for (std::size_t n = 1; n <= max_size; ++n)
    for (const auto& [t, nf] : en.gen(n, 0, 0)) out.push_back(canonicalize(t));
  return out;
}

// ---------------------------------------------------------------------------
// Corpora

enum class CorpusFilter : std::uint8_t { LambdaI, Affine, Linear, Typable };

struct Corpus {
  std::string name;
  std::vector<Term> terms;
};

inline std::vector<std::string> golden_sources() {
  return {
      "(\\x. x x) (\\x. x)",
      "(\\f. f (\\x. x x) (f (\\x. x))) (\\x. x)",
      "(\\x. x z) z",
      "(\\x. x z2) z1",
      "\\f x. f (f x)",
      "\\x. (\\y. z) x x",
      "\\x. z x",
      "\\x. x x",
      "\\x y z. x z (y z)",
      "\\x. x",
      "\\x. y",
      "x z",
      "(\\x. (\\y. z) x) w",
      "(\\x. x x) (\\x. x x)",
  };
}

inline Corpus golden_corpus() {
  Corpus c{"golden", {}};
  for (const auto& s : golden_sources()) c.terms.push_back(parse_term(s));
  return c;
}

/// `closed:N`, `open:N` or `golden`. Anything else is not a corpus spec.
inline std::optional<Corpus> corpus_from_spec(const std::string& spec) {
  if (spec == "golden") return golden_corpus();
  for (const char* kind : {"closed", "open"}) {
    std::string prefix = std::string(kind) + ":";
    if (spec.rfind(prefix, 0) != 0) continue;
    std::string num = spec.substr(prefix.size());
    if (num.empty() || !std::all_of(num.begin(), num.end(), [](char c) { return c >= '0' && c <= '9'; }))
      return std::nullopt;
    std::size_t n = std::stoul(num);
    return Corpus{spec, enumerate_terms(n, std::string(kind) == "closed")};
  }
  return std::nullopt;
}

inline Corpus filter_corpus(Corpus c, CorpusFilter f, std::size_t fuel = kDefaultFuel) {
  std::vector<Term> kept;
  for (const auto& t : c.terms) {
    TermClass k = classify(t);
    bool keep = false;
    switch (f) {
      case CorpusFilter::LambdaI: keep = k.is_lambdaI; break;
      case CorpusFilter::Affine: keep = k.is_affine; break;
      case CorpusFilter::Linear: keep = k.is_linear; break;
      case CorpusFilter::Typable: keep = infer(t, Flavor::ACI, fuel).typable(); break;
    }
    if (keep) kept.push_back(t);
  }
  c.terms = std::move(kept);
  return c;
}

// ---------------------------------------------------------------------------
// Verdicts and reports

enum class Outcome : std::uint8_t { Pass, Fail, Vacuous, Inconclusive, ExpectedFailure, OrderViolation };

inline std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::Pass: return "pass";
    case Outcome::Fail: return "fail";
    case Outcome::Vacuous: return "vacuous";
    case Outcome::Inconclusive: return "inconclusive";
    case Outcome::ExpectedFailure: return "expected-failure";
    case Outcome::OrderViolation: return "order-violation";
  }
  return "?";
}

struct Verdict {
  Outcome outcome = Outcome::Pass;
  std::string detail;
};

inline Verdict pass() { return {}; }
inline Verdict vacuous(std::string why) { return {Outcome::Vacuous, std::move(why)}; }
inline Verdict fail(std::string why) { return {Outcome::Fail, std::move(why)}; }

enum class PropertyKind : std::uint8_t { Lemma, Theorem, Remark, Plumbing };

inline std::string_view to_string(PropertyKind k) {
  switch (k) {
    case PropertyKind::Lemma: return "lemma";
    case PropertyKind::Theorem: return "theorem";
    case PropertyKind::Remark: return "remark";
    case PropertyKind::Plumbing: return "plumbing";
  }
  return "?";
}

struct InstanceResult {
  std::string instance;  // term (or environment pair) in concrete syntax
  Outcome outcome;
  std::string detail;
};

struct PropertyReport {
  std::string id;
  PropertyKind kind;
  std::string statement;
  std::vector<InstanceResult> instances;

  std::size_t count(Outcome o) const {
    return static_cast<std::size_t>(
        std::count_if(instances.begin(), instances.end(), [&](const InstanceResult& r) { return r.outcome == o; }));
  }
  bool ok() const { return count(Outcome::Fail) == 0; }
};

// ---------------------------------------------------------------------------
// Per-term cache

/// Lazily computed facts about one corpus term, shared by every property.
class Subject {
 public:
  explicit Subject(Term t, std::size_t fuel = kDefaultFuel) : term_(std::move(t)), fuel_(fuel), cls_(classify(term_)) {}

  const Term& term() const { return term_; }
  const TermClass& cls() const { return cls_; }
  std::size_t fuel() const { return fuel_; }

  const InferResult& inferred(Flavor f) {
    auto& slot = inferred_[static_cast<std::size_t>(f)];
    if (!slot) slot = infer(term_, f, fuel_);
    return *slot;
  }

  /// Expansion of the principal derivation; the error text when it throws.
  const std::pair<std::optional<ExpansionResult>, std::string>& expansion(ExpansionFlavor f) {
    auto& slot = expanded_[static_cast<std::size_t>(f)];
    if (slot) return *slot;
    const InferResult& r = inferred(source_flavor(f));
    std::pair<std::optional<ExpansionResult>, std::string> v;
    if (!r.derivation) {
      v.second = "not typable within fuel";
    } else {
      try {
        v.first = expand(*r.derivation, f);
      } catch (const OrderViolation& e) {
        v.second = std::string("order violation: ") + e.what();
      } catch (const Error& e) {
        v.second = e.what();
      }
    }
    slot = std::move(v);
    return *slot;
  }

  const std::optional<Derivation>& decided(System s) {
    auto& slot = decided_[static_cast<std::size_t>(s)];
    if (!slot) slot = decide(s, term_);
    return *slot;
  }

 private:
  Term term_;
  std::size_t fuel_;
  TermClass cls_;
  std::array<std::optional<InferResult>, 3> inferred_;
  std::array<std::optional<std::pair<std::optional<ExpansionResult>, std::string>>, 3> expanded_;
  std::array<std::optional<std::optional<Derivation>>, 5> decided_;
};

// ---------------------------------------------------------------------------
// Property implementations

namespace detail {

inline std::vector<std::string> basis_var_set(const Basis& b) {
  std::vector<std::string> v = basis_vars(b);
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

inline std::vector<std::string> sorted_free(const Term& t) {
  std::vector<std::string> v = free_vars(t);
  std::sort(v.begin(), v.end());
  return v;
}

inline Verdict check_decided(Subject& s, System sys, bool (*rel)(const std::vector<std::string>&,
                                                                 const std::vector<std::string>&)) {
  const auto& d = s.decided(sys);
  if (!d) return vacuous("not typable");
  if (auto c = check_derivation(*d); !c) return fail("derivation fails: " + c.diagnostic);
  if (!rel(basis_var_set(d->basis), sorted_free(s.term()))) return fail("basis variables: " + render(d->basis));
  return pass();
}

inline Verdict characterization(Subject& s, System sys, bool expected) {
  const auto& d = s.decided(sys);
  if (d.has_value() != expected)
    return fail(std::string(d ? "typable" : "not typable") + " but the term class says otherwise");
  if (d) {
    if (auto c = check_derivation(*d); !c) return fail("derivation fails: " + c.diagnostic);
    if (d->subject != s.term()) return fail("derivation is for another subject");
  }
  return pass();
}

/// Flavor used to compare the environment of e(G) with the context.
inline Flavor ctx_flavor(ExpansionFlavor f) { return f == ExpansionFlavor::ACI ? Flavor::ACI : Flavor::AC; }

inline TypeEnv env_for(const InterDerivation& d, ExpansionFlavor f) {
  if (f != ExpansionFlavor::ACI) return d.env;
  TypeEnv out;
  for (const auto& [x, ts] : d.env) out[x] = dedup_list(ts);
  return out;
}

inline Verdict soundness(Subject& s, ExpansionFlavor f, bool strict) {
  if (strict && !s.cls().is_lambdaI) return vacuous("not a lambda-I term");
  const auto& [e, why] = s.expansion(f);
  if (!e) {
    if (!s.inferred(source_flavor(f)).typable()) return vacuous(why);
    if (f == ExpansionFlavor::Ordered && why.rfind("order violation", 0) == 0) return {Outcome::OrderViolation, why};
    return fail(why);
  }
  Target tgt = target_of(f);
  Basis want = expctx_to_basis(e->context, tgt);
  const Derivation* d = &e->derivation;
  if (strict) {
    if (!e->strict) return fail("no " + std::string(f == ExpansionFlavor::ACI ? "Relevant" : "Linear") + " derivation");
    d = &*e->strict;
  }
  if (auto c = check_derivation(*d); !c) return fail("induced derivation fails: " + c.diagnostic);
  if (d->basis != want) return fail("basis [" + render(d->basis) + "] differs from T_e(context)");
  if (d->subject != e->expanded || d->type != e->annotation) return fail("derivation judges another term or type");
  const InterType& sigma = s.inferred(source_flavor(f)).derivation->type;
  Type expect = translate(sigma, tgt);
  bool same = f == ExpansionFlavor::Ordered ? with_arrow_kind(e->annotation, ArrowKind::LolliR) == expect
                                            : e->annotation == expect;
  if (!same) return fail("annotation " + render(e->annotation) + " is not T(sigma) = " + render(expect));
  TermClass k = classify(e->expanded);
  if (f == ExpansionFlavor::AC && !k.is_affine) return fail("AC expansion is not affine");
  if (strict && f == ExpansionFlavor::AC && !k.is_linear) return fail("AC expansion of a lambda-I term is not linear");
  if (strict && f == ExpansionFlavor::ACI && !k.is_lambdaI) return fail("ACI expansion of a lambda-I term is not lambda-I");
  return pass();
}

inline Verdict completeness(Subject& s, ExpansionFlavor f) {
  const auto& [e, why] = s.expansion(f);
  if (!e) {
    if (f == ExpansionFlavor::Ordered && !s.cls().is_lambdaI) return vacuous("not a lambda-I term");
    if (!s.inferred(source_flavor(f)).typable()) return vacuous(why);
    if (why.rfind("order violation", 0) == 0) return {Outcome::OrderViolation, why};
    return fail(why);
  }
  if (!is_well_formed(e->context)) return fail("ill-formed context");
  const InterDerivation& d = *s.inferred(source_flavor(f)).derivation;
  TypeEnv g = env_for(d, f);
  if (!env_eq(expctx_to_env(e->context), g, ctx_flavor(f)))
    return fail("l(context) = " + render(expctx_to_env(e->context)) + " but the environment is " + render(g));
  return pass();
}

inline Verdict inverse_typing(Subject& s, ExpansionFlavor f) {
  const auto& [e, why] = s.expansion(f);
  if (!e) return vacuous(why);
  const InterDerivation& d = *s.inferred(source_flavor(f)).derivation;
  InterDerivation again = d;
  again.env = expctx_to_env(e->context);
  if (!env_eq(again.env, env_for(d, f), ctx_flavor(f))) return fail("l(context) differs from the environment");
  InterDerivation base = f == ExpansionFlavor::ACI ? aci_normalize(with_flavor(d, Flavor::ACI)) : d;
  if (auto c = check_inter(with_flavor(base, ctx_flavor(f))); !c.ok) return fail("re-check fails: " + c.diagnostic);
  return pass();
}

inline Verdict occurrence_bound(Subject& s, ExpansionFlavor f, bool exact) {
  const auto& [e, why] = s.expansion(f);
  if (!e) return vacuous(why);
  for (const auto& entry : e->context.entries) {
    std::size_t occ = count_free_occurrences(s.term(), entry.owner);
    std::size_t k = entry.bindings.size();
    if (exact ? occ != k : occ < k)
      return fail(entry.owner + " expands to " + std::to_string(k) + " variables but occurs " + std::to_string(occ) +
                  " times");
  }
  return pass();
}

/// Alpha equivalence with a (not necessarily injective) map from a's free names to b's.
inline bool alpha_into(const Term& a, const Term& b, std::vector<std::pair<std::string, std::string>>& env,
                       std::map<std::string, std::string>& fwd) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Term::Kind::Var: {
      for (auto it = env.rbegin(); it != env.rend(); ++it) {
        bool la = it->first == a.name(), lb = it->second == b.name();
        if (la || lb) return la && lb;
      }
      auto [fi, inserted] = fwd.emplace(a.name(), b.name());
      return inserted || fi->second == b.name();
    }
    case Term::Kind::Abs: {
      env.emplace_back(a.name(), b.name());
      bool r = alpha_into(a.body(), b.body(), env, fwd);
      env.pop_back();
      return r;
    }
    case Term::Kind::App: return alpha_into(a.fun(), b.fun(), env, fwd) && alpha_into(a.arg(), b.arg(), env, fwd);
  }
  return false;
}

inline void free_occurrence_order(const Term& t, std::vector<std::string>& bound, std::vector<std::string>& out) {
  switch (t.kind()) {
    case Term::Kind::Var:
      if (std::find(bound.begin(), bound.end(), t.name()) == bound.end()) out.push_back(t.name());
      return;
    case Term::Kind::Abs:
      bound.push_back(t.name());
      free_occurrence_order(t.body(), bound, out);
      bound.pop_back();
      return;
    case Term::Kind::App:
      free_occurrence_order(t.fun(), bound, out);
      free_occurrence_order(t.arg(), bound, out);
      return;
  }
}

/// Merges bindings that became equal after a renaming (idempotent contexts).
inline ExpansionContext merge_duplicates(const ExpansionContext& a) {
  ExpansionContext out;
  for (const auto& e : a.entries) {
    VarExpansion m{e.owner, {}};
    for (const auto& b : e.bindings)
      if (std::none_of(m.bindings.begin(), m.bindings.end(), [&](const Binding& c) { return c.var == b.var; }))
        m.bindings.push_back(b);
    out.entries.push_back(std::move(m));
  }
  return out;
}

struct Piece {
  Term term;
  ExpansionContext ctx;
};

inline Piece expand_piece(const InterDerivation& d, ExpansionFlavor f, FreshSupply& supply) {
  switch (f) {
    case ExpansionFlavor::ACI: {
      AciExpander ex(supply);
      Expanded e = ex.run(d);
      return {e.typed.term, e.ctx};
    }
    case ExpansionFlavor::AC: {
      AcExpander ex(supply);
      Expanded e = ex.run(d);
      return {e.typed.term, e.ctx};
    }
    case ExpansionFlavor::Ordered: {
      OrderedExpander ex(supply, Orientation::Mixed);
      OrderedPiece p = ex.run(d);
      return {p.term, p.ctx};
    }
  }
  throw ExpansionError("unknown flavor");
}

/// Substitution lemma at a root redex (\x.M)N: expanding M[N/x] agrees with
/// substituting the expanded copies of N into the expansion of M.
inline Verdict substitution(Subject& s, ExpansionFlavor f) {
  const Term& t = s.term();
  if (!is_redex(t)) return vacuous("not a redex");
  if (!occurs_free(t.fun().body(), t.fun().name())) return vacuous("erasing redex");
  if (f == ExpansionFlavor::Ordered && !s.cls().is_lambdaI) return vacuous("not a lambda-I term");
  const InferResult& r = s.inferred(source_flavor(f));
  if (!r.derivation) return vacuous("not typable within fuel");
  InterDerivation d = with_flavor(*r.derivation, source_flavor(f));
  if (f == ExpansionFlavor::ACI) d = aci_normalize(d);
  const InterDerivation& fn = d.premises[0];
  const std::string& x = fn.subject.name();
  try {
    FreshSupply supply = supply_for(d);
    Piece body = expand_piece(fn.premises[0], f, supply);
    std::vector<Piece> args;
    for (std::size_t i = 1; i < d.premises.size(); ++i) args.push_back(expand_piece(d.premises[i], f, supply));
    const VarExpansion* entry = body.ctx.find(x);
    if (!entry) return fail("the body expansion has no entry for " + x);
    // Pair occurrences of x's expansion variables with argument copies as subject reduction does.
    std::vector<std::string> bound, occ;
    free_occurrence_order(body.term, bound, occ);
    std::vector<bool> used(args.size(), false);
    std::size_t next = 0;
    std::vector<std::pair<std::string, Term>> sub;
    std::vector<std::size_t> order;
    for (const auto& v : occ) {
      auto b = std::find_if(entry->bindings.begin(), entry->bindings.end(), [&](const Binding& c) { return c.var == v; });
      if (b == entry->bindings.end()) continue;
      if (std::any_of(sub.begin(), sub.end(), [&](const auto& p) { return p.first == v; })) continue;
      std::optional<std::size_t> pick;
      Flavor fl = source_flavor(f);
      if (fl == Flavor::A) {
        if (next < args.size()) pick = next++;
      } else {
        for (std::size_t i = 0; i < args.size() && !pick; ++i)
          if (!(fl == Flavor::AC && used[i]) && inter_eq(d.premises[i + 1].type, b->type, fl)) pick = i;
      }
      if (!pick) return fail("no argument copy for " + v);
      used[*pick] = true;
      order.push_back(*pick);
      sub.emplace_back(v, args[*pick].term);
    }
    Term expected = simultaneous_substitute(body.term, sub);
    ExpansionContext ctx;
    if (f == ExpansionFlavor::Ordered) {
      ExpansionContext before, after;
      bool seen = false;
      for (const auto& e : body.ctx.entries) {
        if (e.owner == x) seen = true;
        else (seen ? after : before).entries.push_back(e);
      }
      ctx = before;
      for (std::size_t i : order) ctx = ctx_append(ctx, args[i].ctx);
      ctx = ctx_append(ctx, after);
    } else {
      ctx = remove_owner(body.ctx, x);
      for (std::size_t i : order) ctx = ctx_union(ctx, args[i].ctx);
    }
    auto reduced = subject_reduce(d, RedexPosition{});
    if (!reduced) return fail("subject reduction fails");
    ExpansionResult direct = expand(*reduced, f);
    std::vector<std::pair<std::string, std::string>> env;
    std::map<std::string, std::string> ren;
    bool match = f == ExpansionFlavor::ACI ? alpha_into(expected, direct.expanded, env, ren)
                                           : [&] {
                                               auto m = alpha_eq_modulo_free(expected, direct.expanded);
                                               if (m) ren = *m;
                                               return m.has_value();
                                             }();
    if (!match) return fail("M0[Ni/xi] = " + render(expected) + " but the reduct expands to " + render(direct.expanded));
    ExpansionContext moved = rename_vars(ctx, ren);
    bool same = f == ExpansionFlavor::Ordered ? list_ctx_eq(moved, direct.context, Flavor::A)
                : f == ExpansionFlavor::ACI   ? set_ctx_eq(merge_duplicates(moved), direct.context, Flavor::ACI)
                                              : set_ctx_eq(moved, direct.context, Flavor::AC);
    if (!same)
      return fail("joined context " +
                  (f == ExpansionFlavor::Ordered ? render_list_ctx(moved) : render_set_ctx(moved)) +
                  " differs from " +
                  (f == ExpansionFlavor::Ordered ? render_list_ctx(direct.context) : render_set_ctx(direct.context)));
  } catch (const OrderViolation& e) {
    return {Outcome::OrderViolation, e.what()};
  } catch (const Error& e) {
    return fail(e.what());
  }
  return pass();
}

inline Verdict whd_diagram(Subject& s, ExpansionFlavor f) {
  const InferResult& r = s.inferred(source_flavor(f));
  if (!r.derivation) return vacuous("not typable within fuel");
  if (!weak_head_position(s.term())) return vacuous("weak-head normal form");
  DiagramReport rep = verify_whd_diagram(*r.derivation, f, 1000);
  for (const auto& st : rep.steps)
    if (!st.ok) return fail(render(st.before) + " -> " + render(st.after) + ": " + st.detail);
  return pass();
}

inline Verdict beta_diagram(Subject& s, ExpansionFlavor f) {
  if (!s.cls().is_lambdaI) return vacuous("not a lambda-I term");
  const InferResult& r = s.inferred(source_flavor(f));
  if (!r.derivation) return vacuous("not typable within fuel");
  if (is_normal_form(s.term())) return vacuous("normal form");
  DiagramReport rep = verify_beta_diagram(*r.derivation, f, true);
  for (const auto& st : rep.steps)
    if (!st.ok) {
      if (st.detail.rfind("order violation", 0) == 0) return {Outcome::OrderViolation, st.detail};
      return fail(render(st.before) + " -> " + render(st.after) + ": " + st.detail);
    }
  if (rep.order_violations) return {Outcome::OrderViolation, "the term itself has no ordered expansion"};
  return pass();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Environment suites

/// Intersection lists over the types a, a -> b, (a -> b) -> a, of length 0..3.
inline std::vector<std::vector<InterType>> small_intersections() {
  InterType a = InterType::tvar("a"), b = InterType::tvar("b");
  std::vector<InterType> base{a, InterType::arrow(a, b), InterType::arrow(InterType::arrow(a, b), a)};
  std::vector<std::vector<InterType>> out{{}};
  for (std::size_t len = 1; len <= 3; ++len) {
    std::vector<std::size_t> idx(len, 0);
    for (;;) {
      std::vector<InterType> l;
      for (auto i : idx) l.push_back(base[i]);
      out.push_back(std::move(l));
      std::size_t k = len;
      while (k > 0 && ++idx[k - 1] == base.size()) idx[--k] = 0;
      if (k == 0) break;
    }
  }
  return out;
}

/// Pairs of environments over 1..3 variables. Every pair of intersections
/// occurs in every variable slot; slots are decorrelated by distinct strides.
inline std::vector<std::pair<TypeEnv, TypeEnv>> environment_pairs() {
  auto opts = small_intersections();
  const std::size_t n = opts.size() * opts.size();
  const std::array<const char*, 3> vars{"x", "y", "z"};
  const std::array<std::size_t, 3> stride{1, 7, 13};
  std::vector<std::pair<TypeEnv, TypeEnv>> out;
  for (std::size_t nv = 1; nv <= 3; ++nv)
    for (std::size_t i = 0; i < n; ++i) {
      TypeEnv g1, g2;
      for (std::size_t v = 0; v < nv; ++v) {
        std::size_t code = (i * stride[v] + v) % n;
        const auto& l1 = opts[code / opts.size()];
        const auto& l2 = opts[code % opts.size()];
        if (!l1.empty()) g1[vars[v]] = l1;
        if (!l2.empty()) g2[vars[v]] = l2;
      }
      out.emplace_back(std::move(g1), std::move(g2));
    }
  return out;
}

namespace detail {

/// Same owners, and per owner the same multiset of types (names are arbitrary fresh choices).
inline bool same_up_to_names(const ExpansionContext& a, const ExpansionContext& b) {
  return env_eq(expctx_to_env(a), expctx_to_env(b), Flavor::AC) && a.entries.size() == b.entries.size();
}

inline Verdict dist_e(const TypeEnv& g1, const TypeEnv& g2) {
  FreshSupply s1;
  ExpansionContext left = ctx_union(env_to_expctx(g1, s1), env_to_expctx(g2, s1));
  FreshSupply s2;
  ExpansionContext right = env_to_expctx(env_meet(g1, g2), s2);
  if (!is_well_formed(left)) return fail("union is ill-formed");
  if (!same_up_to_names(left, right)) return fail(render_set_ctx(left) + " vs " + render_set_ctx(right));
  return pass();
}

inline Verdict dist_l(const TypeEnv& g1, const TypeEnv& g2) {
  FreshSupply s;
  ExpansionContext a1 = env_to_expctx(g1, s), a2 = env_to_expctx(g2, s);
  TypeEnv left = env_meet(expctx_to_env(a1), expctx_to_env(a2));
  TypeEnv right = expctx_to_env(ctx_union(a1, a2));
  if (!env_eq(left, right, Flavor::AC)) return fail(render(left) + " vs " + render(right));
  return pass();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Registry

struct Property {
  std::string id;
  PropertyKind kind;
  std::string statement;
  std::function<Verdict(Subject&)> per_term;                               // empty for environment suites
  std::function<Verdict(const TypeEnv&, const TypeEnv&)> per_environment;  // empty for term properties
};

inline const std::vector<Property>& properties() {
  using namespace detail;
  using EF = ExpansionFlavor;
  static const std::vector<Property> all = [] {
    std::vector<Property> p;
    auto term = [&](std::string id, PropertyKind k, std::string st, std::function<Verdict(Subject&)> f) {
      p.push_back({std::move(id), k, std::move(st), std::move(f), {}});
    };
    auto envs = [&](std::string id, PropertyKind k, std::string st,
                    std::function<Verdict(const TypeEnv&, const TypeEnv&)> f) {
      p.push_back({std::move(id), k, std::move(st), {}, std::move(f)});
    };
    term("FV", PropertyKind::Lemma, "Relevant derivations: basis variables = free variables; typed terms are lambda-I",
         [](Subject& s) {
           Verdict v = check_decided(s, System::Relevant, [](const auto& b, const auto& f) { return b == f; });
           if (v.outcome == Outcome::Pass && !s.cls().is_lambdaI) return fail("Relevant-typable but not lambda-I");
           return v;
         });
    term("FVA", PropertyKind::Lemma, "Affine derivations: free variables included in the basis", [](Subject& s) {
      return check_decided(s, System::Affine,
                           [](const auto& b, const auto& f) { return std::includes(b.begin(), b.end(), f.begin(), f.end()); });
    });
    term("FVL", PropertyKind::Lemma, "Linear derivations: basis variables = free variables", [](Subject& s) {
      return check_decided(s, System::Linear, [](const auto& b, const auto& f) { return b == f; });
    });
    term("Affine", PropertyKind::Theorem, "Affine-typable iff affine term",
         [](Subject& s) { return characterization(s, System::Affine, s.cls().is_affine); });
    term("LinearTerms", PropertyKind::Theorem, "Linear-typable iff linear term",
         [](Subject& s) { return characterization(s, System::Linear, s.cls().is_linear); });
    term("sn", PropertyKind::Theorem, "intersection-typable iff strongly normalizing", [](Subject& s) {
      const InferResult& r = s.inferred(Flavor::ACI);
      auto longest = longest_reduction(s.term(), 200, 20000);
      if (r.derivation) {
        if (auto c = check_inter(*r.derivation); !c.ok) return fail("inferred derivation fails: " + c.diagnostic);
        if (reduce(s.term(), Strategy::Leftmost, s.fuel()).exhausted()) return fail("typable but leftmost reduction diverges");
        if (!longest) return Verdict{Outcome::Inconclusive, "typable; exhaustive reduction search exceeded its budget"};
        return pass();
      }
      if (longest) return fail("every reduction path terminates but inference failed");
      return vacuous("not typable within fuel");
    });
    term("exp_sn", PropertyKind::Theorem, "an expansion exists iff strongly normalizing", [](Subject& s) {
      const auto& [e, why] = s.expansion(EF::ACI);
      bool sn = !reduce(s.term(), Strategy::Leftmost, s.fuel()).exhausted() && s.inferred(Flavor::ACI).typable();
      if (e && !sn) return fail("expanded a term that is not known to normalize");
      if (!e && sn) return fail("normalizing term without expansion: " + why);
      return e ? pass() : vacuous(why);
    });
    term("type_exp1", PropertyKind::Theorem, "ACI expansion context is e(environment)",
         [](Subject& s) { return completeness(s, EF::ACI); });
    term("type_exp1_ac", PropertyKind::Theorem, "AC expansion context is e(environment)",
         [](Subject& s) { return completeness(s, EF::AC); });
    term("type_exp1_ordered", PropertyKind::Theorem, "ordered expansion context is e(environment)",
         [](Subject& s) { return completeness(s, EF::Ordered); });
    term("type_exp2", PropertyKind::Lemma, "l(context) re-types the original term", [](Subject& s) {
      for (EF f : {EF::ACI, EF::AC}) {
        Verdict v = inverse_typing(s, f);
        if (v.outcome != Outcome::Pass) return v;
      }
      return pass();
    });
    term("times", PropertyKind::Lemma, "expansion arity at most the number of occurrences", [](Subject& s) {
      for (EF f : {EF::ACI, EF::AC}) {
        Verdict v = occurrence_bound(s, f, false);
        if (v.outcome != Outcome::Pass) return v;
      }
      return pass();
    });
    term("occur", PropertyKind::Lemma, "ordered expansion arity equals the number of occurrences", [](Subject& s) {
      if (!s.cls().is_lambdaI) return vacuous("not a lambda-I term");
      return occurrence_bound(s, EF::Ordered, true);
    });
    term("exp_types", PropertyKind::Theorem, "ACI expansion is Curry-typable at T(sigma) from T_e(context)",
         [](Subject& s) { return soundness(s, EF::ACI, false); });
    term("exp_types_Relevant", PropertyKind::Theorem, "ACI expansion of a lambda-I term is Relevant-typable",
         [](Subject& s) { return soundness(s, EF::ACI, true); });
    term("exp_typesAffine", PropertyKind::Theorem, "AC expansion is Affine-typable",
         [](Subject& s) { return soundness(s, EF::AC, false); });
    term("exp_types_Linear", PropertyKind::Theorem, "AC expansion of a lambda-I term is Linear-typable",
         [](Subject& s) { return soundness(s, EF::AC, true); });
    term("orderexp", PropertyKind::Theorem, "ordered expansion of a lambda-I term is Ordered-typable", [](Subject& s) {
      if (!s.cls().is_lambdaI) return vacuous("not a lambda-I term");
      return soundness(s, EF::Ordered, false);
    });
    term("sub_sub", PropertyKind::Lemma, "ACI/AC substitution lemma at root redexes", [](Subject& s) {
      for (EF f : {EF::ACI, EF::AC}) {
        Verdict v = substitution(s, f);
        if (v.outcome != Outcome::Pass) return v;
      }
      return pass();
    });
    term("subst", PropertyKind::Lemma, "ordered substitution lemma at root redexes",
         [](Subject& s) { return substitution(s, EF::Ordered); });
    term("tfive", PropertyKind::Theorem, "ACI expansion preserves weak-head reduction",
         [](Subject& s) { return whd_diagram(s, EF::ACI); });
    term("t5", PropertyKind::Theorem, "AC expansion preserves weak-head reduction",
         [](Subject& s) { return whd_diagram(s, EF::AC); });
    term("red", PropertyKind::Theorem, "ACI expansion preserves beta on lambda-I terms",
         [](Subject& s) { return beta_diagram(s, EF::ACI); });
    term("LinearI", PropertyKind::Theorem, "AC expansion preserves beta on lambda-I terms",
         [](Subject& s) { return beta_diagram(s, EF::AC); });
    term("icalculus", PropertyKind::Theorem, "ordered expansion preserves beta on lambda-I terms",
         [](Subject& s) { return beta_diagram(s, EF::Ordered); });
    envs("dist_e", PropertyKind::Lemma, "e(G1) (+) e(G2) = e(G1 ^ G2)", dist_e);
    envs("dist_l", PropertyKind::Lemma, "l(A1) ^ l(A2) = l(A1 (+) A2)", dist_l);
    term("linear-length", PropertyKind::Remark, "reductions of a linear term are at most its size", [](Subject& s) {
      if (!s.cls().is_linear) return vacuous("not linear");
      auto n = longest_reduction(s.term(), s.term().size());
      if (!n) return fail("some reduction is longer than the term size");
      return pass();
    });
    term("beta-unrestricted", PropertyKind::Plumbing,
         "negative control: the beta diagram is not claimed for erasing steps", [](Subject& s) {
           if (s.cls().is_lambdaI) return vacuous("lambda-I term");
           for (EF f : {EF::ACI, EF::AC}) {
             const InferResult& r = s.inferred(source_flavor(f));
             if (!r.derivation) return vacuous("not typable within fuel");
             if (is_normal_form(s.term())) return vacuous("normal form");
             DiagramReport rep = verify_beta_diagram(*r.derivation, f, false);
             for (const auto& st : rep.steps)
               if (!st.ok)
                 return Verdict{Outcome::ExpectedFailure,
                                std::string(to_string(f)) + ": " + render(st.before) + " -> " + render(st.after)};
           }
           return pass();
         });
    term("infer-check", PropertyKind::Plumbing, "inferred derivations check in every flavor, envs relevant",
         [](Subject& s) {
           for (Flavor f : {Flavor::ACI, Flavor::AC, Flavor::A}) {
             const InferResult& r = s.inferred(f);
             if (!r.derivation) return vacuous("not typable within fuel");
             if (auto c = check_inter(*r.derivation); !c.ok) return fail(std::string(to_string(f)) + ": " + c.diagnostic);
             if (!env_is_relevant(*r.derivation)) return fail("environment not relevant");
           }
           return pass();
         });
    term("flavor-monotone", PropertyKind::Plumbing, "A-valid implies AC-valid implies ACI-valid", [](Subject& s) {
      const InferResult& r = s.inferred(Flavor::A);
      if (!r.derivation) return vacuous("not typable within fuel");
      for (Flavor f : {Flavor::AC, Flavor::ACI})
        if (auto c = check_inter(with_flavor(*r.derivation, f)); !c.ok) return fail(std::string(to_string(f)) + ": " + c.diagnostic);
      return pass();
    });
    term("parse-render", PropertyKind::Plumbing, "parsing the rendered term gives it back", [](Subject& s) {
      for (bool uni : {false, true}) {
        std::string txt = render(s.term(), RenderOptions{uni});
        if (!alpha_eq(parse_term(txt), s.term())) return fail("round trip of " + txt);
      }
      return pass();
    });
    return p;
  }();
  return all;
}

inline const Property* find_property(const std::string& id) {
  for (const auto& p : properties())
    if (p.id == id) return &p;
  return nullptr;
}

inline std::vector<std::string> property_ids() {
  std::vector<std::string> out;
  for (const auto& p : properties()) out.push_back(p.id);
  return out;
}

/// Runs every (term, property) pair in corpus order. Environment suites ignore
/// the corpus. Unknown ids throw.
inline std::vector<PropertyReport> run_matrix(const Corpus& corpus, const std::vector<std::string>& ids,
                                              std::size_t fuel = kDefaultFuel) {
  std::vector<const Property*> props;
  for (const auto& id : ids) {
    const Property* p = find_property(id);
    if (!p) throw Error("unknown property " + id);
    props.push_back(p);
  }
  std::vector<PropertyReport> out;
  for (const auto* p : props) out.push_back({p->id, p->kind, p->statement, {}});
  std::vector<Subject> subjects;
  subjects.reserve(corpus.terms.size());
  for (const auto& t : corpus.terms) subjects.emplace_back(t, fuel);
  for (std::size_t i = 0; i < props.size(); ++i) {
    const Property& p = *props[i];
    if (p.per_environment) {
      for (const auto& [g1, g2] : environment_pairs()) {
        Verdict v = p.per_environment(g1, g2);
        out[i].instances.push_back({render(g1) + " ; " + render(g2), v.outcome, std::move(v.detail)});
      }
      continue;
    }
    for (auto& s : subjects) {
      Verdict v;
      try {
        v = p.per_term(s);
      } catch (const std::exception& e) {
        v = fail(std::string("exception: ") + e.what());
      }
      out[i].instances.push_back({render(s.term()), v.outcome, std::move(v.detail)});
    }
  }
  return out;
}

/// One line per property: id, kind, and outcome counts.
inline std::string summary_table(const std::vector<PropertyReport>& reports) {
  std::string out;
  for (const auto& r : reports) {
    std::string line = r.id;
    line.resize(std::max<std::size_t>(line.size() + 1, 20), ' ');
    line += std::string(to_string(r.kind));
    line.resize(std::max<std::size_t>(line.size() + 1, 30), ' ');
    for (Outcome o : {Outcome::Pass, Outcome::Fail, Outcome::Vacuous, Outcome::Inconclusive, Outcome::ExpectedFailure,
                      Outcome::OrderViolation})
      if (std::size_t n = r.count(o)) line += std::string(to_string(o)) + "=" + std::to_string(n) + " ";
    if (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
    for (const auto& inst : r.instances)
      if (inst.outcome == Outcome::Fail) out += "  FAIL " + inst.instance + ": " + inst.detail + "\n";
  }
  return out;
}

}  // namespace lexp
