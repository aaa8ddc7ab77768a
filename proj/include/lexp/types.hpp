#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "lexp/term.hpp"

namespace lexp {

// ---------------------------------------------------------------------------
// Target types: simple (->), linear (-o) and ordered (-o_l, -o_r) in one shape.

enum class ArrowKind : std::uint8_t { Simple, Lolli, LolliL, LolliR };

class Type {
 public:
  static Type tvar(std::string name) { return Type(std::make_shared<const Node>(Node{true, {}, std::move(name), {}, {}})); }
  static Type arrow(ArrowKind k, const Type& dom, const Type& cod) {
    return Type(std::make_shared<const Node>(Node{false, k, {}, dom.node_, cod.node_}));
  }
  static Type fn(const Type& dom, const Type& cod) { return arrow(ArrowKind::Simple, dom, cod); }
  static Type lolli(const Type& dom, const Type& cod) { return arrow(ArrowKind::Lolli, dom, cod); }
  static Type lolli_l(const Type& dom, const Type& cod) { return arrow(ArrowKind::LolliL, dom, cod); }
  static Type lolli_r(const Type& dom, const Type& cod) { return arrow(ArrowKind::LolliR, dom, cod); }

  bool is_var() const noexcept { return node_->is_var; }
  bool is_arrow() const noexcept { return !node_->is_var; }
  const std::string& name() const noexcept { return node_->name; }
  ArrowKind arrow_kind() const noexcept { return node_->kind; }
  Type dom() const { return Type(node_->dom); }
  Type cod() const { return Type(node_->cod); }

  friend bool operator==(const Type& a, const Type& b) {
    if (a.node_ == b.node_) return true;
    if (a.is_var() != b.is_var()) return false;
    if (a.is_var()) return a.name() == b.name();
    return a.arrow_kind() == b.arrow_kind() && a.dom() == b.dom() && a.cod() == b.cod();
  }
  friend bool operator!=(const Type& a, const Type& b) { return !(a == b); }

 private:
  struct Node {
    bool is_var;
    ArrowKind kind;
    std::string name;
    std::shared_ptr<const Node> dom;
    std::shared_ptr<const Node> cod;
  };
  explicit Type(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

/// Does every arrow in `t` have kind in `allowed`?
inline bool uses_only(const Type& t, std::initializer_list<ArrowKind> allowed) {
  if (t.is_var()) return true;
  if (std::find(allowed.begin(), allowed.end(), t.arrow_kind()) == allowed.end()) return false;
  return uses_only(t.dom(), allowed) && uses_only(t.cod(), allowed);
}

inline Type with_arrow_kind(const Type& t, ArrowKind k) {
  if (t.is_var()) return t;
  return Type::arrow(k, with_arrow_kind(t.dom(), k), with_arrow_kind(t.cod(), k));
}

inline void type_vars(const Type& t, std::vector<std::string>& out) {
  if (t.is_var()) {
    if (std::find(out.begin(), out.end(), t.name()) == out.end()) out.push_back(t.name());
    return;
  }
  type_vars(t.dom(), out);
  type_vars(t.cod(), out);
}

// ---------------------------------------------------------------------------
// Intersection types: a | s1 & ... & sn -> s, n >= 1.

class InterType {
 public:
  static InterType tvar(std::string name) {
    return InterType(std::make_shared<const Node>(Node{true, std::move(name), {}, {}}));
  }
  static InterType arrow(std::vector<InterType> dom, const InterType& cod) {
    if (dom.empty()) throw Error("intersection domain must be nonempty");
    return InterType(std::make_shared<const Node>(Node{false, {}, std::move(dom), cod.node_}));
  }
  static InterType arrow(const InterType& dom, const InterType& cod) { return arrow(std::vector<InterType>{dom}, cod); }

  bool is_var() const noexcept { return node_->is_var; }
  bool is_arrow() const noexcept { return !node_->is_var; }
  const std::string& name() const noexcept { return node_->name; }
  const std::vector<InterType>& dom() const noexcept { return node_->dom; }
  InterType cod() const { return InterType(node_->cod); }

  /// Exact structural equality (list order and multiplicity significant).
  friend bool operator==(const InterType& a, const InterType& b) {
    if (a.node_ == b.node_) return true;
    if (a.is_var() != b.is_var()) return false;
    if (a.is_var()) return a.name() == b.name();
    return a.dom() == b.dom() && a.cod() == b.cod();
  }
  friend bool operator!=(const InterType& a, const InterType& b) { return !(a == b); }

 private:
  struct Node {
    bool is_var;
    std::string name;
    std::vector<InterType> dom;
    std::shared_ptr<const Node> cod;
  };
  explicit InterType(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

/// Algebraic laws of the intersection operator.
enum class Flavor : std::uint8_t { ACI, AC, A };

inline std::string_view to_string(Flavor f) {
  switch (f) {
    case Flavor::ACI: return "aci";
    case Flavor::AC: return "ac";
    case Flavor::A: return "a";
  }
  return "?";
}

/// Canonical structural order: variables by name before arrows; arrows compare
/// domain lists lexicographically, then codomains.
inline int compare(const InterType& a, const InterType& b) {
  if (a.is_var() != b.is_var()) return a.is_var() ? -1 : 1;
  if (a.is_var()) return a.name() < b.name() ? -1 : (a.name() == b.name() ? 0 : 1);
  const auto& da = a.dom();
  const auto& db = b.dom();
  for (std::size_t i = 0; i < std::min(da.size(), db.size()); ++i)
    if (int c = compare(da[i], db[i]); c != 0) return c;
  if (da.size() != db.size()) return da.size() < db.size() ? -1 : 1;
  return compare(a.cod(), b.cod());
}

inline bool inter_eq(const InterType& a, const InterType& b, Flavor f);

/// Compares two intersections (the lists of an arrow domain or an environment entry).
inline bool inter_list_eq(const std::vector<InterType>& a, const std::vector<InterType>& b, Flavor f) {
  switch (f) {
    case Flavor::A: {
      if (a.size() != b.size()) return false;
      for (std::size_t i = 0; i < a.size(); ++i)
        if (!inter_eq(a[i], b[i], f)) return false;
      return true;
    }
    case Flavor::AC: {
      if (a.size() != b.size()) return false;
      std::vector<bool> used(b.size(), false);
      for (const auto& x : a) {
        bool found = false;
        for (std::size_t j = 0; j < b.size() && !found; ++j)
          if (!used[j] && inter_eq(x, b[j], f)) used[j] = found = true;
        if (!found) return false;
      }
      return true;
    }
    case Flavor::ACI: {
      auto covered = [&](const std::vector<InterType>& xs, const std::vector<InterType>& ys) {
        return std::all_of(xs.begin(), xs.end(), [&](const InterType& x) {
          return std::any_of(ys.begin(), ys.end(), [&](const InterType& y) { return inter_eq(x, y, f); });
        });
      };
      return covered(a, b) && covered(b, a);
    }
  }
  return false;
}

/// Equality under the flavor's laws: ACI compares domains as sets, AC as multisets, A as sequences.
inline bool inter_eq(const InterType& a, const InterType& b, Flavor f) {
  if (a.is_var() != b.is_var()) return false;
  if (a.is_var()) return a.name() == b.name();
  return inter_eq(a.cod(), b.cod(), f) && inter_list_eq(a.dom(), b.dom(), f);
}

/// ACI: sort and deduplicate; AC: sort; A: identity. Applied recursively.
inline InterType normalize(const InterType& t, Flavor f) {
  if (t.is_var() || f == Flavor::A) return t;
  std::vector<InterType> dom;
  dom.reserve(t.dom().size());
  for (const auto& d : t.dom()) dom.push_back(normalize(d, f));
  std::sort(dom.begin(), dom.end(), [](const InterType& x, const InterType& y) { return compare(x, y) < 0; });
  if (f == Flavor::ACI)
    dom.erase(std::unique(dom.begin(), dom.end(), [](const InterType& x, const InterType& y) { return compare(x, y) == 0; }),
              dom.end());
  return InterType::arrow(std::move(dom), normalize(t.cod(), f));
}

inline std::vector<InterType> normalize_list(const std::vector<InterType>& xs, Flavor f) {
  if (f == Flavor::A) return xs;
  return normalize(InterType::arrow(xs, InterType::tvar("_")), f).dom();
}

/// Removes ACI-duplicates while keeping first-occurrence order, recursively.
inline InterType dedup_stable(const InterType& t) {
  if (t.is_var()) return t;
  std::vector<InterType> dom;
  for (const auto& d : t.dom()) {
    InterType nd = dedup_stable(d);
    bool dup = std::any_of(dom.begin(), dom.end(), [&](const InterType& e) { return inter_eq(e, nd, Flavor::ACI); });
    if (!dup) dom.push_back(nd);
  }
  return InterType::arrow(std::move(dom), dedup_stable(t.cod()));
}

inline void type_vars(const InterType& t, std::vector<std::string>& out) {
  if (t.is_var()) {
    if (std::find(out.begin(), out.end(), t.name()) == out.end()) out.push_back(t.name());
    return;
  }
  for (const auto& d : t.dom()) type_vars(d, out);
  type_vars(t.cod(), out);
}

inline std::size_t depth(const InterType& t) {
  if (t.is_var()) return 0;
  std::size_t d = depth(t.cod());
  for (const auto& x : t.dom()) d = std::max(d, depth(x));
  return d + 1;
}

// ---------------------------------------------------------------------------
// Type substitutions over intersection types

using InterSubst = std::map<std::string, InterType>;

inline InterType apply_subst(const InterSubst& s, const InterType& t) {
  if (t.is_var()) {
    auto it = s.find(t.name());
    return it == s.end() ? t : it->second;
  }
  std::vector<InterType> dom;
  dom.reserve(t.dom().size());
  for (const auto& d : t.dom()) dom.push_back(apply_subst(s, d));
  return InterType::arrow(std::move(dom), apply_subst(s, t.cod()));
}

namespace detail {
inline bool match_into(const InterType& pat, const InterType& target, Flavor f, InterSubst& s);

inline bool match_list(const std::vector<InterType>& ps, const std::vector<InterType>& ts, Flavor f, InterSubst& s) {
  if (f == Flavor::A) {
    if (ps.size() != ts.size()) return false;
    for (std::size_t i = 0; i < ps.size(); ++i)
      if (!match_into(ps[i], ts[i], f, s)) return false;
    return true;
  }
  if (f == Flavor::AC && ps.size() != ts.size()) return false;
  // Backtracking assignment of pattern members to target members; ACI needs it
  // surjective, AC bijective.
  std::vector<int> hits(ts.size(), 0);
  auto go = [&](auto&& self, std::size_t i, InterSubst cur) -> bool {
    if (i == ps.size()) {
      for (int h : hits)
        if (h == 0) return false;
      s = std::move(cur);
      return true;
    }
    for (std::size_t j = 0; j < ts.size(); ++j) {
      if (f == Flavor::AC && hits[j] > 0) continue;
      InterSubst trial = cur;
      if (!match_into(ps[i], ts[j], f, trial)) continue;
      ++hits[j];
      if (self(self, i + 1, std::move(trial))) return true;
      --hits[j];
    }
    return false;
  };
  return go(go, 0, s);
}

inline bool match_into(const InterType& pat, const InterType& target, Flavor f, InterSubst& s) {
  if (pat.is_var()) {
    auto it = s.find(pat.name());
    if (it == s.end()) {
      s.emplace(pat.name(), target);
      return true;
    }
    return inter_eq(it->second, target, f);
  }
  if (target.is_var()) return false;
  return match_into(pat.cod(), target.cod(), f, s) && match_list(pat.dom(), target.dom(), f, s);
}
}  // namespace detail

/// Finds `s` with `apply_subst(s, pattern)` equal to `target` under the flavor.
inline std::optional<InterSubst> match(const InterType& pattern, const InterType& target, Flavor f) {
  InterSubst s;
  if (!detail::match_into(pattern, target, f, s)) return std::nullopt;
  return s;
}

/// Equality up to a bijective renaming of type variables, under the flavor.
inline bool equivalent_up_to_renaming(const InterType& a, const InterType& b, Flavor f) {
  auto s = match(a, b, f);
  if (!s) return false;
  std::unordered_set<std::string> images;
  for (const auto& [k, v] : *s) {
    if (!v.is_var() || !images.insert(v.name()).second) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Translation of intersection types into target types

enum class Target : std::uint8_t { ToSimple, ToLinear, ToOrdered };

inline ArrowKind arrow_for(Target t) {
  switch (t) {
    case Target::ToSimple: return ArrowKind::Simple;
    case Target::ToLinear: return ArrowKind::Lolli;
    case Target::ToOrdered: return ArrowKind::LolliR;
  }
  return ArrowKind::Simple;
}

/// Curries `s1 & ... & sn -> s` into `T(s1) => ... => T(sn) => T(s)`.
inline Type translate(const InterType& t, Target target) {
  if (t.is_var()) return Type::tvar(t.name());
  Type acc = translate(t.cod(), target);
  const auto& dom = t.dom();
  for (auto it = dom.rbegin(); it != dom.rend(); ++it) acc = Type::arrow(arrow_for(target), translate(*it, target), acc);
  return acc;
}

// ---------------------------------------------------------------------------
// Bases (ordered assumption lists) and type environments

struct Assumption {
  std::string var;
  Type type;
  friend bool operator==(const Assumption&, const Assumption&) = default;
};

using Basis = std::vector<Assumption>;

inline bool is_consistent(const Basis& b) {
  std::unordered_set<std::string> seen;
  for (const auto& a : b)
    if (!seen.insert(a.var).second) return false;
  return true;
}

inline std::vector<std::string> basis_vars(const Basis& b) {
  std::vector<std::string> out;
  out.reserve(b.size());
  for (const auto& a : b) out.push_back(a.var);
  return out;
}

inline const Type* lookup(const Basis& b, std::string_view x) {
  for (const auto& a : b)
    if (a.var == x) return &a.type;
  return nullptr;
}

/// Finite map from variables to intersections (nonempty lists).
using TypeEnv = std::map<std::string, std::vector<InterType>>;

/// Pointwise meet: shared variables concatenate their intersections.
inline TypeEnv env_meet(const TypeEnv& g1, const TypeEnv& g2) {
  TypeEnv out = g1;
  for (const auto& [x, ts] : g2) {
    auto& dst = out[x];
    dst.insert(dst.end(), ts.begin(), ts.end());
  }
  return out;
}

inline bool env_eq(const TypeEnv& a, const TypeEnv& b, Flavor f) {
  if (a.size() != b.size()) return false;
  for (auto ia = a.begin(), ib = b.begin(); ia != a.end(); ++ia, ++ib) {
    if (ia->first != ib->first) return false;
    if (!inter_list_eq(ia->second, ib->second, f)) return false;
  }
  return true;
}

inline TypeEnv normalize_env(const TypeEnv& g, Flavor f) {
  TypeEnv out;
  for (const auto& [x, ts] : g) out.emplace(x, normalize_list(ts, f));
  return out;
}

inline TypeEnv apply_subst(const InterSubst& s, const TypeEnv& g) {
  TypeEnv out;
  for (const auto& [x, ts] : g) {
    auto& dst = out[x];
    for (const auto& t : ts) dst.push_back(apply_subst(s, t));
  }
  return out;
}

}  // namespace lexp
