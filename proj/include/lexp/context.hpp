#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "lexp/term.hpp"
#include "lexp/types.hpp"

namespace lexp {

class CollisionError : public Error {
 public:
  using Error::Error;
};

struct Binding {
  std::string var;
  InterType type;
  friend bool operator==(const Binding&, const Binding&) = default;
};

/// x:S, read "x expands to the variables in S".
struct VarExpansion {
  std::string owner;
  std::vector<Binding> bindings;
  friend bool operator==(const VarExpansion&, const VarExpansion&) = default;
};

/// Expansion context. Entries keep insertion order: the list flavor depends on
/// it, the set flavor ignores it in comparisons.
struct ExpansionContext {
  std::vector<VarExpansion> entries;

  bool empty() const noexcept { return entries.empty(); }

  const VarExpansion* find(std::string_view owner) const {
    for (const auto& e : entries)
      if (e.owner == owner) return &e;
    return nullptr;
  }
  VarExpansion* find(std::string_view owner) {
    for (auto& e : entries)
      if (e.owner == owner) return &e;
    return nullptr;
  }

  std::vector<std::string> expansion_vars() const {
    std::vector<std::string> out;
    for (const auto& e : entries)
      for (const auto& b : e.bindings) out.push_back(b.var);
    return out;
  }

  std::vector<std::string> owners() const {
    std::vector<std::string> out;
    for (const auto& e : entries) out.push_back(e.owner);
    return out;
  }

  friend bool operator==(const ExpansionContext&, const ExpansionContext&) = default;
};

using SetExpCtx = ExpansionContext;
using ListExpCtx = ExpansionContext;

/// Owners distinct, expansion variables pairwise distinct, no expansion variable is an owner.
inline bool is_well_formed(const ExpansionContext& a) {
  std::unordered_set<std::string> owners;
  std::unordered_set<std::string> vars;
  for (const auto& e : a.entries) {
    if (e.bindings.empty() || !owners.insert(e.owner).second) return false;
    for (const auto& b : e.bindings)
      if (!vars.insert(b.var).second) return false;
  }
  return std::none_of(owners.begin(), owners.end(), [&](const std::string& o) { return vars.count(o) != 0; });
}

namespace detail {
inline void require_disjoint(const ExpansionContext& a, const ExpansionContext& b) {
  std::unordered_set<std::string> seen;
  for (const auto& v : a.expansion_vars()) seen.insert(v);
  for (const auto& v : b.expansion_vars())
    if (seen.count(v)) throw CollisionError("expansion variable " + v + " occurs in both contexts");
}
}  // namespace detail

// ---------------------------------------------------------------------------
// e, l and T_e

/// e: x:[t1..tn] becomes x:{x1:t1,...,xn:tn} with fresh xi.
inline ExpansionContext env_to_expctx(const TypeEnv& g, FreshSupply& supply) {
  ExpansionContext out;
  for (const auto& [x, ts] : g) {
    VarExpansion e{x, {}};
    for (const auto& t : ts) e.bindings.push_back({supply.fresh(x), t});
    out.entries.push_back(std::move(e));
  }
  return out;
}

/// l: forgets the expansion variables.
inline TypeEnv expctx_to_env(const ExpansionContext& a) {
  TypeEnv out;
  for (const auto& e : a.entries) {
    auto& dst = out[e.owner];
    for (const auto& b : e.bindings) dst.push_back(b.type);
  }
  return out;
}

/// T_e: flattens entries in order, translating each type.
inline Basis expctx_to_basis(const ExpansionContext& a, Target target) {
  Basis out;
  for (const auto& e : a.entries)
    for (const auto& b : e.bindings) out.push_back({b.var, translate(b.type, target)});
  return out;
}

/// Reorders entries by the position of their owner in `order`; unknown owners go last.
inline ExpansionContext order_owners(const ExpansionContext& a, const std::vector<std::string>& order) {
  auto rank = [&](const std::string& o) {
    auto it = std::find(order.begin(), order.end(), o);
    return static_cast<std::size_t>(it - order.begin());
  };
  ExpansionContext out = a;
  std::stable_sort(out.entries.begin(), out.entries.end(),
                   [&](const VarExpansion& x, const VarExpansion& y) { return rank(x.owner) < rank(y.owner); });
  return out;
}

// ---------------------------------------------------------------------------
// Context algebra

enum class UnionMode : std::uint8_t {
  Reject,          // shared expansion variables are an error
  MergeIdentical,  // a binding present on both sides with the same type is kept once
};

/// A1 (+) A2: pointwise union of the owners' binding sets.
inline ExpansionContext ctx_union(const ExpansionContext& a, const ExpansionContext& b,
                                  UnionMode mode = UnionMode::Reject) {
  if (mode == UnionMode::Reject) detail::require_disjoint(a, b);
  ExpansionContext out = a;
  for (const auto& e : b.entries) {
    VarExpansion* dst = out.find(e.owner);
    if (!dst) {
      // Owner new to the left side; its variables may still clash with another owner.
      for (const auto& bd : e.bindings)
        for (const auto& o : out.entries)
          for (const auto& ob : o.bindings)
            if (ob.var == bd.var) throw CollisionError("expansion variable " + bd.var + " bound by two owners");
      out.entries.push_back(e);
      continue;
    }
    for (const auto& bd : e.bindings) {
      auto same = std::find_if(dst->bindings.begin(), dst->bindings.end(),
                               [&](const Binding& x) { return x.var == bd.var; });
      if (same == dst->bindings.end()) {
        dst->bindings.push_back(bd);
      } else if (!(inter_eq(same->type, bd.type, Flavor::ACI))) {
        throw CollisionError("expansion variable " + bd.var + " bound at two types");
      }
    }
  }
  return out;
}

/// A1 + A2 on list contexts: a shared owner splices its bindings right after
/// the existing ones, a new owner is appended at the end.
inline ExpansionContext ctx_append(const ExpansionContext& a, const ExpansionContext& b) {
  detail::require_disjoint(a, b);
  ExpansionContext out = a;
  for (const auto& e : b.entries) {
    if (VarExpansion* dst = out.find(e.owner)) {
      dst->bindings.insert(dst->bindings.end(), e.bindings.begin(), e.bindings.end());
    } else {
      out.entries.push_back(e);
    }
  }
  return out;
}

/// A1 below A2: every x:S1 of A1 has x:S2 in A2 with S1 contained in S2.
inline bool ctx_leq(const ExpansionContext& a, const ExpansionContext& b, Flavor f = Flavor::A) {
  for (const auto& e : a.entries) {
    const VarExpansion* other = b.find(e.owner);
    if (!other) return false;
    for (const auto& bd : e.bindings) {
      bool found = std::any_of(other->bindings.begin(), other->bindings.end(), [&](const Binding& x) {
        return x.var == bd.var && inter_eq(x.type, bd.type, f);
      });
      if (!found) return false;
    }
  }
  return true;
}

inline bool set_ctx_eq(const ExpansionContext& a, const ExpansionContext& b, Flavor f = Flavor::A) {
  return ctx_leq(a, b, f) && ctx_leq(b, a, f);
}

/// Exact equality of list contexts: owner order and binding order both count.
inline bool list_ctx_eq(const ExpansionContext& a, const ExpansionContext& b, Flavor f = Flavor::A) {
  if (a.entries.size() != b.entries.size()) return false;
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    const auto& x = a.entries[i];
    const auto& y = b.entries[i];
    if (x.owner != y.owner || x.bindings.size() != y.bindings.size()) return false;
    for (std::size_t j = 0; j < x.bindings.size(); ++j)
      if (x.bindings[j].var != y.bindings[j].var || !inter_eq(x.bindings[j].type, y.bindings[j].type, f)) return false;
  }
  return true;
}

/// Renames expansion variables; names missing from `ren` are kept.
inline ExpansionContext rename_vars(const ExpansionContext& a, const std::map<std::string, std::string>& ren) {
  ExpansionContext out = a;
  for (auto& e : out.entries)
    for (auto& b : e.bindings)
      if (auto it = ren.find(b.var); it != ren.end()) b.var = it->second;
  return out;
}

inline ExpansionContext remove_owner(const ExpansionContext& a, std::string_view owner) {
  ExpansionContext out;
  for (const auto& e : a.entries)
    if (e.owner != owner) out.entries.push_back(e);
  return out;
}

}  // namespace lexp
