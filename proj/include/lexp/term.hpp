#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace lexp {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DuplicateBinder : public Error {
 public:
  using Error::Error;
};

/// Untyped lambda term. Immutable; copies share structure.
class Term {
 public:
  enum class Kind : std::uint8_t { Var, Abs, App };

  static Term var(std::string name) {
    return Term(std::make_shared<const Node>(Node{Kind::Var, std::move(name), nullptr, nullptr, 1}));
  }
  static Term abs(std::string binder, const Term& body) {
    return Term(std::make_shared<const Node>(
        Node{Kind::Abs, std::move(binder), body.node_, nullptr, body.size() + 1}));
  }
  static Term app(const Term& fun, const Term& arg) {
    return Term(std::make_shared<const Node>(
        Node{Kind::App, {}, fun.node_, arg.node_, fun.size() + arg.size() + 1}));
  }
  /// `\x1 ... xn. body`
  static Term abs(const std::vector<std::string>& binders, const Term& body) {
    Term t = body;
    for (auto it = binders.rbegin(); it != binders.rend(); ++it) t = abs(*it, t);
    return t;
  }
  /// Left-associated application spine `head a1 ... an`.
  static Term spine_apply(const Term& head, const std::vector<Term>& args) {
    Term t = head;
    for (const auto& a : args) t = app(t, a);
    return t;
  }

  Kind kind() const noexcept { return node_->kind; }
  bool is_var() const noexcept { return node_->kind == Kind::Var; }
  bool is_abs() const noexcept { return node_->kind == Kind::Abs; }
  bool is_app() const noexcept { return node_->kind == Kind::App; }

  /// Variable name for Var, binder for Abs.
  const std::string& name() const noexcept { return node_->name; }
  Term body() const { return Term(node_->a); }
  Term fun() const { return Term(node_->a); }
  Term arg() const { return Term(node_->b); }

  /// Number of constructors.
  std::size_t size() const noexcept { return node_->size; }

  bool same_node(const Term& other) const noexcept { return node_ == other.node_; }

  friend bool operator==(const Term& a, const Term& b) {
    if (a.node_ == b.node_) return true;
    if (a.kind() != b.kind() || a.size() != b.size()) return false;
    switch (a.kind()) {
      case Kind::Var: return a.name() == b.name();
      case Kind::Abs: return a.name() == b.name() && a.body() == b.body();
      case Kind::App: return a.fun() == b.fun() && a.arg() == b.arg();
    }
    return false;
  }
  friend bool operator!=(const Term& a, const Term& b) { return !(a == b); }

 private:
  struct Node {
    Kind kind;
    std::string name;
    std::shared_ptr<const Node> a;
    std::shared_ptr<const Node> b;
    std::size_t size;
  };
  explicit Term(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

inline bool is_identifier(std::string_view s) {
  if (s.empty() || s[0] < 'a' || s[0] > 'z') return false;
  for (char c : s.substr(1)) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
              c == '\'';
    if (!ok) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Free variables and occurrences

namespace detail {
inline void collect_free(const Term& t, std::vector<std::string>& bound, std::vector<std::string>& out,
                         std::unordered_set<std::string>& seen) {
  switch (t.kind()) {
    case Term::Kind::Var: {
      for (const auto& b : bound)
        if (b == t.name()) return;
      if (seen.insert(t.name()).second) out.push_back(t.name());
      return;
    }
    case Term::Kind::Abs:
      bound.push_back(t.name());
      collect_free(t.body(), bound, out, seen);
      bound.pop_back();
      return;
    case Term::Kind::App:
      collect_free(t.fun(), bound, out, seen);
      collect_free(t.arg(), bound, out, seen);
      return;
  }
}
}  // namespace detail

/// Free variables in left-to-right first-occurrence order.
inline std::vector<std::string> free_vars(const Term& t) {
  std::vector<std::string> bound, out;
  std::unordered_set<std::string> seen;
  detail::collect_free(t, bound, out, seen);
  return out;
}

inline std::size_t count_free_occurrences(const Term& t, std::string_view x) {
  switch (t.kind()) {
    case Term::Kind::Var: return t.name() == x ? 1 : 0;
    case Term::Kind::Abs: return t.name() == x ? 0 : count_free_occurrences(t.body(), x);
    case Term::Kind::App: return count_free_occurrences(t.fun(), x) + count_free_occurrences(t.arg(), x);
  }
  return 0;
}

inline bool occurs_free(const Term& t, std::string_view x) {
  switch (t.kind()) {
    case Term::Kind::Var: return t.name() == x;
    case Term::Kind::Abs: return t.name() != x && occurs_free(t.body(), x);
    case Term::Kind::App: return occurs_free(t.fun(), x) || occurs_free(t.arg(), x);
  }
  return false;
}

/// Every identifier appearing anywhere in `t`, bound or free.
inline void collect_names(const Term& t, std::unordered_set<std::string>& out) {
  switch (t.kind()) {
    case Term::Kind::Var: out.insert(t.name()); return;
    case Term::Kind::Abs:
      out.insert(t.name());
      collect_names(t.body(), out);
      return;
    case Term::Kind::App:
      collect_names(t.fun(), out);
      collect_names(t.arg(), out);
      return;
  }
}

// ---------------------------------------------------------------------------
// Fresh names

/// Strips a trailing numeric index (and a separating underscore): `x12` -> `x`, `z_3` -> `z`.
inline std::string name_base(std::string_view name) {
  std::size_t end = name.size();
  while (end > 1 && name[end - 1] >= '0' && name[end - 1] <= '9') --end;
  if (end > 1 && end < name.size() && name[end - 1] == '_') --end;
  return std::string(name.substr(0, end));
}

/// Per-base counters producing `x1`, `x2`, ... that never collide with reserved names.
class FreshSupply {
 public:
  FreshSupply() = default;
  explicit FreshSupply(const Term& avoid) { reserve(avoid); }

  void reserve(const Term& t) { collect_names(t, used_); }
  void reserve(std::string name) { used_.insert(std::move(name)); }
  bool is_used(const std::string& name) const { return used_.count(name) != 0; }

  std::string fresh(std::string_view base_name) {
    std::string base = name_base(base_name);
    std::size_t& k = next_[base];
    for (;;) {
      ++k;
      std::string candidate = base + std::to_string(k);
      if (used_.insert(candidate).second) return candidate;
    }
  }

 private:
  std::unordered_set<std::string> used_;
  std::unordered_map<std::string, std::size_t> next_;
};

// ---------------------------------------------------------------------------
// Barendregt convention

namespace detail {
inline Term canon(const Term& t, std::map<std::string, std::string>& ren, std::unordered_set<std::string>& seen,
                  FreshSupply& supply) {
  switch (t.kind()) {
    case Term::Kind::Var: {
      auto it = ren.find(t.name());
      return it == ren.end() ? t : Term::var(it->second);
    }
    case Term::Kind::Abs: {
      std::string b = t.name();
      std::string nb = seen.count(b) ? supply.fresh(b) : b;
      seen.insert(nb);
      supply.reserve(nb);
      auto prev = ren.find(b);
      std::optional<std::string> saved;
      if (prev != ren.end()) saved = prev->second;
      ren[b] = nb;
      Term body = canon(t.body(), ren, seen, supply);
      if (saved) ren[b] = *saved;
      else ren.erase(b);
      if (nb == b && body.same_node(t.body())) return t;
      return Term::abs(nb, body);
    }
    case Term::Kind::App: {
      Term f = canon(t.fun(), ren, seen, supply);
      Term a = canon(t.arg(), ren, seen, supply);
      if (f.same_node(t.fun()) && a.same_node(t.arg())) return t;
      return Term::app(f, a);
    }
  }
  return t;
}
}  // namespace detail

/// Renames binders so that no identifier is bound twice and none is both free and bound.
/// Binders that already satisfy the convention keep their names.
inline Term canonicalize(const Term& t) {
  FreshSupply supply(t);
  std::unordered_set<std::string> seen;
  for (auto& v : free_vars(t)) seen.insert(v);
  std::map<std::string, std::string> ren;
  return detail::canon(t, ren, seen, supply);
}

inline bool is_canonical(const Term& t) {
  std::unordered_set<std::string> binders;
  bool ok = true;
  auto fv = free_vars(t);
  std::unordered_set<std::string> free(fv.begin(), fv.end());
  auto walk = [&](auto&& self, const Term& u) -> void {
    if (!ok) return;
    switch (u.kind()) {
      case Term::Kind::Var: return;
      case Term::Kind::Abs:
        if (!binders.insert(u.name()).second || free.count(u.name())) ok = false;
        self(self, u.body());
        return;
      case Term::Kind::App:
        self(self, u.fun());
        self(self, u.arg());
        return;
    }
  };
  walk(walk, t);
  return ok;
}

// ---------------------------------------------------------------------------
// Substitution

namespace detail {
inline Term subst(const Term& t, std::map<std::string, Term>& sub, const std::unordered_set<std::string>& repl_free,
                  FreshSupply& supply) {
  switch (t.kind()) {
    case Term::Kind::Var: {
      auto it = sub.find(t.name());
      return it == sub.end() ? t : it->second;
    }
    case Term::Kind::Abs: {
      std::string b = t.name();
      std::optional<Term> shadowed;
      if (auto it = sub.find(b); it != sub.end()) {
        shadowed = it->second;
        sub.erase(it);
      }
      Term body = t.body();
      std::string nb = b;
      if (!sub.empty() && repl_free.count(b)) {
        nb = supply.fresh(b);
        sub.emplace(b, Term::var(nb));
        body = subst(body, sub, repl_free, supply);
        sub.erase(b);
      } else if (!sub.empty()) {
        body = subst(body, sub, repl_free, supply);
      }
      if (shadowed) sub.emplace(b, *shadowed);
      return Term::abs(nb, body);
    }
    case Term::Kind::App:
      return Term::app(subst(t.fun(), sub, repl_free, supply), subst(t.arg(), sub, repl_free, supply));
  }
  return t;
}
}  // namespace detail

/// Capture-avoiding simultaneous substitution; result is canonicalized.
inline Term simultaneous_substitute(const Term& t, const std::vector<std::pair<std::string, Term>>& bindings) {
  std::map<std::string, Term> sub;
  std::unordered_set<std::string> repl_free;
  FreshSupply supply(t);
  for (const auto& [x, s] : bindings) {
    if (!sub.emplace(x, s).second) throw DuplicateBinder("duplicate substitution binder '" + x + "'");
    for (auto& v : free_vars(s)) repl_free.insert(v);
    supply.reserve(s);
  }
  if (sub.empty()) return t;
  return canonicalize(detail::subst(t, sub, repl_free, supply));
}

/// `t[s/x]`, capture-avoiding; result is canonicalized.
inline Term substitute(const Term& t, const std::string& x, const Term& s) {
  return simultaneous_substitute(t, {{x, s}});
}

/// Renames free occurrences of `from` to `to` without canonicalizing.
/// Requires `to` not to be bound anywhere in `t`.
inline Term rename_free(const Term& t, const std::string& from, const std::string& to) {
  switch (t.kind()) {
    case Term::Kind::Var: return t.name() == from ? Term::var(to) : t;
    case Term::Kind::Abs:
      if (t.name() == from) return t;
      return Term::abs(t.name(), rename_free(t.body(), from, to));
    case Term::Kind::App: return Term::app(rename_free(t.fun(), from, to), rename_free(t.arg(), from, to));
  }
  return t;
}

// ---------------------------------------------------------------------------
// Alpha equivalence

namespace detail {
inline bool alpha(const Term& a, const Term& b, std::vector<std::pair<std::string, std::string>>& env,
                  std::map<std::string, std::string>* free_map, std::map<std::string, std::string>* free_inv) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Term::Kind::Var: {
      for (auto it = env.rbegin(); it != env.rend(); ++it) {
        bool la = it->first == a.name(), lb = it->second == b.name();
        if (la || lb) return la && lb;
      }
      if (!free_map) return a.name() == b.name();
      auto [fi, inserted] = free_map->emplace(a.name(), b.name());
      if (!inserted) return fi->second == b.name();
      auto [gi, ins2] = free_inv->emplace(b.name(), a.name());
      return ins2 || gi->second == a.name();
    }
    case Term::Kind::Abs: {
      env.emplace_back(a.name(), b.name());
      bool r = alpha(a.body(), b.body(), env, free_map, free_inv);
      env.pop_back();
      return r;
    }
    case Term::Kind::App:
      return alpha(a.fun(), b.fun(), env, free_map, free_inv) && alpha(a.arg(), b.arg(), env, free_map, free_inv);
  }
  return false;
}
}  // namespace detail

inline bool alpha_eq(const Term& a, const Term& b) {
  if (a.size() != b.size()) return false;
  std::vector<std::pair<std::string, std::string>> env;
  return detail::alpha(a, b, env, nullptr, nullptr);
}

/// Alpha equivalence up to a bijective renaming of free variables; returns the
/// renaming (free variable of `a` -> free variable of `b`) when it exists.
inline std::optional<std::map<std::string, std::string>> alpha_eq_modulo_free(const Term& a, const Term& b) {
  if (a.size() != b.size()) return std::nullopt;
  std::vector<std::pair<std::string, std::string>> env;
  std::map<std::string, std::string> fwd, inv;
  if (!detail::alpha(a, b, env, &fwd, &inv)) return std::nullopt;
  return fwd;
}

// ---------------------------------------------------------------------------
// Classification

struct TermClass {
  bool is_lambdaI = false;
  bool is_affine = false;
  bool is_linear = false;
  friend bool operator==(const TermClass&, const TermClass&) = default;
};

inline TermClass classify(const Term& t) {
  bool binders_ge1 = true, binders_le1 = true;
  auto walk = [&](auto&& self, const Term& u) -> void {
    switch (u.kind()) {
      case Term::Kind::Var: return;
      case Term::Kind::Abs: {
        auto n = count_free_occurrences(u.body(), u.name());
        if (n < 1) binders_ge1 = false;
        if (n > 1) binders_le1 = false;
        self(self, u.body());
        return;
      }
      case Term::Kind::App:
        self(self, u.fun());
        self(self, u.arg());
        return;
    }
  };
  walk(walk, t);
  bool free_once = true;
  for (const auto& v : free_vars(t))
    if (count_free_occurrences(t, v) != 1) free_once = false;
  TermClass c;
  c.is_lambdaI = binders_ge1;
  c.is_affine = binders_le1 && free_once;
  c.is_linear = binders_le1 && binders_ge1 && free_once;
  return c;
}

// ---------------------------------------------------------------------------
// Positions and one-hole contexts

enum class Step : std::uint8_t { Left, Right, Under };
using Path = std::vector<Step>;

inline std::optional<Term> subterm_at(const Term& t, const Path& p) {
  Term cur = t;
  for (Step s : p) {
    switch (s) {
      case Step::Left:
        if (!cur.is_app()) return std::nullopt;
        cur = cur.fun();
        break;
      case Step::Right:
        if (!cur.is_app()) return std::nullopt;
        cur = cur.arg();
        break;
      case Step::Under:
        if (!cur.is_abs()) return std::nullopt;
        cur = cur.body();
        break;
    }
  }
  return cur;
}

/// Literal replacement of the subterm at `p`; no renaming.
inline Term replace_at(const Term& t, const Path& p, const Term& s, std::size_t depth = 0) {
  if (depth == p.size()) return s;
  switch (p[depth]) {
    case Step::Left: return Term::app(replace_at(t.fun(), p, s, depth + 1), t.arg());
    case Step::Right: return Term::app(t.fun(), replace_at(t.arg(), p, s, depth + 1));
    case Step::Under: return Term::abs(t.name(), replace_at(t.body(), p, s, depth + 1));
  }
  return t;
}

/// Term with exactly one hole.
class OneHoleContext {
 public:
  enum class Kind : std::uint8_t { Hole, AppL, AppR, AbsC };

  static OneHoleContext hole() { return OneHoleContext(Kind::Hole, {}, nullptr, std::nullopt); }
  static OneHoleContext app_left(OneHoleContext ctx, const Term& arg) {
    return OneHoleContext(Kind::AppL, {}, std::make_shared<const OneHoleContext>(std::move(ctx)), arg);
  }
  static OneHoleContext app_right(const Term& fun, OneHoleContext ctx) {
    return OneHoleContext(Kind::AppR, {}, std::make_shared<const OneHoleContext>(std::move(ctx)), fun);
  }
  static OneHoleContext abs(std::string binder, OneHoleContext ctx) {
    return OneHoleContext(Kind::AbsC, std::move(binder), std::make_shared<const OneHoleContext>(std::move(ctx)),
                          std::nullopt);
  }

  Kind kind() const noexcept { return kind_; }

  /// The context whose hole sits at `p` in `t`.
  static OneHoleContext at(const Term& t, const Path& p, std::size_t depth = 0) {
    if (depth == p.size()) return hole();
    switch (p[depth]) {
      case Step::Left: return app_left(at(t.fun(), p, depth + 1), t.arg());
      case Step::Right: return app_right(t.fun(), at(t.arg(), p, depth + 1));
      case Step::Under: return abs(t.name(), at(t.body(), p, depth + 1));
    }
    return hole();
  }

  /// `C[t]`: literal hole replacement, no renaming of bound variables.
  Term plug(const Term& t) const {
    switch (kind_) {
      case Kind::Hole: return t;
      case Kind::AppL: return Term::app(inner_->plug(t), *side_);
      case Kind::AppR: return Term::app(*side_, inner_->plug(t));
      case Kind::AbsC: return Term::abs(binder_, inner_->plug(t));
    }
    return t;
  }

 private:
  OneHoleContext(Kind k, std::string b, std::shared_ptr<const OneHoleContext> inner, std::optional<Term> side)
      : kind_(k), binder_(std::move(b)), inner_(std::move(inner)), side_(std::move(side)) {}
  Kind kind_;
  std::string binder_;
  std::shared_ptr<const OneHoleContext> inner_;
  std::optional<Term> side_;
};

inline Term plug(const OneHoleContext& c, const Term& t) { return c.plug(t); }

}  // namespace lexp
