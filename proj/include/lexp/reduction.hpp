#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "lexp/term.hpp"

namespace lexp {

class NotARedex : public Error {
 public:
  using Error::Error;
};

inline constexpr std::size_t kDefaultFuel = 10000;

using RedexPosition = Path;

enum class Strategy : std::uint8_t { Leftmost, WeakHead };

inline bool is_redex(const Term& t) { return t.is_app() && t.fun().is_abs(); }

/// Redex positions in leftmost-outermost order (pre-order: node, function side, argument side).
inline std::vector<RedexPosition> redex_positions(const Term& t) {
  std::vector<RedexPosition> out;
  Path cur;
  auto walk = [&](auto&& self, const Term& u) -> void {
    if (is_redex(u)) out.push_back(cur);
    switch (u.kind()) {
      case Term::Kind::Var: return;
      case Term::Kind::Abs:
        cur.push_back(Step::Under);
        self(self, u.body());
        cur.pop_back();
        return;
      case Term::Kind::App:
        cur.push_back(Step::Left);
        self(self, u.fun());
        cur.back() = Step::Right;
        self(self, u.arg());
        cur.pop_back();
        return;
    }
  };
  walk(walk, t);
  return out;
}

inline bool is_normal_form(const Term& t) {
  switch (t.kind()) {
    case Term::Kind::Var: return true;
    case Term::Kind::Abs: return is_normal_form(t.body());
    case Term::Kind::App: return !t.fun().is_abs() && is_normal_form(t.fun()) && is_normal_form(t.arg());
  }
  return true;
}

/// Contracts the redex at `p`. The result is canonicalized.
inline Term beta_step(const Term& t, const RedexPosition& p) {
  auto sub = subterm_at(t, p);
  if (!sub || !is_redex(*sub)) throw NotARedex("position does not address a redex (\\x.M)N");
  Term lam = sub->fun();
  Term reduct = substitute(lam.body(), lam.name(), sub->arg());
  return canonicalize(replace_at(t, p, reduct));
}

/// Position of the head redex of `(\x.M) N N1 ... Nk`, if any.
inline std::optional<RedexPosition> weak_head_position(const Term& t) {
  RedexPosition p;
  Term cur = t;
  while (cur.is_app()) {
    if (cur.fun().is_abs()) return p;
    p.push_back(Step::Left);
    cur = cur.fun();
  }
  return std::nullopt;
}

inline std::optional<std::pair<Term, RedexPosition>> weak_head_step(const Term& t) {
  auto p = weak_head_position(t);
  if (!p) return std::nullopt;
  return std::make_pair(beta_step(t, *p), *p);
}

struct TraceStep {
  RedexPosition position;
  Strategy strategy;
  Term result;
};

struct ReductionTrace {
  Term start;
  std::vector<TraceStep> steps;

  const Term& last() const { return steps.empty() ? start : steps.back().result; }
};

struct NormalForm {
  Term term;
};
struct WeakHeadNF {
  Term term;
};
struct FuelExhausted {};

using ReductionOutcome = std::variant<NormalForm, WeakHeadNF, FuelExhausted>;

struct ReductionResult {
  ReductionTrace trace;
  ReductionOutcome outcome;

  bool exhausted() const { return std::holds_alternative<FuelExhausted>(outcome); }
};

/// Iterates the strategy for at most `fuel` contractions. Running out of fuel is
/// inconclusive, it says nothing about normalization.
inline ReductionResult reduce(const Term& t, Strategy strategy, std::size_t fuel) {
  ReductionResult r{ReductionTrace{t, {}}, FuelExhausted{}};
  Term cur = t;
  for (;;) {
    std::optional<RedexPosition> p;
    if (strategy == Strategy::WeakHead) {
      p = weak_head_position(cur);
      if (!p) {
        r.outcome = WeakHeadNF{cur};
        return r;
      }
    } else {
      auto all = redex_positions(cur);
      if (all.empty()) {
        r.outcome = NormalForm{cur};
        return r;
      }
      p = all.front();
    }
    if (r.trace.steps.size() >= fuel) {
      r.outcome = FuelExhausted{};
      return r;
    }
    cur = beta_step(cur, *p);
    r.trace.steps.push_back({*p, strategy, cur});
  }
}

/// Folds beta_step over the recorded positions and compares each intermediate term.
inline bool replay_trace(const ReductionTrace& trace) {
  Term cur = trace.start;
  for (const auto& s : trace.steps) {
    if (s.strategy == Strategy::WeakHead && weak_head_position(cur) != s.position) return false;
    cur = beta_step(cur, s.position);
    if (!alpha_eq(cur, s.result)) return false;
  }
  return true;
}

/// Length of the longest reduction sequence from `t`, exploring every redex choice;
/// absent when some path exceeds `bound` steps or more than `node_cap` terms are visited.
inline std::optional<std::size_t> longest_reduction(const Term& t, std::size_t bound, std::size_t node_cap = 200000) {
  std::vector<std::pair<Term, std::size_t>> memo;
  std::size_t visited = 0;
  auto find = [&](const Term& u) -> std::optional<std::size_t> {
    for (const auto& [k, v] : memo)
      if (alpha_eq(k, u)) return v;
    return std::nullopt;
  };
  bool failed = false;
  auto go = [&](auto&& self, const Term& u, std::size_t depth) -> std::size_t {
    if (failed) return 0;
    if (auto m = find(u)) return *m;
    if (depth > bound || ++visited > node_cap) {
      failed = true;
      return 0;
    }
    std::size_t best = 0;
    for (const auto& p : redex_positions(u)) {
      std::size_t len = 1 + self(self, beta_step(u, p), depth + 1);
      if (failed) return 0;
      if (len > best) best = len;
    }
    if (depth + best > bound) failed = true;
    memo.emplace_back(u, best);
    return best;
  };
  std::size_t r = go(go, t, 0);
  if (failed) return std::nullopt;
  return r;
}

}  // namespace lexp
