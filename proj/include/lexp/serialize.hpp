#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "lexp/context.hpp"
#include "lexp/expansion.hpp"
#include "lexp/intersection.hpp"
#include "lexp/substructural.hpp"
#include "lexp/syntax.hpp"
#include "lexp/term.hpp"
#include "lexp/types.hpp"
#include "lexp/verify.hpp"

namespace lexp {

using json = nlohmann::ordered_json;

inline constexpr std::string_view kSchema = "lambda-expand/v1";

class FormatError : public Error {
 public:
  using Error::Error;
};

namespace detail {

template <class E, std::size_t N>
E enum_from(std::string_view s, const std::array<E, N>& all, std::string_view what) {
  for (E e : all)
    if (to_string(e) == s) return e;
  throw FormatError("unknown " + std::string(what) + " '" + std::string(s) + "'");
}

inline std::string_view arrow_name(ArrowKind k) { return arrow_token(k, false); }

inline ArrowKind arrow_from(std::string_view s) {
  for (ArrowKind k : {ArrowKind::Simple, ArrowKind::Lolli, ArrowKind::LolliL, ArrowKind::LolliR})
    if (arrow_name(k) == s) return k;
  throw FormatError("unknown arrow '" + std::string(s) + "'");
}

}  // namespace detail

inline System system_from_string(std::string_view s) {
  return detail::enum_from(s, std::array{System::Curry, System::Relevant, System::Affine, System::Linear, System::Ordered},
                           "system");
}

inline Rule rule_from_string(std::string_view s) {
  return detail::enum_from(s,
                           std::array{Rule::Ax, Rule::Weak, Rule::Ex, Rule::Ctr, Rule::ArrowI, Rule::ArrowE,
                                      Rule::ArrowIL, Rule::ArrowIR, Rule::ArrowEL, Rule::ArrowER},
                           "rule");
}

inline InterRule inter_rule_from_string(std::string_view s) {
  return detail::enum_from(s, std::array{InterRule::Ax, InterRule::ArrowI, InterRule::ArrowIPrime, InterRule::ArrowE},
                           "rule");
}

inline Flavor flavor_from_string(std::string_view s) {
  return detail::enum_from(s, std::array{Flavor::ACI, Flavor::AC, Flavor::A}, "flavor");
}

inline ExpansionFlavor expansion_flavor_from_string(std::string_view s) {
  return detail::enum_from(s, std::array{ExpansionFlavor::ACI, ExpansionFlavor::AC, ExpansionFlavor::Ordered},
                           "expansion flavor");
}

// ---------------------------------------------------------------------------
// Terms and types

inline json to_json(const Term& t) {
  switch (t.kind()) {
    case Term::Kind::Var: return {{"var", t.name()}};
    case Term::Kind::Abs: return {{"lam", t.name()}, {"body", to_json(t.body())}};
    case Term::Kind::App: return {{"app", json::array({to_json(t.fun()), to_json(t.arg())})}};
  }
  return nullptr;
}

inline Term term_from_json(const json& j) {
  if (j.contains("var")) return Term::var(j.at("var").get<std::string>());
  if (j.contains("lam")) return Term::abs(j.at("lam").get<std::string>(), term_from_json(j.at("body")));
  if (j.contains("app")) return Term::app(term_from_json(j.at("app").at(0)), term_from_json(j.at("app").at(1)));
  throw FormatError("not a term: " + j.dump());
}

inline json to_json(const Type& t) {
  if (t.is_var()) return {{"tvar", t.name()}};
  return {{"arrow", detail::arrow_name(t.arrow_kind())}, {"dom", to_json(t.dom())}, {"cod", to_json(t.cod())}};
}

inline Type type_from_json(const json& j) {
  if (j.contains("tvar")) return Type::tvar(j.at("tvar").get<std::string>());
  return Type::arrow(detail::arrow_from(j.at("arrow").get<std::string>()), type_from_json(j.at("dom")),
                     type_from_json(j.at("cod")));
}

inline json to_json(const InterType& t) {
  if (t.is_var()) return {{"tvar", t.name()}};
  json dom = json::array();
  for (const auto& d : t.dom()) dom.push_back(to_json(d));
  return {{"dom", std::move(dom)}, {"cod", to_json(t.cod())}};
}

inline InterType inter_type_from_json(const json& j) {
  if (j.contains("tvar")) return InterType::tvar(j.at("tvar").get<std::string>());
  std::vector<InterType> dom;
  for (const auto& d : j.at("dom")) dom.push_back(inter_type_from_json(d));
  return InterType::arrow(std::move(dom), inter_type_from_json(j.at("cod")));
}

inline json to_json(const Basis& b) {
  json out = json::array();
  for (const auto& a : b) out.push_back({{"var", a.var}, {"type", to_json(a.type)}});
  return out;
}

inline Basis basis_from_json(const json& j) {
  Basis b;
  for (const auto& a : j) b.push_back(Assumption{a.at("var").get<std::string>(), type_from_json(a.at("type"))});
  return b;
}

inline json to_json(const TypeEnv& g) {
  json out = json::object();
  for (const auto& [x, ts] : g) {
    json l = json::array();
    for (const auto& t : ts) l.push_back(to_json(t));
    out[x] = std::move(l);
  }
  return out;
}

inline TypeEnv env_from_json(const json& j) {
  TypeEnv g;
  for (const auto& [x, ts] : j.items()) {
    auto& dst = g[x];
    for (const auto& t : ts) dst.push_back(inter_type_from_json(t));
  }
  return g;
}

inline json to_json(const ExpansionContext& a) {
  json out = json::array();
  for (const auto& e : a.entries) {
    json bs = json::array();
    for (const auto& b : e.bindings) bs.push_back({{"var", b.var}, {"type", to_json(b.type)}});
    out.push_back({{"owner", e.owner}, {"bindings", std::move(bs)}});
  }
  return out;
}

inline ExpansionContext context_from_json(const json& j) {
  ExpansionContext a;
  for (const auto& e : j) {
    VarExpansion v{e.at("owner").get<std::string>(), {}};
    for (const auto& b : e.at("bindings"))
      v.bindings.push_back(Binding{b.at("var").get<std::string>(), inter_type_from_json(b.at("type"))});
    a.entries.push_back(std::move(v));
  }
  return a;
}

// ---------------------------------------------------------------------------
// Derivations

inline json to_json(const Derivation& d) {
  json ps = json::array();
  for (const auto& p : d.premises) ps.push_back(to_json(p));
  return {{"system", to_string(d.system)}, {"rule", to_string(d.rule)}, {"basis", to_json(d.basis)},
          {"subject", to_json(d.subject)},  {"type", to_json(d.type)},  {"premises", std::move(ps)}};
}

inline Derivation derivation_from_json(const json& j) {
  std::vector<Derivation> ps;
  for (const auto& p : j.at("premises")) ps.push_back(derivation_from_json(p));
  return Derivation{system_from_string(j.at("system").get<std::string>()),
                    rule_from_string(j.at("rule").get<std::string>()),
                    basis_from_json(j.at("basis")),
                    term_from_json(j.at("subject")),
                    type_from_json(j.at("type")),
                    std::move(ps)};
}

inline json to_json(const InterDerivation& d) {
  json ps = json::array();
  for (const auto& p : d.premises) ps.push_back(to_json(p));
  return {{"flavor", to_string(d.flavor)},   {"rule", to_string(d.rule)}, {"env", to_json(d.env)},
          {"subject", to_json(d.subject)}, {"type", to_json(d.type)},   {"premises", std::move(ps)}};
}

inline InterDerivation inter_derivation_from_json(const json& j) {
  std::vector<InterDerivation> ps;
  for (const auto& p : j.at("premises")) ps.push_back(inter_derivation_from_json(p));
  return InterDerivation{inter_rule_from_string(j.at("rule").get<std::string>()),
                         env_from_json(j.at("env")),
                         term_from_json(j.at("subject")),
                         inter_type_from_json(j.at("type")),
                         std::move(ps),
                         flavor_from_string(j.at("flavor").get<std::string>())};
}

inline json to_json(const ExpansionResult& e) {
  json out{{"flavor", to_string(e.flavor)},
           {"expanded", to_json(e.expanded)},
           {"type", to_json(e.annotation)},
           {"context", to_json(e.context)},
           {"derivation", to_json(e.derivation)}};
  if (e.strict) out["strict_derivation"] = to_json(*e.strict);
  return out;
}

inline json to_json(const std::vector<PropertyReport>& reports) {
  json out = json::array();
  for (const auto& r : reports) {
    json counts = json::object();
    for (Outcome o : {Outcome::Pass, Outcome::Fail, Outcome::Vacuous, Outcome::Inconclusive, Outcome::ExpectedFailure,
                      Outcome::OrderViolation})
      counts[std::string(to_string(o))] = r.count(o);
    json inst = json::array();
    for (const auto& i : r.instances)
      inst.push_back({{"instance", i.instance}, {"outcome", to_string(i.outcome)}, {"detail", i.detail}});
    out.push_back({{"id", r.id},
                   {"kind", to_string(r.kind)},
                   {"statement", r.statement},
                   {"counts", std::move(counts)},
                   {"instances", std::move(inst)}});
  }
  return out;
}

/// Top-level document: the schema tag, a kind, then the payload fields.
inline json document(std::string_view kind, json payload) {
  json out{{"schema", kSchema}, {"kind", kind}};
  for (auto& [k, v] : payload.items()) out[k] = std::move(v);
  return out;
}

// ---------------------------------------------------------------------------
// Text trees

inline std::string judgment_text(const Derivation& d, const RenderOptions& o = {}) {
  return render(d.basis, o) + " |- " + render(d.subject, o) + " : " + render(d.type, o);
}

inline std::string judgment_text(const InterDerivation& d, const RenderOptions& o = {}) {
  return render(d.env, o) + " |- " + render(d.subject, o) + " : " + render(d.type, o);
}

/// Conclusion first, premises indented below it.
template <class D>
std::string derivation_text(const D& d, const RenderOptions& o = {}, std::size_t indent = 0) {
  std::string out(indent * 2, ' ');
  out += "(" + std::string(to_string(d.rule)) + ") " + judgment_text(d, o) + "\n";
  for (const auto& p : d.premises) out += derivation_text(p, o, indent + 1);
  return out;
}

// ---------------------------------------------------------------------------
// DOT

namespace detail {

inline std::string dot_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

template <class D>
void dot_nodes(const D& d, const RenderOptions& o, std::size_t& next, std::string& out) {
  std::size_t me = next++;
  out += "  n" + std::to_string(me) + " [label=\"" + dot_escape(std::string(to_string(d.rule))) + "\\n" +
         dot_escape(judgment_text(d, o)) + "\"];\n";
  for (const auto& p : d.premises) {
    std::size_t child = next;
    dot_nodes(p, o, next, out);
    out += "  n" + std::to_string(me) + " -> n" + std::to_string(child) + ";\n";
  }
}

}  // namespace detail

/// One node per derivation step, labelled with its rule and judgment; edges
/// run from a conclusion to its premises.
template <class D>
std::string to_dot(const D& d, const RenderOptions& o = {}) {
  std::string out = "digraph derivation {\n  node [shape=box, fontname=\"monospace\"];\n";
  std::size_t next = 0;
  detail::dot_nodes(d, o, next, out);
  return out + "}\n";
}

/// Syntax tree of a term.
inline std::string term_to_dot(const Term& t, const RenderOptions& o = {}) {
  std::string out = "digraph term {\n  node [shape=ellipse, fontname=\"monospace\"];\n";
  std::size_t next = 0;
  auto walk = [&](auto&& self, const Term& u) -> std::size_t {
    std::size_t me = next++;
    std::string label = u.is_var() ? u.name() : u.is_abs() ? std::string(o.unicode ? "λ" : "\\\\") + u.name() : "@";
    out += "  n" + std::to_string(me) + " [label=\"" + label + "\"];\n";
    if (u.is_abs()) {
      std::size_t c = self(self, u.body());
      out += "  n" + std::to_string(me) + " -> n" + std::to_string(c) + ";\n";
    } else if (u.is_app()) {
      std::size_t f = self(self, u.fun());
      std::size_t a = self(self, u.arg());
      out += "  n" + std::to_string(me) + " -> n" + std::to_string(f) + ";\n";
      out += "  n" + std::to_string(me) + " -> n" + std::to_string(a) + ";\n";
    }
    return me;
  };
  walk(walk, t);
  return out + "}\n";
}

}  // namespace lexp
