#pragma once

#include <cctype>
#include <cstddef>
#include <optional>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lexp/context.hpp"
#include "lexp/term.hpp"
#include "lexp/types.hpp"

namespace lexp {

class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& msg, std::size_t line, std::size_t column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg), line_(line), column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

struct RenderOptions {
  bool unicode = false;
};

// ---------------------------------------------------------------------------
// Rendering

namespace detail {
inline void render_term(const Term& t, const RenderOptions& o, std::string& out) {
  switch (t.kind()) {
    case Term::Kind::Var:
      out += t.name();
      return;
    case Term::Kind::Abs: {
      out += o.unicode ? "\xCE\xBB" : "\\";
      Term cur = t;
      bool first = true;
      while (cur.is_abs()) {
        if (!first) out += ' ';
        out += cur.name();
        first = false;
        cur = cur.body();
      }
      out += ". ";
      render_term(cur, o, out);
      return;
    }
    case Term::Kind::App: {
      Term f = t.fun();
      Term a = t.arg();
      bool paren_f = f.is_abs();
      if (paren_f) out += '(';
      render_term(f, o, out);
      if (paren_f) out += ')';
      out += ' ';
      bool paren_a = !a.is_var();
      if (paren_a) out += '(';
      render_term(a, o, out);
      if (paren_a) out += ')';
      return;
    }
  }
}

inline std::string_view arrow_token(ArrowKind k, bool unicode) {
  switch (k) {
    case ArrowKind::Simple: return unicode ? "\xE2\x86\x92" : "->";
    case ArrowKind::Lolli: return unicode ? "\xE2\x8A\xB8" : "-o";
    case ArrowKind::LolliL: return unicode ? "\xE2\x8A\xB8\xE2\x82\x97" : "-o_l";
    case ArrowKind::LolliR: return unicode ? "\xE2\x8A\xB8\xE1\xB5\xA3" : "-o_r";
  }
  return "?";
}

inline void render_type(const Type& t, const RenderOptions& o, std::string& out) {
  if (t.is_var()) {
    out += t.name();
    return;
  }
  bool paren = t.dom().is_arrow();
  if (paren) out += '(';
  render_type(t.dom(), o, out);
  if (paren) out += ')';
  out += ' ';
  out += arrow_token(t.arrow_kind(), o.unicode);
  out += ' ';
  render_type(t.cod(), o, out);
}

inline void render_inter(const InterType& t, const RenderOptions& o, std::string& out) {
  if (t.is_var()) {
    out += t.name();
    return;
  }
  const auto& dom = t.dom();
  bool paren = dom.size() > 1 || dom.front().is_arrow();
  if (paren) out += '(';
  for (std::size_t i = 0; i < dom.size(); ++i) {
    if (i) out += o.unicode ? " \xE2\x88\xA9 " : " & ";
    bool inner = dom.size() > 1 && dom[i].is_arrow();
    if (inner) out += '(';
    render_inter(dom[i], o, out);
    if (inner) out += ')';
  }
  if (paren) out += ')';
  out += o.unicode ? " \xE2\x86\x92 " : " -> ";
  render_inter(t.cod(), o, out);
}
}  // namespace detail

inline std::string render(const Term& t, const RenderOptions& o = {}) {
  std::string out;
  detail::render_term(t, o, out);
  return out;
}

inline std::string render(const Type& t, const RenderOptions& o = {}) {
  std::string out;
  detail::render_type(t, o, out);
  return out;
}

inline std::string render(const InterType& t, const RenderOptions& o = {}) {
  std::string out;
  detail::render_inter(t, o, out);
  return out;
}

inline std::string render(const Basis& b, const RenderOptions& o = {}) {
  std::string out;
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (i) out += ", ";
    out += b[i].var + ": " + render(b[i].type, o);
  }
  return out;
}

inline std::string render(const TypeEnv& g, const RenderOptions& o = {}) {
  std::string out = "{";
  bool first = true;
  for (const auto& [x, ts] : g) {
    if (!first) out += ", ";
    first = false;
    out += x + ": ";
    for (std::size_t i = 0; i < ts.size(); ++i) {
      if (i) out += o.unicode ? " \xE2\x88\xA9 " : " & ";
      bool paren = ts.size() > 1 && ts[i].is_arrow();
      if (paren) out += '(';
      out += render(ts[i], o);
      if (paren) out += ')';
    }
  }
  return out + "}";
}

/// Set contexts print as {x:{x1: t, ...}} with intersection types; list contexts
/// print as [x:[x1: t, ...]] with their ordered translations.
inline std::string render_set_ctx(const ExpansionContext& a, const RenderOptions& o = {}) {
  std::string out = "{";
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    if (i) out += ", ";
    out += a.entries[i].owner + ":{";
    const auto& bs = a.entries[i].bindings;
    for (std::size_t j = 0; j < bs.size(); ++j) {
      if (j) out += ", ";
      out += bs[j].var + ": " + render(bs[j].type, o);
    }
    out += "}";
  }
  return out + "}";
}

inline std::string render_list_ctx(const ExpansionContext& a, const RenderOptions& o = {}) {
  std::string out = "[";
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    if (i) out += ", ";
    out += a.entries[i].owner + ":[";
    const auto& bs = a.entries[i].bindings;
    for (std::size_t j = 0; j < bs.size(); ++j) {
      if (j) out += ", ";
      out += bs[j].var + ": " + render(translate(bs[j].type, Target::ToOrdered), o);
    }
    out += "]";
  }
  return out + "]";
}

// ---------------------------------------------------------------------------
// Lexer

namespace detail {

enum class Tok : std::uint8_t { Ident, Lambda, Dot, LParen, RParen, Arrow, Lolli, LolliL, LolliR, Inter, Comma, Colon, LBracket, RBracket, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t line;
  std::size_t column;
};

inline std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0, line = 1, col = 1;
  auto starts = [&](std::string_view s) { return src.substr(i, s.size()) == s; };
  auto push = [&](Tok k, std::size_t len, std::string text = {}) {
    out.push_back({k, std::move(text), line, col});
    i += len;
    col += len;
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == '\n') {
      ++i;
      ++line;
      col = 1;
    } else if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      ++col;
    } else if (c == '#') {
      while (i < src.size() && src[i] != '\n') ++i;
    } else if (c >= 'a' && c <= 'z') {
      std::size_t j = i + 1;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_' || src[j] == '\''))
        ++j;
      push(Tok::Ident, j - i, std::string(src.substr(i, j - i)));
    } else if (c == '\\') {
      push(Tok::Lambda, 1);
    } else if (starts("\xCE\xBB")) {
      push(Tok::Lambda, 2);
    } else if (c == '.') {
      push(Tok::Dot, 1);
    } else if (c == '(') {
      push(Tok::LParen, 1);
    } else if (c == ')') {
      push(Tok::RParen, 1);
    } else if (c == '[') {
      push(Tok::LBracket, 1);
    } else if (c == ']') {
      push(Tok::RBracket, 1);
    } else if (c == ',') {
      push(Tok::Comma, 1);
    } else if (c == ':') {
      push(Tok::Colon, 1);
    } else if (c == '&') {
      push(Tok::Inter, 1);
    } else if (starts("\xE2\x88\xA9")) {
      push(Tok::Inter, 3);
    } else if (starts("->")) {
      push(Tok::Arrow, 2);
    } else if (starts("\xE2\x86\x92")) {
      push(Tok::Arrow, 3);
    } else if (starts("-o_l")) {
      push(Tok::LolliL, 4);
    } else if (starts("-o_r")) {
      push(Tok::LolliR, 4);
    } else if (starts("-o")) {
      push(Tok::Lolli, 2);
    } else if (starts("\xE2\x8A\xB8\xE2\x82\x97")) {
      push(Tok::LolliL, 6);
    } else if (starts("\xE2\x8A\xB8\xE1\xB5\xA3")) {
      push(Tok::LolliR, 6);
    } else if (starts("\xE2\x8A\xB8")) {
      push(Tok::Lolli, 3);
    } else {
      throw SyntaxError(std::string("unexpected character '") + c + "'", line, col);
    }
  }
  out.push_back({Tok::End, {}, line, col});
  return out;
}

class Cursor {
 public:
  explicit Cursor(std::vector<Token> toks) : toks_(std::move(toks)) {}
  const Token& peek() const { return toks_[pos_]; }
  bool at(Tok k) const { return peek().kind == k; }
  Token take() { return toks_[pos_ == toks_.size() - 1 ? pos_ : pos_++]; }
  Token expect(Tok k, const char* what) {
    if (!at(k)) fail(std::string("expected ") + what);
    return take();
  }
  [[noreturn]] void fail(const std::string& msg) const { throw SyntaxError(msg, peek().line, peek().column); }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

inline Term parse_term_expr(Cursor& c);

inline std::optional<Term> parse_atom(Cursor& c) {
  if (c.at(Tok::Ident)) return Term::var(c.take().text);
  if (c.at(Tok::LParen)) {
    c.take();
    Term t = parse_term_expr(c);
    c.expect(Tok::RParen, "')'");
    return t;
  }
  if (c.at(Tok::Lambda)) return parse_term_expr(c);
  return std::nullopt;
}

inline Term parse_term_expr(Cursor& c) {
  if (c.at(Tok::Lambda)) {
    c.take();
    std::vector<std::string> binders;
    while (c.at(Tok::Ident)) binders.push_back(c.take().text);
    if (binders.empty()) c.fail("expected binder after lambda");
    c.expect(Tok::Dot, "'.'");
    return Term::abs(binders, parse_term_expr(c));
  }
  auto head = parse_atom(c);
  if (!head) c.fail("expected a term");
  Term acc = *head;
  // A trailing lambda extends as far right as possible.
  while (auto next = parse_atom(c)) acc = Term::app(acc, *next);
  return acc;
}

// Raw type trees: `&` is only meaningful directly left of `->`.
struct RawType {
  enum class Kind : std::uint8_t { Var, Arrow, Inter } kind;
  std::string name;
  ArrowKind arrow{};
  std::vector<std::shared_ptr<RawType>> kids;
  std::size_t line = 0, column = 0;
};
using RawPtr = std::shared_ptr<RawType>;

inline RawPtr parse_raw_type(Cursor& c);

inline RawPtr parse_raw_atom(Cursor& c) {
  const Token& t = c.peek();
  if (t.kind == Tok::Ident) {
    auto r = std::make_shared<RawType>(RawType{RawType::Kind::Var, c.take().text, {}, {}, t.line, t.column});
    return r;
  }
  if (t.kind == Tok::LParen) {
    c.take();
    RawPtr r = parse_raw_type(c);
    c.expect(Tok::RParen, "')'");
    return r;
  }
  c.fail("expected a type");
}

inline RawPtr parse_raw_inter(Cursor& c) {
  std::size_t line = c.peek().line, col = c.peek().column;
  RawPtr first = parse_raw_atom(c);
  if (!c.at(Tok::Inter)) return first;
  auto r = std::make_shared<RawType>(RawType{RawType::Kind::Inter, {}, {}, {first}, line, col});
  while (c.at(Tok::Inter)) {
    c.take();
    r->kids.push_back(parse_raw_atom(c));
  }
  return r;
}

inline RawPtr parse_raw_type(Cursor& c) {
  std::size_t line = c.peek().line, col = c.peek().column;
  RawPtr lhs = parse_raw_inter(c);
  std::optional<ArrowKind> k;
  switch (c.peek().kind) {
    case Tok::Arrow: k = ArrowKind::Simple; break;
    case Tok::Lolli: k = ArrowKind::Lolli; break;
    case Tok::LolliL: k = ArrowKind::LolliL; break;
    case Tok::LolliR: k = ArrowKind::LolliR; break;
    default: return lhs;
  }
  c.take();
  RawPtr rhs = parse_raw_type(c);
  return std::make_shared<RawType>(RawType{RawType::Kind::Arrow, {}, *k, {lhs, rhs}, line, col});
}

inline InterType to_inter(const RawPtr& r) {
  switch (r->kind) {
    case RawType::Kind::Var: return InterType::tvar(r->name);
    case RawType::Kind::Inter: throw SyntaxError("intersection must be the domain of an arrow", r->line, r->column);
    case RawType::Kind::Arrow: {
      if (r->arrow != ArrowKind::Simple)
        throw SyntaxError("intersection types use '->' only", r->line, r->column);
      std::vector<InterType> dom;
      if (r->kids[0]->kind == RawType::Kind::Inter) {
        for (const auto& k : r->kids[0]->kids) dom.push_back(to_inter(k));
      } else {
        dom.push_back(to_inter(r->kids[0]));
      }
      return InterType::arrow(std::move(dom), to_inter(r->kids[1]));
    }
  }
  throw SyntaxError("bad type", r->line, r->column);
}

inline Type to_simple(const RawPtr& r) {
  switch (r->kind) {
    case RawType::Kind::Var: return Type::tvar(r->name);
    case RawType::Kind::Inter: throw SyntaxError("intersection is not allowed here", r->line, r->column);
    case RawType::Kind::Arrow: return Type::arrow(r->arrow, to_simple(r->kids[0]), to_simple(r->kids[1]));
  }
  throw SyntaxError("bad type", r->line, r->column);
}

inline void expect_end(Cursor& c) {
  if (!c.at(Tok::End)) c.fail("unexpected trailing input");
}

}  // namespace detail

/// Parses and canonicalizes a term. Application is left-associative; a lambda
/// body extends as far right as possible.
inline Term parse_term(std::string_view src) {
  detail::Cursor c(detail::lex(src));
  Term t = detail::parse_term_expr(c);
  detail::expect_end(c);
  return canonicalize(t);
}

/// Parses an intersection type: `->` only, `&` binds tighter than `->`.
inline InterType parse_inter_type(std::string_view src) {
  detail::Cursor c(detail::lex(src));
  auto r = detail::parse_raw_type(c);
  detail::expect_end(c);
  return detail::to_inter(r);
}

/// Parses a simple, linear or ordered type.
inline Type parse_type(std::string_view src) {
  detail::Cursor c(detail::lex(src));
  auto r = detail::parse_raw_type(c);
  detail::expect_end(c);
  return detail::to_simple(r);
}

/// Parses `x1: t1, x2: t2` (optionally bracketed).
inline Basis parse_basis(std::string_view src) {
  detail::Cursor c(detail::lex(src));
  Basis out;
  bool bracket = c.at(detail::Tok::LBracket);
  if (bracket) c.take();
  while (c.at(detail::Tok::Ident)) {
    std::string x = c.take().text;
    c.expect(detail::Tok::Colon, "':'");
    out.push_back({x, detail::to_simple(detail::parse_raw_type(c))});
    if (!c.at(detail::Tok::Comma)) break;
    c.take();
  }
  if (bracket) c.expect(detail::Tok::RBracket, "']'");
  detail::expect_end(c);
  if (!is_consistent(out)) throw SyntaxError("basis binds a variable twice", 1, 1);
  return out;
}

}  // namespace lexp
