#pragma once

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lexp/expansion.hpp"
#include "lexp/intersection.hpp"
#include "lexp/reduction.hpp"
#include "lexp/serialize.hpp"
#include "lexp/substructural.hpp"
#include "lexp/syntax.hpp"
#include "lexp/verify.hpp"

namespace lexp::cli {

enum Exit : int { kOk = 0, kAbsent = 1, kFuel = 2, kUsage = 3 };

enum class Format { Text, Json, Dot };

struct Options {
  Format format = Format::Text;
  bool unicode = false;
  std::string input;  // term source, path, or "-" for stdin
  std::string system = "curry";
  std::string flavor;
  std::string orientation = "mixed";
  std::string type;
  std::string basis;
  std::string strategy = "leftmost";
  std::optional<std::size_t> fuel;
  std::string corpus = "golden";
  std::string props = "all";
  std::size_t max_size = 5;
  bool open = false;
};

/// LEXP_FUEL, when set to a number, replaces the built-in default.
inline std::size_t default_fuel() {
  if (const char* v = std::getenv("LEXP_FUEL")) {
    char* end = nullptr;
    unsigned long long n = std::strtoull(v, &end, 10);
    if (end && *end == '\0' && end != v) return static_cast<std::size_t>(n);
  }
  return kDefaultFuel;
}

class Runner {
 public:
  Runner(const Options& o, std::istream& in, std::ostream& out, std::ostream& err)
      : o_(o), in_(in), out_(out), err_(err), ro_{o.unicode} {}

  int parse() {
    Term t = term();
    TermClass k = classify(t);
    switch (o_.format) {
      case Format::Text: out_ << render(t, ro_) << "\n"; break;
      case Format::Json:
        emit(document("term", {{"term", to_json(t)},
                               {"text", render(t, ro_)},
                               {"size", t.size()},
                               {"lambda_i", k.is_lambdaI},
                               {"affine", k.is_affine},
                               {"linear", k.is_linear}}));
        break;
      case Format::Dot: out_ << term_to_dot(t, ro_); break;
    }
    return kOk;
  }

  int check() {
    Term t = term();
    System s = system_from_string(o_.system);
    std::optional<Derivation> d;
    if (s == System::Ordered) {
      if (o_.type.empty()) return usage("check --system ordered needs --type");
      try {
        d = check_ordered(basis(), t, parse_type(o_.type));
      } catch (const SizeBoundExceeded& e) {
        err_ << "inconclusive: " << e.what() << "\n";
        return kFuel;
      }
    } else if (!o_.type.empty()) {
      Type ty = parse_type(o_.type);
      if (uses_only(ty, {ArrowKind::Simple, ArrowKind::Lolli})) ty = with_arrow_kind(ty, arrow_of(s));
      Basis b = basis();
      for (auto& a : b)
        if (uses_only(a.type, {ArrowKind::Simple, ArrowKind::Lolli})) a.type = with_arrow_kind(a.type, arrow_of(s));
      d = check_typing(s, b, t, ty);
    } else {
      d = decide(s, t);
    }
    if (!d) {
      if (o_.format == Format::Json)
        emit(document("check", {{"system", o_.system}, {"subject", to_json(t)}, {"present", false}}));
      else if (o_.format == Format::Text)
        out_ << "absent\n";
      return kAbsent;
    }
    switch (o_.format) {
      case Format::Text: out_ << "present\n" << derivation_text(*d, ro_); break;
      case Format::Json:
        emit(document("check", {{"system", o_.system}, {"subject", to_json(t)}, {"present", true},
                                {"derivation", to_json(*d)}}));
        break;
      case Format::Dot: out_ << to_dot(*d, ro_); break;
    }
    return kOk;
  }

  int infer_cmd() {
    Term t = term();
    if (o_.system == "curry") {
      auto c = infer_curry(t);
      if (!c) {
        if (o_.format == Format::Text) out_ << "absent\n";
        if (o_.format == Format::Json) emit(document("infer", {{"system", "curry"}, {"typable", false}}));
        return kAbsent;
      }
      switch (o_.format) {
        case Format::Text:
          out_ << render(c->type, ro_) << "\n";
          if (!c->basis.empty()) out_ << "basis " << render(c->basis, ro_) << "\n";
          break;
        case Format::Json:
          emit(document("infer", {{"system", "curry"}, {"typable", true}, {"type", to_json(c->type)},
                                  {"text", render(c->type, ro_)}, {"basis", to_json(c->basis)}}));
          break;
        case Format::Dot: {
          auto d = build_structural(System::Curry, c->tree, c->basis);
          if (!d) return usage("no derivation to draw");
          out_ << to_dot(*d, ro_);
          break;
        }
      }
      return kOk;
    }
    if (o_.system != "intersection") return usage("unknown system " + o_.system);
    Flavor f = flavor_from_string(o_.flavor.empty() ? "aci" : o_.flavor);
    InferResult r = infer(t, f, fuel());
    if (!r.derivation) {
      err_ << "not typable within fuel (" << fuel() << " contractions)\n";
      if (o_.format == Format::Json)
        emit(document("infer", {{"system", "intersection"}, {"flavor", to_string(f)}, {"typable", false},
                                {"steps", r.steps}}));
      return kFuel;
    }
    const InterDerivation& d = *r.derivation;
    InterType shown = normalize(d.type, f);
    switch (o_.format) {
      case Format::Text:
        out_ << render(shown, ro_) << "\n";
        if (!d.env.empty()) out_ << "env " << render(d.env, ro_) << "\n";
        break;
      case Format::Json:
        emit(document("infer", {{"system", "intersection"},
                                {"flavor", to_string(f)},
                                {"typable", true},
                                {"type", to_json(shown)},
                                {"text", render(shown, ro_)},
                                {"env", to_json(d.env)},
                                {"steps", r.steps},
                                {"derivation", to_json(d)}}));
        break;
      case Format::Dot: out_ << to_dot(d, ro_); break;
    }
    return kOk;
  }

  int expand_cmd() {
    Term t = term();
    ExpansionFlavor f = expansion_flavor_from_string(o_.flavor.empty() ? "aci" : o_.flavor);
    Orientation orient;
    if (o_.orientation == "right") orient = Orientation::RightOnly;
    else if (o_.orientation == "mixed") orient = Orientation::Mixed;
    else return usage("unknown orientation " + o_.orientation);
    InferResult r = infer(t, source_flavor(f), fuel());
    if (!r.derivation) {
      err_ << "not typable within fuel (" << fuel() << " contractions)\n";
      return kFuel;
    }
    InterDerivation d = *r.derivation;
    if (!o_.type.empty()) {
      auto inst = instantiate(d, parse_inter_type(o_.type));
      if (!inst) {
        err_ << "the principal type " << render(d.type, ro_) << " has no instance " << o_.type << "\n";
        if (o_.format == Format::Text) out_ << "absent\n";
        return kAbsent;
      }
      d = *inst;
    }
    ExpansionResult e = expand(d, f, orient);
    std::string ctx = f == ExpansionFlavor::Ordered ? render_list_ctx(e.context, ro_) : render_set_ctx(e.context, ro_);
    switch (o_.format) {
      case Format::Text:
        out_ << render(e.expanded, ro_) << "\n";
        out_ << "type " << render(e.annotation, ro_) << "\n";
        out_ << "context " << ctx << "\n";
        break;
      case Format::Json: {
        json payload = to_json(e);
        payload["source"] = to_json(d);
        payload["text"] = render(e.expanded, ro_);
        payload["context_text"] = ctx;
        emit(document("expansion", std::move(payload)));
        break;
      }
      case Format::Dot: out_ << to_dot(e.derivation, ro_); break;
    }
    return kOk;
  }

  int reduce_cmd() {
    Term t = term();
    Strategy s;
    if (o_.strategy == "leftmost") s = Strategy::Leftmost;
    else if (o_.strategy == "weak-head") s = Strategy::WeakHead;
    else return usage("unknown strategy " + o_.strategy);
    if (o_.format == Format::Dot) return usage("reduce has no DOT output");
    ReductionResult r = reduce(t, s, fuel());
    const Term& last = r.trace.last();
    if (o_.format == Format::Text) {
      out_ << render(last, ro_) << "\n";
      out_ << "steps " << r.trace.steps.size() << "\n";
    } else {
      json steps = json::array();
      for (const auto& st : r.trace.steps) steps.push_back(render(st.result, ro_));
      emit(document("reduction", {{"strategy", o_.strategy},
                                  {"start", to_json(t)},
                                  {"result", to_json(last)},
                                  {"text", render(last, ro_)},
                                  {"exhausted", r.exhausted()},
                                  {"trace", std::move(steps)}}));
    }
    if (r.exhausted()) {
      err_ << "fuel exhausted after " << r.trace.steps.size() << " contractions\n";
      return kFuel;
    }
    return kOk;
  }

  int verify_cmd() {
    if (o_.format == Format::Dot) return usage("verify has no DOT output");
    std::optional<Corpus> c = corpus_from_spec(o_.corpus);
    if (!c) {
      std::ifstream file(o_.corpus);
      if (!file) return usage("corpus is neither closed:N, open:N, golden nor a readable file: " + o_.corpus);
      c = Corpus{o_.corpus, {}};
      std::string line;
      while (std::getline(file, line)) {
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        c->terms.push_back(parse_term(line));
      }
    }
    std::vector<std::string> ids;
    if (o_.props == "all") {
      ids = property_ids();
    } else {
      std::stringstream ss(o_.props);
      std::string id;
      while (std::getline(ss, id, ','))
        if (!id.empty()) ids.push_back(id);
    }
    for (const auto& id : ids)
      if (!find_property(id)) return usage("unknown property " + id);
    auto reports = run_matrix(*c, ids, fuel());
    if (o_.format == Format::Text) {
      out_ << c->terms.size() << " terms in " << c->name << "\n" << summary_table(reports);
    } else {
      emit(document("report", {{"corpus", c->name}, {"terms", c->terms.size()}, {"properties", to_json(reports)}}));
    }
    bool ok = std::all_of(reports.begin(), reports.end(), [](const PropertyReport& r) { return r.ok(); });
    return ok ? kOk : kAbsent;
  }

  int enumerate_cmd() {
    if (o_.format == Format::Dot) return usage("enumerate has no DOT output");
    std::vector<Term> ts = enumerate_terms(o_.max_size, !o_.open);
    if (o_.format == Format::Text) {
      for (const auto& t : ts) out_ << render(t, ro_) << "\n";
    } else {
      json arr = json::array();
      for (const auto& t : ts) arr.push_back(render(t, ro_));
      emit(document("enumeration", {{"max_size", o_.max_size}, {"closed", !o_.open}, {"count", ts.size()},
                                    {"terms", std::move(arr)}}));
    }
    return kOk;
  }

 private:
  std::size_t fuel() const { return o_.fuel ? *o_.fuel : default_fuel(); }

  std::string source() {
    if (o_.input.empty() || o_.input == "-") {
      return std::string(std::istreambuf_iterator<char>(in_), std::istreambuf_iterator<char>());
    }
    return o_.input;
  }

  Term term() { return parse_term(source()); }

  Basis basis() const { return o_.basis.empty() ? Basis{} : parse_basis(o_.basis); }

  void emit(const json& j) { out_ << j.dump(2) << "\n"; }

  int usage(const std::string& msg) {
    err_ << "error: " << msg << "\n";
    return kUsage;
  }

  const Options& o_;
  std::istream& in_;
  std::ostream& out_;
  std::ostream& err_;
  RenderOptions ro_;
};

/// Runs one command line (without the program name). Never throws.
inline int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Intersection types, substructural type systems and expansion for the lambda calculus", "lexp"};
  app.require_subcommand(1);
  Options o;
  std::string format = "text";
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json", "dot"}));
  app.add_flag("--unicode", o.unicode, "Emit unicode lambda, intersection and lollipop symbols");

  auto term_arg = [&](CLI::App* sub) { sub->add_option("term", o.input, "Term source, or - for stdin"); };
  auto fuel_opt = [&](CLI::App* sub) {
    sub->add_option_function<std::size_t>("--fuel", [&](const std::size_t& n) { o.fuel = n; },
                                          "Contraction budget (default: LEXP_FUEL or 10000)");
  };

  CLI::App* parse = app.add_subcommand("parse", "Parse and print a term in canonical form");
  term_arg(parse);

  CLI::App* check = app.add_subcommand("check", "Decide or check typability in a substructural system");
  check->add_option("--system", o.system, "Type system")
      ->check(CLI::IsMember({"curry", "relevant", "affine", "linear", "ordered"}));
  check->add_option("--type", o.type, "Type to check against");
  check->add_option("--basis", o.basis, "Basis, e.g. 'x: a -> b, y: a'");
  term_arg(check);

  CLI::App* inf = app.add_subcommand("infer", "Infer a principal typing");
  inf->add_option("--system", o.system, "curry or intersection")->check(CLI::IsMember({"curry", "intersection"}));
  inf->add_option("--flavor", o.flavor, "Intersection flavor")->check(CLI::IsMember({"aci", "ac", "a"}));
  fuel_opt(inf);
  term_arg(inf);

  CLI::App* exp = app.add_subcommand("expand", "Expand a typable term");
  exp->add_option("--flavor", o.flavor, "Expansion flavor")->check(CLI::IsMember({"aci", "ac", "ordered"}));
  exp->add_option("--orientation", o.orientation, "Ordered abstraction orientation")
      ->check(CLI::IsMember({"right", "mixed"}));
  exp->add_option("--type", o.type, "Instance of the principal type to expand at");
  fuel_opt(exp);
  term_arg(exp);

  CLI::App* red = app.add_subcommand("reduce", "Reduce a term");
  red->add_option("--strategy", o.strategy, "Reduction strategy")->check(CLI::IsMember({"leftmost", "weak-head"}));
  fuel_opt(red);
  term_arg(red);

  CLI::App* ver = app.add_subcommand("verify", "Run the property matrix over a corpus");
  ver->add_option("--corpus", o.corpus, "closed:N, open:N, golden, or a file with one term per line");
  ver->add_option("--props", o.props, "Comma-separated property ids, or all");
  fuel_opt(ver);

  CLI::App* en = app.add_subcommand("enumerate", "List all terms up to a size");
  en->add_option("--max-size", o.max_size, "Largest size, in constructors")->required();
  en->add_flag("--open", o.open, "Include terms with free variables");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    for (CLI::App* sub : app.get_subcommands())
      if (sub->parsed()) {
        err << sub->help();
        return kUsage;
      }
    err << app.help();
    return kUsage;
  }
  o.format = format == "json" ? Format::Json : format == "dot" ? Format::Dot : Format::Text;

  Runner r(o, in, out, err);
  try {
    if (parse->parsed()) return r.parse();
    if (check->parsed()) return r.check();
    if (inf->parsed()) return r.infer_cmd();
    if (exp->parsed()) return r.expand_cmd();
    if (red->parsed()) return r.reduce_cmd();
    if (ver->parsed()) return r.verify_cmd();
    if (en->parsed()) return r.enumerate_cmd();
  } catch (const SyntaxError& e) {
    err << "syntax error: " << e.what() << "\n";
    return kUsage;
  } catch (const CapExceeded& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const OrderViolation& e) {
    err << "order violation: " << e.what() << "\n";
    if (o.format == Format::Text) out << "absent\n";
    return kAbsent;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kAbsent;
  }
  return kUsage;
}

}  // namespace lexp::cli
