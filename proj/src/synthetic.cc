/* Copyright 2026 The Lemma Namer Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "lemma_namer/synthetic.h"

#include <set>
#include <stdexcept>

#include "lemma_namer/random.h"
#include "lemma_namer/subtok.h"

namespace lemma_namer {

using nlohmann::json;

namespace {

enum class Template { kComm, kAssoc, kDistL, kDistR, kInvol, kMorph };

struct Expr {
  enum class Kind { kVar, kBin, kNeg, kApp };
  Kind kind = Kind::kVar;
  std::string text;  // variable or function name
  std::string op;    // "add" or "mul"
  std::vector<Expr> args;
};

Expr var(const std::string& name) { return {Expr::Kind::kVar, name, "", {}}; }
Expr bin(const std::string& op, Expr a, Expr b) {
  return {Expr::Kind::kBin, "", op, {std::move(a), std::move(b)}};
}
Expr neg(const std::string& op, Expr a) {
  return {Expr::Kind::kNeg, "", op, {std::move(a)}};
}
Expr app(const std::string& f, Expr a) {
  return {Expr::Kind::kApp, f, "", {std::move(a)}};
}

std::string negation(const std::string& op) { return op == "add" ? "opp" : "inv"; }

int precedence(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::kBin:
      return e.op == "add" ? 1 : 2;
    case Expr::Kind::kNeg:
    case Expr::Kind::kApp:
      return 3;
    case Expr::Kind::kVar:
      return 4;
  }
  return 4;
}

using Tokens = std::vector<SourceToken>;

void ident(Tokens& out, const std::string& t) {
  out.push_back({t, SourceToken::Kind::kIdentifier});
}
void keyword(Tokens& out, const std::string& t) {
  out.push_back({t, SourceToken::Kind::kKeyword});
}

void render_tokens(const Expr& e, int min_prec, Tokens& out) {
  const bool parens = precedence(e) < min_prec;
  if (parens) keyword(out, "(");
  switch (e.kind) {
    case Expr::Kind::kVar:
      ident(out, e.text);
      break;
    case Expr::Kind::kBin: {
      const int p = precedence(e);
      render_tokens(e.args[0], p, out);
      keyword(out, e.op == "add" ? "+" : "*");
      render_tokens(e.args[1], p + 1, out);
      break;
    }
    case Expr::Kind::kNeg:
      if (e.op == "add") {
        keyword(out, "-");
        render_tokens(e.args[0], 3, out);
      } else {
        render_tokens(e.args[0], 3, out);
        keyword(out, "^-1");
      }
      break;
    case Expr::Kind::kApp:
      ident(out, e.text);
      render_tokens(e.args[0], 4, out);
      break;
  }
  if (parens) keyword(out, ")");
}

std::string quoted(const std::string& s) { return "\"" + s + "\""; }

std::string cref(const std::string& name) {
  return "(CRef (Ser_Qualid (DirPath ()) (Id " + name + ")))";
}

class TreeWriter {
 public:
  TreeWriter(Rng& rng, double loc_probability)
      : rng_(rng), loc_probability_(loc_probability) {}

  std::string location() {
    if (uniform01(rng_) >= loc_probability_) return "";
    ++offset_;
    return " (loc ((line_nb 1) (bp " + std::to_string(offset_) + ")))";
  }

  std::string stree(const Expr& e) {
    switch (e.kind) {
      case Expr::Kind::kVar:
        return cref(e.text);
      case Expr::Kind::kBin:
        return "(CNotation (InConstrEntrySomeLevel " +
               quoted(e.op == "add" ? "_ + _" : "_ * _") + ") " +
               stree(e.args[0]) + " " + stree(e.args[1]) + location() + ")";
      case Expr::Kind::kNeg:
        return "(CNotation (InConstrEntrySomeLevel " +
               quoted(e.op == "add" ? "- _" : "_ ^-1") + ") " +
               stree(e.args[0]) + location() + ")";
      case Expr::Kind::kApp:
        return "(CApp " + cref(e.text) + " " + stree(e.args[0]) + location() +
               ")";
    }
    return "";
  }

 private:
  Rng& rng_;
  double loc_probability_;
  std::size_t offset_ = 0;
};

std::string dirpath(std::initializer_list<const char*> modules) {
  std::string out = "(DirPath (";
  bool first = true;
  for (const char* m : modules) {
    if (!first) out += ' ';
    out += "(Id " + std::string(m) + ")";
    first = false;
  }
  return out + "))";
}

std::string domain_path(const std::string& d) {
  if (d == "n") return dirpath({"ssrnat", "ssreflect", "mathcomp"});
  if (d == "r") return dirpath({"GRing", "ssralg", "mathcomp"});
  return dirpath({"FinGroup", "fingroup", "mathcomp"});
}

std::string carrier(const std::string& d) {
  if (d == "n") return "(Ref " + dirpath({"Datatypes", "Init", "Coq"}) + " (Id nat))";
  if (d == "r") {
    return "(App (Ref " + domain_path(d) + " (Id sort)) (Var (Id R)))";
  }
  return "(App (Ref " + domain_path(d) + " (Id sort)) (Var (Id gT)))";
}

std::string ktree(const Expr& e, const std::string& d, const std::string& doc) {
  switch (e.kind) {
    case Expr::Kind::kVar:
      return "(Var (Id " + e.text + "))";
    case Expr::Kind::kBin:
      return "(App (Ref " + domain_path(d) + " (Id " + e.op + d + ")) " +
             ktree(e.args[0], d, doc) + " " + ktree(e.args[1], d, doc) + ")";
    case Expr::Kind::kNeg:
      return "(App (Ref " + domain_path(d) + " (Id " + negation(e.op) + d +
             ")) " + ktree(e.args[0], d, doc) + ")";
    case Expr::Kind::kApp:
      return "(App (Ref (DirPath ((Id " + doc + ") (Id Synth))) (Id " + e.text +
             ")) " + ktree(e.args[0], d, doc) + ")";
  }
  return "";
}

const std::vector<std::string> kVariables = {"x", "y", "z", "u", "v",
                                             "w", "a", "b", "c"};

std::string fresh_function(Rng& rng, std::set<std::string>& used) {
  static const std::string consonants = "bdfklmpstv";
  static const std::string vowels = "aeiou";
  const Lexicon& lex = Lexicon::default_lexicon();
  for (std::size_t attempt = 0;; ++attempt) {
    const std::size_t syllables = attempt < 200 ? 2 : 3;
    std::string name;
    for (std::size_t s = 0; s < syllables; ++s) {
      name += consonants[uniform_index(rng, consonants.size())];
      name += vowels[uniform_index(rng, vowels.size())];
    }
    if (used.count(name) || lex.components().count(name)) continue;
    if (subtoken_texts(name, lex).size() != 1) continue;
    used.insert(name);
    return name;
  }
}

struct Lemma {
  std::string name;
  std::string domain;
  Expr lhs, rhs;
  std::vector<std::string> binders;
};

std::string word_suffix(Template t) {
  switch (t) {
    case Template::kComm:
      return "_comm";
    case Template::kAssoc:
      return "_assoc";
    case Template::kDistL:
      return "_distl";
    case Template::kDistR:
      return "_distr";
    case Template::kInvol:
      return "_invol";
    case Template::kMorph:
      break;
  }
  return "";
}

Lemma make_lemma(Rng& rng, const GeneratorSpec& spec,
                 const std::vector<std::string>& functions) {
  const std::string d = spec.domains[uniform_index(rng, spec.domains.size())];
  Template t;
  if (!functions.empty() && uniform01(rng) < spec.morphism_fraction) {
    t = Template::kMorph;
  } else {
    t = static_cast<Template>(uniform_index(rng, 5));
  }
  std::string op = uniform_index(rng, 2) == 0 ? "add" : "mul";
  if (t == Template::kDistL || t == Template::kDistR) op = "mul";

  std::vector<std::string> pool = kVariables;
  shuffle_in_place(pool, rng);
  const Expr x = var(pool[0]), y = var(pool[1]), z = var(pool[2]);
  Lemma l;
  l.domain = d;
  const bool word = spec.dialect == GeneratorSpec::Dialect::kWord;
  std::string stem = op + d;
  std::string suffix;
  std::size_t used = 0;
  switch (t) {
    case Template::kComm:
      l.lhs = bin(op, x, y);
      l.rhs = bin(op, y, x);
      suffix = "C";
      used = 2;
      break;
    case Template::kAssoc:
      l.lhs = bin(op, x, bin(op, y, z));
      l.rhs = bin(op, bin(op, x, y), z);
      suffix = "A";
      used = 3;
      break;
    case Template::kDistL:
      l.lhs = bin("mul", bin("add", x, y), z);
      l.rhs = bin("add", bin("mul", x, z), bin("mul", y, z));
      suffix = "Dl";
      used = 3;
      break;
    case Template::kDistR:
      l.lhs = bin("mul", x, bin("add", y, z));
      l.rhs = bin("add", bin("mul", x, y), bin("mul", x, z));
      suffix = "Dr";
      used = 3;
      break;
    case Template::kInvol:
      l.lhs = neg(op, neg(op, x));
      l.rhs = x;
      stem = negation(op) + d;
      suffix = "K";
      used = 1;
      break;
    case Template::kMorph: {
      const std::string& f = functions[uniform_index(rng, functions.size())];
      l.lhs = app(f, bin(op, x, y));
      l.rhs = bin(op, app(f, x), app(f, y));
      l.name = word ? stem + "_" + f : f + "_" + stem;
      used = 2;
      break;
    }
  }
  if (t != Template::kMorph) l.name = word ? stem + word_suffix(t) : stem + suffix;
  const std::size_t extra =
      spec.max_extra_binders == 0 ? 0 : uniform_index(rng, spec.max_extra_binders + 1);
  for (std::size_t i = 0; i < used + extra && i < pool.size(); ++i) {
    l.binders.push_back(pool[i]);
  }
  return l;
}

LemmaRecord render(const Lemma& l, const std::string& doc, const std::string& d,
                   Rng& rng, const GeneratorSpec& spec) {
  LemmaRecord r;
  r.doc_id = doc;
  r.name = l.name;
  r.qualified_name = "Synth." + doc + "." + l.name;

  ident(r.stmt_tokens, "Lemma");
  ident(r.stmt_tokens, l.name);
  for (const auto& b : l.binders) ident(r.stmt_tokens, b);
  keyword(r.stmt_tokens, ":");
  render_tokens(l.lhs, 0, r.stmt_tokens);
  keyword(r.stmt_tokens, "=");
  render_tokens(l.rhs, 0, r.stmt_tokens);
  keyword(r.stmt_tokens, ".");

  TreeWriter writer(rng, spec.location_probability);
  std::string binders;
  for (const auto& b : l.binders) {
    binders += "(CLocalAssum (Name (Id " + b + ")) (CHole () IntroAnonymous ()))";
  }
  std::string stmt = "(CNotation (InConstrEntrySomeLevel " + quoted("_ = _") +
                     ") " + writer.stree(l.lhs) + " " + writer.stree(l.rhs) +
                     writer.location() + ")";
  r.stree = parse_sexp("(VernacExpr () (VernacStartTheoremProof Lemma (Id " +
                       l.name + ") ((" + binders + ") " + stmt + ")))");

  std::string body = "(App (Ref " + dirpath({"Logic", "Init", "Coq"}) +
                     " (Id eq)) " + carrier(d) + " " + ktree(l.lhs, d, doc) +
                     " " + ktree(l.rhs, d, doc) + ")";
  for (auto it = l.binders.rbegin(); it != l.binders.rend(); ++it) {
    body = "(Prod (Name (Id " + *it + ")) " + carrier(d) + " " + body + ")";
  }
  if (d == "r") {
    body = "(Prod (Name (Id R)) (Ref " + domain_path(d) + " (Id ringType)) " +
           body + ")";
  } else if (d == "g") {
    body = "(Prod (Name (Id gT)) (Ref " + domain_path(d) +
           " (Id finGroupType)) " + body + ")";
  }
  r.ktree = parse_sexp(body);
  return r;
}

}  // namespace

void GeneratorSpec::validate() const {
  if (domains.empty()) throw std::invalid_argument("generator needs a domain");
  for (const auto& d : domains) {
    if (d != "n" && d != "r" && d != "g") {
      throw std::invalid_argument("unknown domain '" + d + "'");
    }
  }
  if (!(morphism_fraction >= 0 && morphism_fraction <= 1)) {
    throw std::invalid_argument("morphism_fraction must lie in [0, 1]");
  }
  if (!(location_probability >= 0 && location_probability <= 1)) {
    throw std::invalid_argument("location_probability must lie in [0, 1]");
  }
  if (max_extra_binders > kVariables.size() - 3) {
    throw std::invalid_argument("too many extra binders");
  }
}

json GeneratorSpec::to_json() const {
  return {{"n_docs", n_docs},
          {"lemmas_per_doc", lemmas_per_doc},
          {"seed", seed},
          {"dialect", dialect == Dialect::kSuffix ? "suffix" : "word"},
          {"domains", domains},
          {"morphism_fraction", morphism_fraction},
          {"functions_per_doc", functions_per_doc},
          {"location_probability", location_probability},
          {"max_extra_binders", max_extra_binders},
          {"doc_prefix", doc_prefix}};
}

GeneratorSpec GeneratorSpec::from_json(const json& j) {
  GeneratorSpec s;
  s.n_docs = j.value("n_docs", s.n_docs);
  s.lemmas_per_doc = j.value("lemmas_per_doc", s.lemmas_per_doc);
  s.seed = j.value("seed", s.seed);
  const std::string dialect = j.value("dialect", std::string("suffix"));
  if (dialect == "suffix") {
    s.dialect = Dialect::kSuffix;
  } else if (dialect == "word") {
    s.dialect = Dialect::kWord;
  } else {
    throw std::invalid_argument("unknown dialect '" + dialect + "'");
  }
  s.domains = j.value("domains", s.domains);
  s.morphism_fraction = j.value("morphism_fraction", s.morphism_fraction);
  s.functions_per_doc = j.value("functions_per_doc", s.functions_per_doc);
  s.location_probability = j.value("location_probability", s.location_probability);
  s.max_extra_binders = j.value("max_extra_binders", s.max_extra_binders);
  s.doc_prefix = j.value("doc_prefix", s.doc_prefix);
  s.validate();
  return s;
}

std::vector<LemmaRecord> generate(const GeneratorSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  std::set<std::string> used_functions;
  std::vector<LemmaRecord> out;
  const std::size_t width =
      std::max<std::size_t>(3, std::to_string(spec.n_docs).size());
  for (std::size_t doc_index = 0; doc_index < spec.n_docs; ++doc_index) {
    std::string number = std::to_string(doc_index);
    std::string doc =
        spec.doc_prefix + std::string(width - number.size(), '0') + number;
    std::vector<std::string> functions;
    for (std::size_t f = 0; f < spec.functions_per_doc; ++f) {
      functions.push_back(fresh_function(rng, used_functions));
    }
    std::set<std::string> names;
    for (std::size_t i = 0; i < spec.lemmas_per_doc; ++i) {
      Lemma lemma = make_lemma(rng, spec, functions);
      for (int retry = 0; retry < 50 && names.count(lemma.name); ++retry) {
        lemma = make_lemma(rng, spec, functions);
      }
      names.insert(lemma.name);
      out.push_back(render(lemma, doc, lemma.domain, rng, spec));
    }
  }
  return out;
}

}  // namespace lemma_namer
