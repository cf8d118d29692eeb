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

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "lemma_namer/corpus.h"
#include "lemma_namer/subtok.h"
#include "lemma_namer/synthetic.h"
#include "lemma_namer/tree.h"

namespace lemma_namer {
namespace {

std::string dump_all(const std::vector<LemmaRecord>& records) {
  std::string out;
  for (const auto& r : records) out += record_to_json(r).dump() + "\n";
  return out;
}

GeneratorSpec small_spec(std::uint64_t seed) {
  GeneratorSpec s;
  s.n_docs = 6;
  s.lemmas_per_doc = 8;
  s.seed = seed;
  return s;
}

std::set<std::string> statement_subtokens(const LemmaRecord& r) {
  std::vector<SourceToken> stmt = extract_statement_tokens(r.stmt_tokens, r.name);
  auto sub = subtokenize_statement(stmt, Lexicon::default_lexicon());
  return {sub.begin(), sub.end()};
}

TEST_CASE("one doc with one lemma gives one valid record") {
  GeneratorSpec s;
  s.n_docs = 1;
  s.lemmas_per_doc = 1;
  auto records = generate(s);
  REQUIRE(records.size() == 1);
  auto back = parse_dataset(dump_all(records));
  REQUIRE(back.size() == 1);
  CHECK(back[0].name == records[0].name);
  CHECK(back[0].ktree == records[0].ktree);
}

TEST_CASE("generation is deterministic per seed") {
  CHECK(dump_all(generate(small_spec(5))) == dump_all(generate(small_spec(5))));
  CHECK(dump_all(generate(small_spec(5))) != dump_all(generate(small_spec(6))));
}

TEST_CASE("records are schema valid and named consistently") {
  for (auto dialect : {GeneratorSpec::Dialect::kSuffix, GeneratorSpec::Dialect::kWord}) {
    GeneratorSpec s = small_spec(11);
    s.dialect = dialect;
    auto records = generate(s);
    CHECK(records.size() == s.n_docs * s.lemmas_per_doc);
    std::set<std::string> docs;
    for (std::size_t i = 0; i < records.size(); ++i) {
      const auto& r = records[i];
      docs.insert(r.doc_id);
      auto back = parse_dataset_line(record_to_json(r).dump(), i + 1);
      CHECK(record_to_json(back) == record_to_json(r));
      CHECK(is_identifier(r.name));
      const std::string suffix = "." + r.name;
      REQUIRE(r.qualified_name.size() > suffix.size());
      CHECK(r.qualified_name.compare(r.qualified_name.size() - suffix.size(),
                                     suffix.size(), suffix) == 0);
      CHECK(r.qualified_name.find(r.doc_id) != std::string::npos);
      CHECK_FALSE(extract_statement_tokens(r.stmt_tokens, r.name).empty());
    }
    CHECK(docs.size() == s.n_docs);
  }
}

TEST_CASE("doc ids are zero padded") {
  auto records = generate(small_spec(1));
  CHECK(records.front().doc_id == "doc000");
  CHECK(records.back().doc_id == "doc005");
}

TEST_CASE("domain letters appear only in the kernel tree") {
  const std::set<std::string> domains = {"n", "r", "g"};
  auto records = generate(small_spec(2));
  std::set<std::string> seen;
  for (const auto& r : records) {
    auto stmt = statement_subtokens(r);
    auto name = subtoken_texts(r.name, Lexicon::default_lexicon());
    std::string domain;
    for (const auto& t : name) {
      if (domains.count(t)) domain = t;
    }
    REQUIRE_MESSAGE(!domain.empty(), r.name);
    seen.insert(domain);
    CHECK_MESSAGE(stmt.count(domain) == 0, r.name);
    // Every operator of the domain is qualified in the kernel tree.
    auto flat = flatten(r.ktree);
    bool has_operator = false;
    for (const auto& atom : flat) {
      if (atom.size() > 1 && atom.back() == domain[0] &&
          (atom.rfind("add", 0) == 0 || atom.rfind("mul", 0) == 0 ||
           atom.rfind("opp", 0) == 0 || atom.rfind("inv", 0) == 0)) {
        has_operator = true;
      }
    }
    CHECK_MESSAGE(has_operator, r.name);
  }
  CHECK(seen == domains);
}

TEST_CASE("names never repeat a sub-token other than the underscore") {
  for (auto dialect : {GeneratorSpec::Dialect::kSuffix, GeneratorSpec::Dialect::kWord}) {
    GeneratorSpec s = small_spec(3);
    s.dialect = dialect;
    for (const auto& r : generate(s)) {
      std::set<std::string> seen;
      for (const auto& t : subtoken_texts(r.name, Lexicon::default_lexicon())) {
        if (t == "_") continue;
        CHECK_MESSAGE(seen.insert(t).second, r.name);
      }
    }
  }
}

TEST_CASE("dialects differ in suffix style") {
  GeneratorSpec s = small_spec(4);
  s.morphism_fraction = 0;
  bool word_has_underscore = true;
  for (const auto& r : generate(s)) CHECK(r.name.find('_') == std::string::npos);
  s.dialect = GeneratorSpec::Dialect::kWord;
  for (const auto& r : generate(s)) {
    word_has_underscore &= r.name.find('_') != std::string::npos;
  }
  CHECK(word_has_underscore);
}

TEST_CASE("morphism lemmas use document-local functions") {
  GeneratorSpec s = small_spec(8);
  s.morphism_fraction = 1;
  auto records = generate(s);
  std::set<std::string> functions;
  for (const auto& r : records) {
    auto parts = subtoken_texts(r.name, Lexicon::default_lexicon());
    REQUIRE(parts.size() >= 3);
    functions.insert(parts.front() + "@" + r.doc_id);
    // The function name is a statement token.
    CHECK(statement_subtokens(r).count(parts.front()) == 1);
  }
  // Functions are fresh per document.
  std::set<std::string> bare;
  for (const auto& f : functions) bare.insert(f.substr(0, f.find('@')));
  CHECK(bare.size() == functions.size());
}

TEST_CASE("trees imitate the rewritten shapes") {
  auto records = generate(small_spec(9));
  std::size_t with_loc = 0;
  for (const auto& r : records) {
    Sexp trimmed = trim(r.ktree, TrimConfig::standard());
    auto before = tree_stats(r.ktree);
    auto after = tree_stats(trimmed);
    CHECK(after.node_count < before.node_count);
    auto flat = flatten(r.stree);
    for (const auto& a : flat) with_loc += a == "loc";
  }
  CHECK(with_loc > 0);
}

TEST_CASE("spec validation") {
  GeneratorSpec s;
  s.domains = {};
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s.domains = {"q"};
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = GeneratorSpec();
  s.morphism_fraction = 1.5;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = GeneratorSpec();
  s.location_probability = -0.1;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = GeneratorSpec();
  s.max_extra_binders = 100;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  CHECK_THROWS_AS(generate(s), std::invalid_argument);
}

TEST_CASE("spec json round trip") {
  GeneratorSpec s = small_spec(17);
  s.dialect = GeneratorSpec::Dialect::kWord;
  s.domains = {"r", "g"};
  s.doc_prefix = "proj";
  GeneratorSpec back = GeneratorSpec::from_json(s.to_json());
  CHECK(back.to_json() == s.to_json());
  CHECK(dump_all(generate(back)) == dump_all(generate(s)));
  nlohmann::json bad = s.to_json();
  bad["dialect"] = "klingon";
  CHECK_THROWS_AS(GeneratorSpec::from_json(bad), std::invalid_argument);
}

}  // namespace
}  // namespace lemma_namer
