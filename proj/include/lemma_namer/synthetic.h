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

// Deterministic synthetic lemma corpora. Statements use notation shared by
// every algebraic domain; the domain only shows in the kernel tree through
// its qualified operators, so names depend on information absent from the
// statement tokens.

#ifndef LEMMA_NAMER_SYNTHETIC_H_
#define LEMMA_NAMER_SYNTHETIC_H_

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "lemma_namer/corpus.h"

namespace lemma_namer {

struct GeneratorSpec {
  // Naming conventions: MathComp-like suffixes (addnC) or trailing words
  // (addn_comm).
  enum class Dialect { kSuffix, kWord };

  std::size_t n_docs = 10;
  std::size_t lemmas_per_doc = 5;
  std::uint64_t seed = 0;
  Dialect dialect = Dialect::kSuffix;
  // Domain letters drawn from {n, r, g}.
  std::vector<std::string> domains = {"n", "r", "g"};
  // Share of morphism lemmas, whose names embed a document-local function.
  double morphism_fraction = 0.3;
  // Document-local function names per document.
  std::size_t functions_per_doc = 2;
  // Probability of attaching a location node to an s-tree notation node.
  double location_probability = 0.5;
  // Extra binders (unused variables) drawn per lemma, up to this many.
  std::size_t max_extra_binders = 1;
  std::string doc_prefix = "doc";

  void validate() const;
  nlohmann::json to_json() const;
  static GeneratorSpec from_json(const nlohmann::json& j);
};

std::vector<LemmaRecord> generate(const GeneratorSpec& spec);

}  // namespace lemma_namer

#endif  // LEMMA_NAMER_SYNTHETIC_H_
