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

// Tree simplification, pre-order flattening and shape statistics for
// s-trees and k-trees.

#ifndef LEMMA_NAMER_TREE_H_
#define LEMMA_NAMER_TREE_H_

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "lemma_namer/sexp.h"
#include "lemma_namer/subtok.h"

namespace lemma_namer {

struct TrimConfig {
  enum class Variant { kStandard, kKeepCategory, kDepthLimit, kRandom };

  Variant variant = Variant::kStandard;
  std::size_t max_depth = 10;          // kDepthLimit
  std::size_t target_node_count = 1;   // kRandom
  std::uint64_t seed = 0;              // kRandom
  std::set<std::string> location_heads = {"loc"};
  std::set<std::string> qualified_name_heads = {"Ref", "Ser_Qualid"};

  static TrimConfig standard() { return {}; }
  static TrimConfig keep_category();
  static TrimConfig depth_limit(std::size_t max_depth);
  static TrimConfig random(std::size_t target_node_count, std::uint64_t seed);

  // Throws std::invalid_argument when a variant parameter is out of range.
  void validate() const;
};

Sexp trim(const Sexp& tree, const TrimConfig& config);

// Pre-order; each list contributes "(" children... ")".
std::vector<std::string> flatten(const Sexp& tree);

// Flattened tree with identifier atoms sub-tokenized; parentheses and other
// atoms pass through.
std::vector<std::string> flatten_subtokenized(const Sexp& tree,
                                              const Lexicon& lexicon);

struct TreeStats {
  std::size_t depth = 0;
  std::size_t node_count = 0;
  std::size_t flat_subtoken_count = 0;
};

TreeStats tree_stats(const Sexp& tree,
                     const Lexicon& lexicon = Lexicon::default_lexicon());

}  // namespace lemma_namer

#endif  // LEMMA_NAMER_TREE_H_
