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

// Convention-aware splitting of Coq identifiers into sub-tokens.
//
// Names mix snake_case, CamelCase, short lowercase component prefixes and
// capital property suffixes, e.g. `extprod_mulgA` -> extprod _ mul g A.

#ifndef LEMMA_NAMER_SUBTOK_H_
#define LEMMA_NAMER_SUBTOK_H_

#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lemma_namer/sexp.h"

namespace lemma_namer {

struct SubToken {
  enum class Kind { kWord, kUnderscore, kSuffix };
  std::string text;
  Kind kind = Kind::kWord;

  friend bool operator==(const SubToken&, const SubToken&) = default;
};

class Lexicon {
 public:
  Lexicon() = default;
  Lexicon(std::set<std::string> components, std::set<std::string> suffixes,
          std::set<std::string> single_letter_infixes);

  // The lexicon shipped with the library.
  static const Lexicon& default_lexicon();

  // Sectioned text format: `[components]`, `[suffixes]`,
  // `[single_letter_infixes]`, one entry per line, `#` comments.
  static Lexicon parse(std::string_view text);
  static Lexicon load(const std::string& path);

  const std::set<std::string>& components() const { return components_; }
  const std::set<std::string>& suffixes() const { return suffixes_; }
  const std::set<std::string>& single_letter_infixes() const {
    return infixes_;
  }

 private:
  std::set<std::string> components_;
  std::set<std::string> suffixes_;
  std::set<std::string> infixes_;
  std::size_t longest_component_ = 0;

  friend std::vector<SubToken> subtokenize_name(std::string_view,
                                                const Lexicon&);
};

class SubtokError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Throws SubtokError for an empty name.
std::vector<SubToken> subtokenize_name(std::string_view name,
                                       const Lexicon& lexicon);

std::vector<std::string> subtoken_texts(std::string_view name,
                                        const Lexicon& lexicon);

// Throws SubtokError for an empty sequence.
std::string detokenize(std::span<const SubToken> tokens);
std::string detokenize(std::span<const std::string> tokens);

// Letters, digits, underscores and primes, not starting with a digit.
bool is_identifier(std::string_view text);

// Identifiers are split; keywords and operators pass through verbatim.
std::vector<std::string> subtokenize_statement(
    std::span<const SourceToken> tokens, const Lexicon& lexicon);

}  // namespace lemma_namer

#endif  // LEMMA_NAMER_SUBTOK_H_
