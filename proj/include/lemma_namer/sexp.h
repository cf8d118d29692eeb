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

// S-expression values as produced by the Coq serializer: tokens, parse trees
// (s-trees) and elaborated kernel trees (k-trees) all share this encoding.

#ifndef LEMMA_NAMER_SEXP_H_
#define LEMMA_NAMER_SEXP_H_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lemma_namer {

// Nesting limit enforced by the parser.
inline constexpr std::size_t kMaxSexpDepth = 100000;

class Sexp {
 public:
  using List = std::vector<Sexp>;

  Sexp() : is_atom_(false) {}
  ~Sexp();
  Sexp(const Sexp&) = default;
  Sexp(Sexp&&) noexcept = default;
  Sexp& operator=(const Sexp&) = default;
  Sexp& operator=(Sexp&&) noexcept = default;

  static Sexp atom(std::string text);
  static Sexp list(List children = {});

  bool is_atom() const { return is_atom_; }
  bool is_list() const { return !is_atom_; }

  // Atom text. Throws std::logic_error on lists.
  const std::string& text() const;
  // List children. Throws std::logic_error on atoms.
  const List& children() const;
  List& children();

  // Text of the first child when it is an atom, empty otherwise.
  std::string_view head() const;

  friend bool operator==(const Sexp& a, const Sexp& b);

 private:
  bool is_atom_;
  std::string text_;
  List children_;
};

class SexpError : public std::runtime_error {
 public:
  enum class Kind {
    kEmptyInput,
    kUnbalancedParen,
    kUnexpectedTrailingInput,
    kUnterminatedString,
    kDepthLimitExceeded,
  };
  SexpError(Kind kind, std::size_t position, const std::string& what);
  Kind kind() const { return kind_; }
  std::size_t position() const { return position_; }

 private:
  Kind kind_;
  std::size_t position_;
};

Sexp parse_sexp(std::string_view text);

// Canonical form: one space between siblings, none next to parentheses.
std::string print_sexp(const Sexp& tree);

// True when the atom must be printed in double quotes.
bool atom_needs_quotes(std::string_view text);

std::size_t sexp_depth(const Sexp& tree);
std::size_t sexp_node_count(const Sexp& tree);

struct SourceToken {
  enum class Kind { kIdentifier, kKeyword };
  std::string text;
  Kind kind = Kind::kIdentifier;

  friend bool operator==(const SourceToken&, const SourceToken&) = default;
};

class MalformedTokenError : public std::runtime_error {
 public:
  MalformedTokenError(std::size_t index, const std::string& what)
      : std::runtime_error(what), index_(index) {}
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

// Decodes `(Sentence ((IDENT x) (KEYWORD y) ...))`.
std::vector<SourceToken> parse_sentence_tokens(const Sexp& tree);

}  // namespace lemma_namer

#endif  // LEMMA_NAMER_SEXP_H_
