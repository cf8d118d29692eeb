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

#include "lemma_namer/sexp.h"

#include <algorithm>
#include <optional>
#include <utility>

namespace lemma_namer {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

bool is_delimiter(char c) {
  return is_space(c) || c == '(' || c == ')' || c == '"';
}

std::string describe(SexpError::Kind kind) {
  switch (kind) {
    case SexpError::Kind::kEmptyInput:
      return "empty input";
    case SexpError::Kind::kUnbalancedParen:
      return "unbalanced parenthesis";
    case SexpError::Kind::kUnexpectedTrailingInput:
      return "unexpected trailing input";
    case SexpError::Kind::kUnterminatedString:
      return "unterminated string";
    case SexpError::Kind::kDepthLimitExceeded:
      return "nesting depth limit exceeded";
  }
  return "s-expression error";
}

[[noreturn]] void fail(SexpError::Kind kind, std::size_t pos) {
  throw SexpError(kind, pos,
                  describe(kind) + " at offset " + std::to_string(pos));
}

void append_atom(std::string& out, const std::string& text) {
  if (!atom_needs_quotes(text)) {
    out += text;
    return;
  }
  out += '"';
  for (char c : text) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
}

}  // namespace

SexpError::SexpError(Kind kind, std::size_t position, const std::string& what)
    : std::runtime_error(what), kind_(kind), position_(position) {}

Sexp::~Sexp() {
  // Unrolls deep trees without recursing through vector destructors.
  if (children_.empty()) return;
  List pending = std::move(children_);
  while (!pending.empty()) {
    Sexp node = std::move(pending.back());
    pending.pop_back();
    for (auto& child : node.children_) pending.push_back(std::move(child));
    node.children_.clear();
  }
}

Sexp Sexp::atom(std::string text) {
  Sexp s;
  s.is_atom_ = true;
  s.text_ = std::move(text);
  return s;
}

Sexp Sexp::list(List children) {
  Sexp s;
  s.children_ = std::move(children);
  return s;
}

const std::string& Sexp::text() const {
  if (!is_atom_) throw std::logic_error("Sexp::text called on a list");
  return text_;
}

const Sexp::List& Sexp::children() const {
  if (is_atom_) throw std::logic_error("Sexp::children called on an atom");
  return children_;
}

Sexp::List& Sexp::children() {
  if (is_atom_) throw std::logic_error("Sexp::children called on an atom");
  return children_;
}

std::string_view Sexp::head() const {
  if (is_atom_ || children_.empty() || !children_.front().is_atom_) return {};
  return children_.front().text_;
}

bool operator==(const Sexp& a, const Sexp& b) {
  std::vector<std::pair<const Sexp*, const Sexp*>> todo{{&a, &b}};
  while (!todo.empty()) {
    auto [x, y] = todo.back();
    todo.pop_back();
    if (x->is_atom_ != y->is_atom_) return false;
    if (x->is_atom_) {
      if (x->text_ != y->text_) return false;
      continue;
    }
    if (x->children_.size() != y->children_.size()) return false;
    for (std::size_t i = 0; i < x->children_.size(); ++i) {
      todo.emplace_back(&x->children_[i], &y->children_[i]);
    }
  }
  return true;
}

bool atom_needs_quotes(std::string_view text) {
  if (text.empty()) return true;
  return std::any_of(text.begin(), text.end(), is_delimiter);
}

Sexp parse_sexp(std::string_view text) {
  std::vector<Sexp::List> open;
  std::vector<std::size_t> open_at;
  std::optional<Sexp> result;
  std::size_t i = 0;
  const std::size_t n = text.size();

  auto emit = [&](Sexp value, std::size_t pos) {
    if (open.empty()) {
      if (result) fail(SexpError::Kind::kUnexpectedTrailingInput, pos);
      result = std::move(value);
    } else {
      open.back().push_back(std::move(value));
    }
  };

  while (i < n) {
    char c = text[i];
    if (is_space(c)) {
      ++i;
      continue;
    }
    if (result && open.empty()) {
      fail(SexpError::Kind::kUnexpectedTrailingInput, i);
    }
    if (c == '(') {
      if (open.size() + 1 > kMaxSexpDepth) {
        fail(SexpError::Kind::kDepthLimitExceeded, i);
      }
      open.emplace_back();
      open_at.push_back(i);
      ++i;
    } else if (c == ')') {
      if (open.empty()) fail(SexpError::Kind::kUnbalancedParen, i);
      Sexp node = Sexp::list(std::move(open.back()));
      open.pop_back();
      open_at.pop_back();
      emit(std::move(node), i);
      ++i;
    } else if (c == '"') {
      std::size_t start = i++;
      std::string value;
      bool closed = false;
      while (i < n) {
        char d = text[i++];
        if (d == '"') {
          closed = true;
          break;
        }
        if (d == '\\' && i < n && (text[i] == '"' || text[i] == '\\')) {
          d = text[i++];
        }
        value += d;
      }
      if (!closed) fail(SexpError::Kind::kUnterminatedString, start);
      emit(Sexp::atom(std::move(value)), start);
    } else {
      std::size_t start = i;
      while (i < n && !is_delimiter(text[i])) ++i;
      emit(Sexp::atom(std::string(text.substr(start, i - start))), start);
    }
  }
  if (!open.empty()) fail(SexpError::Kind::kUnbalancedParen, open_at.back());
  if (!result) fail(SexpError::Kind::kEmptyInput, 0);
  return std::move(*result);
}

std::string print_sexp(const Sexp& tree) {
  std::string out;
  // Each frame is a list being printed and the index of the next child.
  std::vector<std::pair<const Sexp*, std::size_t>> stack;
  if (tree.is_atom()) {
    append_atom(out, tree.text());
    return out;
  }
  out += '(';
  stack.emplace_back(&tree, 0);
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    const auto& kids = node->children();
    if (next == kids.size()) {
      out += ')';
      stack.pop_back();
      continue;
    }
    if (next > 0) out += ' ';
    const Sexp& child = kids[next++];
    if (child.is_atom()) {
      append_atom(out, child.text());
    } else {
      out += '(';
      stack.emplace_back(&child, 0);
    }
  }
  return out;
}

std::size_t sexp_depth(const Sexp& tree) {
  std::size_t best = 0;
  std::vector<std::pair<const Sexp*, std::size_t>> todo{{&tree, 1}};
  while (!todo.empty()) {
    auto [node, d] = todo.back();
    todo.pop_back();
    best = std::max(best, d);
    if (node->is_list()) {
      for (const auto& c : node->children()) todo.emplace_back(&c, d + 1);
    }
  }
  return best;
}

std::size_t sexp_node_count(const Sexp& tree) {
  std::size_t count = 0;
  std::vector<const Sexp*> todo{&tree};
  while (!todo.empty()) {
    const Sexp* node = todo.back();
    todo.pop_back();
    ++count;
    if (node->is_list()) {
      for (const auto& c : node->children()) todo.push_back(&c);
    }
  }
  return count;
}

std::vector<SourceToken> parse_sentence_tokens(const Sexp& tree) {
  if (tree.head() != "Sentence" || tree.children().size() != 2 ||
      !tree.children()[1].is_list()) {
    throw std::invalid_argument("expected (Sentence (tokens...))");
  }
  std::vector<SourceToken> tokens;
  const auto& items = tree.children()[1].children();
  tokens.reserve(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    const Sexp& item = items[i];
    bool ok = item.is_list() && item.children().size() == 2 &&
              item.children()[1].is_atom() &&
              (item.head() == "IDENT" || item.head() == "KEYWORD");
    if (!ok) {
      throw MalformedTokenError(
          i, "malformed token at index " + std::to_string(i) + ": " +
                 print_sexp(item));
    }
    tokens.push_back({item.children()[1].text(),
                      item.head() == "IDENT" ? SourceToken::Kind::kIdentifier
                                             : SourceToken::Kind::kKeyword});
  }
  return tokens;
}

}  // namespace lemma_namer
