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

#include "lemma_namer/subtok.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace lemma_namer {

namespace internal {
extern const std::string_view kDefaultLexiconText;
}  // namespace internal

namespace {

bool is_lower(char c) { return c >= 'a' && c <= 'z'; }
bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

std::string_view trim_view(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

// Splits a segment (no underscores) before every uppercase letter that
// follows a lowercase letter, digit or prime.
std::vector<std::string> camel_pieces(std::string_view segment) {
  std::vector<std::string> pieces;
  std::size_t start = 0;
  for (std::size_t i = 1; i < segment.size(); ++i) {
    char prev = segment[i - 1];
    if (is_upper(segment[i]) &&
        (is_lower(prev) || is_digit(prev) || prev == '\'')) {
      pieces.emplace_back(segment.substr(start, i - start));
      start = i;
    }
  }
  pieces.emplace_back(segment.substr(start));
  return pieces;
}

}  // namespace

Lexicon::Lexicon(std::set<std::string> components,
                 std::set<std::string> suffixes,
                 std::set<std::string> single_letter_infixes)
    : components_(std::move(components)),
      suffixes_(std::move(suffixes)),
      infixes_(std::move(single_letter_infixes)) {
  for (const auto* set : {&components_, &suffixes_, &infixes_}) {
    for (const auto& entry : *set) {
      if (entry.empty() || entry.find('_') != std::string::npos) {
        throw std::invalid_argument("invalid lexicon entry '" + entry + "'");
      }
    }
  }
  for (const auto& entry : infixes_) {
    if (entry.size() != 1) {
      throw std::invalid_argument("single-letter infix '" + entry +
                                  "' is not a single letter");
    }
  }
  for (const auto& c : components_) {
    longest_component_ = std::max(longest_component_, c.size());
  }
}

const Lexicon& Lexicon::default_lexicon() {
  static const Lexicon lexicon = parse(internal::kDefaultLexiconText);
  return lexicon;
}

Lexicon Lexicon::parse(std::string_view text) {
  std::set<std::string> components, suffixes, infixes;
  std::set<std::string>* section = nullptr;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    std::size_t eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{}
                                         : text.substr(eol + 1);
    if (auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim_view(line);
    if (line.empty()) continue;
    if (line == "[components]") {
      section = &components;
    } else if (line == "[suffixes]") {
      section = &suffixes;
    } else if (line == "[single_letter_infixes]") {
      section = &infixes;
    } else if (line.front() == '[') {
      throw std::invalid_argument("unknown lexicon section " +
                                  std::string(line) + " on line " +
                                  std::to_string(line_no));
    } else if (section == nullptr) {
      throw std::invalid_argument("lexicon entry outside a section on line " +
                                  std::to_string(line_no));
    } else {
      section->emplace(line);
    }
  }
  return Lexicon(std::move(components), std::move(suffixes),
                 std::move(infixes));
}

Lexicon Lexicon::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open lexicon file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

bool is_identifier(std::string_view text) {
  if (text.empty() || is_digit(text.front()) || text.front() == '\'') {
    return false;
  }
  return std::all_of(text.begin(), text.end(), [](char c) {
    return is_lower(c) || is_upper(c) || is_digit(c) || c == '_' ||
           c == '\'';
  });
}

std::vector<SubToken> subtokenize_name(std::string_view name,
                                       const Lexicon& lexicon) {
  if (name.empty()) throw SubtokError("cannot sub-tokenize an empty name");

  // Greedy longest match of a lowercase run; empty on failure. A cover made
  // only of one-letter infixes is rejected.
  auto segment_run = [&](std::string_view run) -> std::vector<std::string> {
    std::vector<std::string> parts;
    bool has_component = false;
    std::size_t pos = 0;
    while (pos < run.size()) {
      std::size_t limit = std::min(lexicon.longest_component_, run.size() - pos);
      std::size_t matched = 0;
      for (std::size_t len = limit; len >= 2; --len) {
        if (lexicon.components_.count(std::string(run.substr(pos, len)))) {
          matched = len;
          has_component = true;
          break;
        }
      }
      if (matched == 0) {
        std::string one(run.substr(pos, 1));
        if (lexicon.infixes_.count(one) || lexicon.components_.count(one)) {
          matched = 1;
        } else {
          return {};
        }
      }
      parts.emplace_back(run.substr(pos, matched));
      pos += matched;
    }
    if (!has_component) return {};
    return parts;
  };

  std::vector<SubToken> out;
  auto emit_segment = [&](std::string_view segment) {
    std::vector<std::string> pieces = camel_pieces(segment);
    // Trailing capital markers.
    std::vector<SubToken> tail;
    while (pieces.size() > 1) {
      const std::string& last = pieces.back();
      if (lexicon.suffixes_.count(last)) {
        tail.insert(tail.begin(), {last, SubToken::Kind::kSuffix});
      } else if (std::all_of(last.begin(), last.end(), is_upper) &&
                 std::all_of(last.begin(), last.end(), [&](char c) {
                   return lexicon.suffixes_.count(std::string(1, c)) > 0;
                 })) {
        std::vector<SubToken> split;
        for (char c : last) {
          split.push_back({std::string(1, c), SubToken::Kind::kSuffix});
        }
        tail.insert(tail.begin(), split.begin(), split.end());
      } else {
        break;
      }
      pieces.pop_back();
    }
    for (const std::string& piece : pieces) {
      if (!is_lower(piece.front())) {
        out.push_back({piece, SubToken::Kind::kWord});
        continue;
      }
      std::size_t run_end = 0;
      while (run_end < piece.size() && is_lower(piece[run_end])) ++run_end;
      std::string_view rest = std::string_view(piece).substr(run_end);
      bool rest_binds = std::all_of(rest.begin(), rest.end(), [](char c) {
        return is_digit(c) || c == '\'';
      });
      std::vector<std::string> parts;
      if (rest_binds) parts = segment_run(std::string_view(piece).substr(0, run_end));
      if (parts.empty()) {
        out.push_back({piece, SubToken::Kind::kWord});
        continue;
      }
      parts.back() += rest;
      for (auto& p : parts) out.push_back({std::move(p), SubToken::Kind::kWord});
    }
    out.insert(out.end(), tail.begin(), tail.end());
  };

  std::size_t start = 0;
  for (std::size_t i = 0; i <= name.size(); ++i) {
    if (i == name.size() || name[i] == '_') {
      if (i > start) emit_segment(name.substr(start, i - start));
      if (i < name.size()) out.push_back({"_", SubToken::Kind::kUnderscore});
      start = i + 1;
    }
  }
  return out;
}

std::vector<std::string> subtoken_texts(std::string_view name,
                                        const Lexicon& lexicon) {
  std::vector<std::string> texts;
  for (auto& t : subtokenize_name(name, lexicon)) {
    texts.push_back(std::move(t.text));
  }
  return texts;
}

std::string detokenize(std::span<const SubToken> tokens) {
  if (tokens.empty()) throw SubtokError("cannot detokenize an empty sequence");
  std::string out;
  for (const auto& t : tokens) out += t.text;
  return out;
}

std::string detokenize(std::span<const std::string> tokens) {
  if (tokens.empty()) throw SubtokError("cannot detokenize an empty sequence");
  std::string out;
  for (const auto& t : tokens) out += t;
  return out;
}

std::vector<std::string> subtokenize_statement(
    std::span<const SourceToken> tokens, const Lexicon& lexicon) {
  std::vector<std::string> out;
  for (const auto& token : tokens) {
    if (token.kind == SourceToken::Kind::kKeyword || token.text.empty()) {
      out.push_back(token.text);
      continue;
    }
    for (auto& t : subtoken_texts(token.text, lexicon)) {
      out.push_back(std::move(t));
    }
  }
  return out;
}

}  // namespace lemma_namer
