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

#include "lemma_namer/tree.h"

#include <stdexcept>
#include <utility>

#include "lemma_namer/random.h"

namespace lemma_namer {

namespace {

// Matches (Head (DirPath ...) (Id X)) and returns X, or nullptr.
const Sexp* qualified_name_leaf(const Sexp& node, const TrimConfig& config) {
  if (!node.is_list() || node.children().size() != 3) return nullptr;
  const auto& kids = node.children();
  if (!config.qualified_name_heads.count(std::string(node.head()))) {
    return nullptr;
  }
  if (kids[1].head() != "DirPath") return nullptr;
  const Sexp& id = kids[2];
  if (id.head() != "Id" || id.children().size() != 2 ||
      !id.children()[1].is_atom()) {
    return nullptr;
  }
  return &id.children()[1];
}

// Rewrites `node` in place to a local fixpoint; returns whether it changed.
bool rewrite_here(Sexp& node, const TrimConfig& config) {
  bool changed = false;
  while (node.is_list()) {
    if (const Sexp* leaf = qualified_name_leaf(node, config)) {
      Sexp name = *leaf;
      if (config.variant == TrimConfig::Variant::kKeepCategory) {
        Sexp head = node.children().front();
        node = Sexp::list({std::move(head), std::move(name)});
      } else {
        node = std::move(name);
      }
      changed = true;
      continue;
    }
    auto& kids = node.children();
    auto is_location = [&](const Sexp& c) {
      return c.is_list() &&
             config.location_heads.count(std::string(c.head())) > 0;
    };
    auto old_size = kids.size();
    std::erase_if(kids, is_location);
    if (kids.size() != old_size) {
      changed = true;
      continue;
    }
    if (kids.size() == 1) {
      Sexp only = std::move(kids.front());
      node = std::move(only);
      changed = true;
      continue;
    }
    break;
  }
  return changed;
}

bool trim_pass(Sexp& node, const TrimConfig& config) {
  bool changed = rewrite_here(node, config);
  if (node.is_list()) {
    for (auto& child : node.children()) {
      changed = trim_pass(child, config) || changed;
    }
  }
  return changed;
}

Sexp cut_below(const Sexp& node, std::size_t depth, std::size_t max_depth) {
  if (node.is_atom()) return node;
  Sexp::List kept;
  if (depth < max_depth) {
    for (const auto& c : node.children()) {
      kept.push_back(cut_below(c, depth + 1, max_depth));
    }
  }
  return Sexp::list(std::move(kept));
}

void collect_leaves(Sexp& node, std::vector<std::pair<Sexp*, std::size_t>>& out) {
  if (node.is_atom()) return;
  auto& kids = node.children();
  for (std::size_t i = 0; i < kids.size(); ++i) {
    if (kids[i].is_atom() || kids[i].children().empty()) {
      out.emplace_back(&node, i);
    } else {
      collect_leaves(kids[i], out);
    }
  }
}

Sexp random_trim(const Sexp& tree, std::size_t target, std::uint64_t seed) {
  Sexp out = tree;
  Rng rng(seed);
  std::size_t count = sexp_node_count(out);
  std::vector<std::pair<Sexp*, std::size_t>> leaves;
  while (count > target) {
    leaves.clear();
    collect_leaves(out, leaves);
    if (leaves.empty()) break;
    auto [parent, index] = leaves[uniform_index(rng, leaves.size())];
    auto& kids = parent->children();
    kids.erase(kids.begin() + static_cast<std::ptrdiff_t>(index));
    --count;
  }
  return out;
}

}  // namespace

TrimConfig TrimConfig::keep_category() {
  TrimConfig c;
  c.variant = Variant::kKeepCategory;
  return c;
}

TrimConfig TrimConfig::depth_limit(std::size_t max_depth) {
  TrimConfig c;
  c.variant = Variant::kDepthLimit;
  c.max_depth = max_depth;
  c.validate();
  return c;
}

TrimConfig TrimConfig::random(std::size_t target_node_count,
                              std::uint64_t seed) {
  TrimConfig c;
  c.variant = Variant::kRandom;
  c.target_node_count = target_node_count;
  c.seed = seed;
  c.validate();
  return c;
}

void TrimConfig::validate() const {
  if (variant == Variant::kDepthLimit && max_depth < 1) {
    throw std::invalid_argument("depth limit must be at least 1");
  }
  if (variant == Variant::kRandom && target_node_count < 1) {
    throw std::invalid_argument("random trimming target must be at least 1");
  }
}

Sexp trim(const Sexp& tree, const TrimConfig& config) {
  config.validate();
  switch (config.variant) {
    case TrimConfig::Variant::kDepthLimit:
      return cut_below(tree, 1, config.max_depth);
    case TrimConfig::Variant::kRandom:
      return random_trim(tree, config.target_node_count, config.seed);
    case TrimConfig::Variant::kStandard:
    case TrimConfig::Variant::kKeepCategory:
      break;
  }
  Sexp out = tree;
  while (trim_pass(out, config)) {
  }
  return out;
}

std::vector<std::string> flatten(const Sexp& tree) {
  std::vector<std::string> out;
  // Null entries stand for a pending ")".
  std::vector<const Sexp*> todo{&tree};
  while (!todo.empty()) {
    const Sexp* node = todo.back();
    todo.pop_back();
    if (node == nullptr) {
      out.emplace_back(")");
    } else if (node->is_atom()) {
      out.push_back(node->text());
    } else {
      out.emplace_back("(");
      todo.push_back(nullptr);
      const auto& kids = node->children();
      for (auto it = kids.rbegin(); it != kids.rend(); ++it) {
        todo.push_back(&*it);
      }
    }
  }
  return out;
}

std::vector<std::string> flatten_subtokenized(const Sexp& tree,
                                              const Lexicon& lexicon) {
  std::vector<std::string> out;
  for (auto& item : flatten(tree)) {
    if (is_identifier(item)) {
      for (auto& t : subtoken_texts(item, lexicon)) out.push_back(std::move(t));
    } else {
      out.push_back(std::move(item));
    }
  }
  return out;
}

TreeStats tree_stats(const Sexp& tree, const Lexicon& lexicon) {
  return {sexp_depth(tree), sexp_node_count(tree),
          flatten_subtokenized(tree, lexicon).size()};
}

}  // namespace lemma_namer
