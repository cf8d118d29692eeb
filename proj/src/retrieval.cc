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

#include "lemma_namer/retrieval.h"

#include <algorithm>
#include <cmath>
#include <set>

namespace lemma_namer {

using nlohmann::json;

namespace {

void normalize(SparseVector& v) {
  double sq = 0;
  for (const auto& [_, w] : v) sq += w * w;
  if (sq == 0) return;
  const double norm = std::sqrt(sq);
  for (auto& [_, w] : v) w /= norm;
}

double squared_norm(const SparseVector& v) {
  double sq = 0;
  for (const auto& [tok, w] : v) sq += w * w;
  return sq;
}

}  // namespace

double cosine(const SparseVector& a, const SparseVector& b) {
  const SparseVector& small = a.size() <= b.size() ? a : b;
  const SparseVector& large = a.size() <= b.size() ? b : a;
  double dot = 0;
  for (const auto& [tok, w] : small) {
    auto it = large.find(tok);
    if (it != large.end()) dot += w * it->second;
  }
  if (dot == 0) return 0;
  return dot / std::sqrt(squared_norm(a) * squared_norm(b));
}

TfIdfIndex TfIdfIndex::build(const std::vector<std::vector<std::string>>& documents,
                             std::vector<std::string> names) {
  if (documents.empty()) throw EmptyTrainSet("cannot index an empty training set");
  if (documents.size() != names.size()) {
    throw std::invalid_argument("documents and names differ in count");
  }
  TfIdfIndex index;
  index.num_docs_ = documents.size();
  index.names_ = std::move(names);
  for (const auto& doc : documents) {
    for (const auto& tok : std::set<std::string>(doc.begin(), doc.end())) {
      ++index.df_[tok];
    }
  }
  for (const auto& doc : documents) index.vectors_.push_back(index.vectorize(doc));
  return index;
}

double TfIdfIndex::idf(const std::string& token) const {
  auto it = df_.find(token);
  const double df = it == df_.end() ? 0 : static_cast<double>(it->second);
  return std::log((1.0 + static_cast<double>(num_docs_)) / (1.0 + df)) + 1.0;
}

SparseVector TfIdfIndex::vectorize(const std::vector<std::string>& tokens) const {
  SparseVector v;
  for (const auto& tok : tokens) {
    if (df_.count(tok)) v[tok] += 1;
  }
  for (auto& [tok, w] : v) w *= idf(tok);
  normalize(v);
  return v;
}

std::vector<Retrieved> TfIdfIndex::retrieve(const std::vector<std::string>& query,
                                            std::size_t k) const {
  if (k == 0) throw std::invalid_argument("k must be at least 1");
  const SparseVector q = vectorize(query);
  std::vector<Retrieved> all;
  for (std::size_t i = 0; i < vectors_.size(); ++i) {
    all.push_back({names_[i], cosine(q, vectors_[i]), i});
  }
  const std::size_t n = std::min(k, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<long>(n), all.end(),
                    [](const Retrieved& a, const Retrieved& b) {
                      if (a.similarity != b.similarity) {
                        return a.similarity > b.similarity;
                      }
                      return a.index < b.index;
                    });
  all.resize(n);
  return all;
}

json TfIdfIndex::to_json() const {
  json vectors = json::array();
  for (const auto& v : vectors_) vectors.push_back(v);
  return {{"num_docs", num_docs_}, {"df", df_}, {"names", names_},
          {"vectors", vectors}};
}

TfIdfIndex TfIdfIndex::from_json(const json& j) {
  TfIdfIndex index;
  try {
    index.num_docs_ = j.at("num_docs").get<std::size_t>();
    index.df_ = j.at("df").get<std::map<std::string, std::size_t>>();
    index.names_ = j.at("names").get<std::vector<std::string>>();
    index.vectors_ = j.at("vectors").get<std::vector<SparseVector>>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bad tf-idf index: ") + e.what());
  }
  if (index.vectors_.size() != index.names_.size()) {
    throw std::invalid_argument("tf-idf index vectors and names differ in count");
  }
  return index;
}

}  // namespace lemma_namer
