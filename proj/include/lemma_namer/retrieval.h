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

// Tf-idf nearest-neighbour name retrieval over statement tokens.

#ifndef LEMMA_NAMER_RETRIEVAL_H_
#define LEMMA_NAMER_RETRIEVAL_H_

#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "lemma_namer/trainer.h"

namespace lemma_namer {

using SparseVector = std::map<std::string, double>;

struct Retrieved {
  std::string name;
  double similarity = 0;
  std::size_t index = 0;  // position in the training set
};

// tf = raw count, idf = ln((1 + N) / (1 + df)) + 1, L2-normalized vectors.
class TfIdfIndex {
 public:
  // Throws EmptyTrainSet.
  static TfIdfIndex build(const std::vector<std::vector<std::string>>& documents,
                          std::vector<std::string> names);

  // Query tokens unseen in training carry no weight.
  SparseVector vectorize(const std::vector<std::string>& tokens) const;
  double idf(const std::string& token) const;

  // The k most similar training lemmas by cosine; ties keep training order.
  std::vector<Retrieved> retrieve(const std::vector<std::string>& query,
                                  std::size_t k = 5) const;

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  const std::map<std::string, std::size_t>& document_frequency() const { return df_; }
  const std::vector<SparseVector>& vectors() const { return vectors_; }

  nlohmann::json to_json() const;
  static TfIdfIndex from_json(const nlohmann::json& j);

 private:
  std::size_t num_docs_ = 0;
  std::map<std::string, std::size_t> df_;
  std::vector<SparseVector> vectors_;
  std::vector<std::string> names_;
};

double cosine(const SparseVector& a, const SparseVector& b);

}  // namespace lemma_namer

#endif  // LEMMA_NAMER_RETRIEVAL_H_
