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

// Name-quality metrics: character BLEU-4, fragment accuracy, top-k exact
// match and paired bootstrap significance.

#ifndef LEMMA_NAMER_METRICS_H_
#define LEMMA_NAMER_METRICS_H_

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace lemma_namer {

class EmptyReference : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class EmptyName : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class LengthMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Character n-gram BLEU, n = 1..4. Unigram precision is unsmoothed; for
// n >= 2, p_n = (matches + 1) / (total + 1). Brevity penalty
// min(1, exp(1 - |ref| / |cand|)). An empty candidate scores 0.
double bleu4_char(std::string_view candidate, std::string_view reference);

// Underscore-delimited fragments, empty ones dropped.
std::vector<std::string> name_fragments(std::string_view name);

// |fragment multiset intersection| / |candidate fragments|. The symmetric
// form divides 2 |intersection| by the sum of both fragment counts.
double fragment_accuracy(std::string_view candidate, std::string_view reference,
                         bool symmetric = false);

// 1 when `reference` is among the first min(k, n) suggestions.
int topk_accuracy(std::span<const std::string> suggestions,
                  std::string_view reference, std::size_t k);

struct LemmaScores {
  std::vector<double> bleu4, frag_acc, top1, top5;
};

struct MetricReport {
  double bleu4 = 0;
  double frag_acc = 0;
  double top1 = 0;
  double top5 = 0;
  std::size_t n = 0;

  nlohmann::json to_json() const;
};

// BLEU and fragment accuracy score the top-1 suggestion; a lemma without
// suggestions or with an empty top-1 name scores 0 on both.
LemmaScores score_lemmas(const std::vector<std::vector<std::string>>& suggestions,
                         std::span<const std::string> references,
                         bool symmetric_fragments = false);
MetricReport aggregate(const LemmaScores& scores);
MetricReport average_reports(std::span<const MetricReport> runs);

// One-sided paired bootstrap p-value for "A scores higher than B": the
// fraction of resamples with mean(A) < mean(B), counting ties as one half.
double bootstrap_compare(std::span<const double> a, std::span<const double> b,
                         std::size_t resamples = 10000, std::uint64_t seed = 0);

}  // namespace lemma_namer

#endif  // LEMMA_NAMER_METRICS_H_
