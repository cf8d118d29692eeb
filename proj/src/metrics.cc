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

#include "lemma_namer/metrics.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "lemma_namer/random.h"

namespace lemma_namer {

double bleu4_char(std::string_view candidate, std::string_view reference) {
  if (reference.empty()) throw EmptyReference("reference name is empty");
  if (candidate.empty()) return 0;
  double log_sum = 0;
  for (std::size_t n = 1; n <= 4; ++n) {
    std::map<std::string_view, int> ref_counts;
    for (std::size_t i = 0; i + n <= reference.size(); ++i) {
      ++ref_counts[reference.substr(i, n)];
    }
    std::map<std::string_view, int> cand_counts;
    for (std::size_t i = 0; i + n <= candidate.size(); ++i) {
      ++cand_counts[candidate.substr(i, n)];
    }
    double matches = 0;
    double total = 0;
    for (const auto& [gram, count] : cand_counts) {
      total += count;
      auto it = ref_counts.find(gram);
      if (it != ref_counts.end()) matches += std::min(count, it->second);
    }
    double p = n == 1 ? matches / total : (matches + 1) / (total + 1);
    if (p == 0) return 0;
    log_sum += std::log(p);
  }
  const double ratio = static_cast<double>(reference.size()) /
                       static_cast<double>(candidate.size());
  const double bp = std::min(1.0, std::exp(1 - ratio));
  return bp * std::exp(log_sum / 4);
}

std::vector<std::string> name_fragments(std::string_view name) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= name.size()) {
    std::size_t end = name.find('_', start);
    if (end == std::string_view::npos) end = name.size();
    if (end > start) out.emplace_back(name.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

double fragment_accuracy(std::string_view candidate, std::string_view reference,
                         bool symmetric) {
  auto cand = name_fragments(candidate);
  auto ref = name_fragments(reference);
  if (cand.empty() || ref.empty()) throw EmptyName("name has no fragments");
  std::map<std::string, int> pool;
  for (const auto& f : ref) ++pool[f];
  double common = 0;
  for (const auto& f : cand) {
    auto it = pool.find(f);
    if (it != pool.end() && it->second > 0) {
      --it->second;
      ++common;
    }
  }
  if (symmetric) return 2 * common / static_cast<double>(cand.size() + ref.size());
  return common / static_cast<double>(cand.size());
}

int topk_accuracy(std::span<const std::string> suggestions,
                  std::string_view reference, std::size_t k) {
  if (k == 0) throw std::invalid_argument("k must be at least 1");
  const std::size_t n = std::min(k, suggestions.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (suggestions[i] == reference) return 1;
  }
  return 0;
}

nlohmann::json MetricReport::to_json() const {
  return {{"bleu4", bleu4}, {"frag_acc", frag_acc}, {"top1", top1},
          {"top5", top5},   {"n", n}};
}

LemmaScores score_lemmas(const std::vector<std::vector<std::string>>& suggestions,
                         std::span<const std::string> references,
                         bool symmetric_fragments) {
  if (suggestions.size() != references.size()) {
    throw LengthMismatch("suggestions and references differ in count");
  }
  LemmaScores s;
  for (std::size_t i = 0; i < references.size(); ++i) {
    const auto& sug = suggestions[i];
    const std::string& ref = references[i];
    const bool usable = !sug.empty() && !name_fragments(sug[0]).empty();
    s.bleu4.push_back(sug.empty() ? 0 : bleu4_char(sug[0], ref));
    s.frag_acc.push_back(usable ? fragment_accuracy(sug[0], ref, symmetric_fragments)
                                : 0);
    s.top1.push_back(topk_accuracy(sug, ref, 1));
    s.top5.push_back(topk_accuracy(sug, ref, 5));
  }
  return s;
}

namespace {

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0;
  double sum = 0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

}  // namespace

MetricReport aggregate(const LemmaScores& scores) {
  MetricReport r;
  r.bleu4 = mean(scores.bleu4);
  r.frag_acc = mean(scores.frag_acc);
  r.top1 = mean(scores.top1);
  r.top5 = mean(scores.top5);
  r.n = scores.top1.size();
  return r;
}

MetricReport average_reports(std::span<const MetricReport> runs) {
  MetricReport r;
  if (runs.empty()) return r;
  for (const auto& x : runs) {
    r.bleu4 += x.bleu4;
    r.frag_acc += x.frag_acc;
    r.top1 += x.top1;
    r.top5 += x.top5;
  }
  const auto k = static_cast<double>(runs.size());
  r.bleu4 /= k;
  r.frag_acc /= k;
  r.top1 /= k;
  r.top5 /= k;
  r.n = runs.front().n;
  return r;
}

double bootstrap_compare(std::span<const double> a, std::span<const double> b,
                         std::size_t resamples, std::uint64_t seed) {
  if (a.size() != b.size()) throw LengthMismatch("paired scores differ in length");
  if (a.empty() || resamples == 0) {
    throw std::invalid_argument("bootstrap needs scores and resamples");
  }
  Rng rng(seed);
  const std::size_t n = a.size();
  double worse = 0;
  for (std::size_t r = 0; r < resamples; ++r) {
    // Paired: compare the summed differences of one resample.
    double diff = 0;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t j = uniform_index(rng, n);
      diff += a[j] - b[j];
    }
    if (diff < 0) {
      worse += 1;
    } else if (diff == 0) {
      worse += 0.5;
    }
  }
  return worse / static_cast<double>(resamples);
}

}  // namespace lemma_namer
