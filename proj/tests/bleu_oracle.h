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

// Brute-force character BLEU-4 used as an independent oracle.

#ifndef LEMMA_NAMER_TESTS_BLEU_ORACLE_H_
#define LEMMA_NAMER_TESTS_BLEU_ORACLE_H_

#include <algorithm>
#include <cmath>
#include <string>

namespace lemma_namer::testing {

// Occurrences of `gram` in `text`, by scanning every offset.
inline int occurrences(const std::string& text, const std::string& gram) {
  int count = 0;
  for (std::size_t i = 0; i + gram.size() <= text.size(); ++i) {
    if (text.compare(i, gram.size(), gram) == 0) ++count;
  }
  return count;
}

inline double oracle_bleu4(const std::string& cand, const std::string& ref) {
  if (cand.empty()) return 0;
  double log_sum = 0;
  for (std::size_t n = 1; n <= 4; ++n) {
    double matches = 0, total = 0;
    for (std::size_t i = 0; i + n <= cand.size(); ++i) {
      std::string gram = cand.substr(i, n);
      total += 1;
      // Clip: the i-th copy of a gram matches only while the reference has
      // at least that many copies.
      int earlier = 0;
      for (std::size_t j = 0; j < i; ++j) {
        if (cand.compare(j, n, gram) == 0) ++earlier;
      }
      if (earlier < occurrences(ref, gram)) matches += 1;
    }
    double p = n == 1 ? (total > 0 ? matches / total : 0)
                      : (matches + 1) / (total + 1);
    if (p == 0) return 0;
    log_sum += std::log(p);
  }
  double bp = std::min(
      1.0, std::exp(1.0 - static_cast<double>(ref.size()) /
                              static_cast<double>(cand.size())));
  return bp * std::exp(log_sum / 4);
}

}  // namespace lemma_namer::testing

#endif  // LEMMA_NAMER_TESTS_BLEU_ORACLE_H_
