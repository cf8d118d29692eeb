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

// Beam search over name sub-tokens with a ban on repeated sub-tokens.

#ifndef LEMMA_NAMER_BEAM_SEARCH_H_
#define LEMMA_NAMER_BEAM_SEARCH_H_

#include <string>
#include <vector>

#include "lemma_namer/corpus.h"
#include "lemma_namer/seq2seq.h"

namespace lemma_namer {

struct Hypothesis {
  std::vector<int> token_ids;  // without BOS and EOS
  std::vector<std::string> subtokens;
  std::string name;
  double log_prob = 0;
  bool finished = false;
};

// Text of a (possibly extended) name id.
std::string token_text(int id, const Vocab& names, const EncodedExample& ex);

// Returns up to `top_k` hypotheses sorted by total log probability, ties
// broken by the lexicographically smaller id sequence. At every expansion a
// sub-token whose text the hypothesis already emitted (other than "_") is
// banned, as are PAD, BOS and UNK. The beam shrinks as hypotheses finish on
// EOS; when none finish within max_decode_len the unfinished ones are
// returned. Throws std::invalid_argument when top_k > beam_size.
template <typename T>
std::vector<Hypothesis> beam_search(const Seq2Seq<T>& model,
                                    const EncodedExample& ex,
                                    const Vocab& names, std::size_t beam_size,
                                    std::size_t top_k);

struct Suggestion {
  std::string name;
  double log_prob = 0;
};

// The k best distinct names; the beam is max(config beam size, k).
template <typename T>
std::vector<Suggestion> suggest(const Seq2Seq<T>& model,
                                const EncodedExample& ex, const Vocab& names,
                                std::size_t k = 5);

}  // namespace lemma_namer

#endif  // LEMMA_NAMER_BEAM_SEARCH_H_
