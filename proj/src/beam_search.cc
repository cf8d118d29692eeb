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

#include "lemma_namer/beam_search.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace lemma_namer {

namespace {

template <typename T>
struct Live {
  std::vector<int> ids;
  std::set<std::string> emitted;
  double score = 0;
  typename Seq2Seq<T>::DecoderState state;
};

struct Candidate {
  double score;
  std::size_t parent;
  int id;
};

// Lexicographic comparison of a + [a_last] against b + [b_last].
bool ids_less(const std::vector<int>& a, int a_last, const std::vector<int>& b,
              int b_last) {
  const std::size_t na = a.size() + 1;
  const std::size_t nb = b.size() + 1;
  for (std::size_t i = 0; i < std::min(na, nb); ++i) {
    const int x = i < a.size() ? a[i] : a_last;
    const int y = i < b.size() ? b[i] : b_last;
    if (x != y) return x < y;
  }
  return na < nb;
}

double ranking_score(const Hypothesis& h, bool normalize) {
  if (!normalize) return h.log_prob;
  return h.log_prob / static_cast<double>(h.token_ids.size() + 1);
}

}  // namespace

std::string token_text(int id, const Vocab& names, const EncodedExample& ex) {
  const auto v = static_cast<int>(names.size());
  if (id < v) return names.token_of(id);
  const auto k = static_cast<std::size_t>(id - v);
  if (k >= ex.oov_tokens.size()) throw std::out_of_range("unknown extended id");
  return ex.oov_tokens[k];
}

template <typename T>
std::vector<Hypothesis> beam_search(const Seq2Seq<T>& model,
                                    const EncodedExample& ex,
                                    const Vocab& names, std::size_t beam_size,
                                    std::size_t top_k) {
  if (beam_size == 0 || top_k == 0 || top_k > beam_size) {
    throw std::invalid_argument("need 0 < top_k <= beam_size");
  }
  if (names.size() != model.name_vocab_size()) {
    throw std::invalid_argument("name vocabulary does not match the model");
  }
  const std::size_t max_len = model.config().max_decode_len;
  Live<T> root;
  auto enc = model.encode(ex, &root.state);
  std::vector<std::string> texts(enc.extended_size);
  for (std::size_t id = 0; id < enc.extended_size; ++id) {
    texts[id] = token_text(static_cast<int>(id), names, ex);
  }

  std::vector<Live<T>> live;
  live.push_back(std::move(root));
  std::vector<Hypothesis> finished;
  auto finish = [&](const Live<T>& h, bool done) {
    Hypothesis out;
    out.token_ids = h.ids;
    for (int id : h.ids) out.subtokens.push_back(texts[id]);
    for (const auto& s : out.subtokens) out.name += s;
    out.log_prob = h.score;
    out.finished = done;
    finished.push_back(std::move(out));
  };

  for (std::size_t step = 0; step < max_len && !live.empty(); ++step) {
    const std::size_t width = beam_size - finished.size();
    std::vector<Candidate> cands;
    for (std::size_t i = 0; i < live.size(); ++i) {
      auto& h = live[i];
      const int input = h.ids.empty() ? Vocab::kBos : h.ids.back();
      auto lp = model.step(enc, h.state, input);
      for (Eigen::Index id = 0; id < lp.size(); ++id) {
        const int tok = static_cast<int>(id);
        if (tok == Vocab::kPad || tok == Vocab::kBos || tok == Vocab::kUnk) continue;
        if (tok != Vocab::kEos && texts[tok] != "_" && h.emitted.count(texts[tok])) {
          continue;
        }
        const double l = static_cast<double>(lp(id));
        if (!std::isfinite(l)) continue;
        cands.push_back({h.score + l, i, tok});
      }
    }
    auto better = [&](const Candidate& a, const Candidate& b) {
      if (a.score != b.score) return a.score > b.score;
      return ids_less(live[a.parent].ids, a.id, live[b.parent].ids, b.id);
    };
    const std::size_t keep = std::min(width, cands.size());
    std::partial_sort(cands.begin(), cands.begin() + static_cast<long>(keep),
                      cands.end(), better);
    std::vector<Live<T>> next;
    for (std::size_t c = 0; c < keep; ++c) {
      const auto& cand = cands[c];
      const auto& parent = live[cand.parent];
      if (cand.id == Vocab::kEos) {
        Live<T> done{parent.ids, {}, cand.score, {}};
        finish(done, true);
        continue;
      }
      Live<T> child;
      child.ids = parent.ids;
      child.ids.push_back(cand.id);
      child.emitted = parent.emitted;
      if (texts[cand.id] != "_") child.emitted.insert(texts[cand.id]);
      child.score = cand.score;
      child.state = parent.state;
      next.push_back(std::move(child));
    }
    live = std::move(next);
  }
  if (finished.empty()) {
    for (const auto& h : live) finish(h, false);
  }

  const bool normalize = model.config().length_normalization;
  std::sort(finished.begin(), finished.end(),
            [&](const Hypothesis& a, const Hypothesis& b) {
              double sa = ranking_score(a, normalize);
              double sb = ranking_score(b, normalize);
              if (sa != sb) return sa > sb;
              return a.token_ids < b.token_ids;
            });
  if (finished.size() > top_k) finished.resize(top_k);
  return finished;
}

template <typename T>
std::vector<Suggestion> suggest(const Seq2Seq<T>& model,
                                const EncodedExample& ex, const Vocab& names,
                                std::size_t k) {
  const std::size_t beam = std::max(model.config().beam_size, k);
  auto hyps = beam_search(model, ex, names, beam, beam);
  std::vector<Suggestion> out;
  std::set<std::string> seen;
  for (const auto& h : hyps) {
    if (out.size() == k) break;
    if (!seen.insert(h.name).second) continue;
    out.push_back({h.name, h.log_prob});
  }
  return out;
}

template std::vector<Hypothesis> beam_search<float>(const Seq2Seq<float>&,
                                                    const EncodedExample&,
                                                    const Vocab&, std::size_t,
                                                    std::size_t);
template std::vector<Hypothesis> beam_search<double>(const Seq2Seq<double>&,
                                                     const EncodedExample&,
                                                     const Vocab&, std::size_t,
                                                     std::size_t);
template std::vector<Suggestion> suggest<float>(const Seq2Seq<float>&,
                                                const EncodedExample&,
                                                const Vocab&, std::size_t);
template std::vector<Suggestion> suggest<double>(const Seq2Seq<double>&,
                                                 const EncodedExample&,
                                                 const Vocab&, std::size_t);

}  // namespace lemma_namer
