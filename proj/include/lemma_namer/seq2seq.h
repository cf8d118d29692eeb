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

// Multi-input encoder-decoder for lemma names: one bi-LSTM per input, a fused
// initial decoder state, an LSTM decoder with optional attention over all
// encoded positions and an optional copy gate.

#ifndef LEMMA_NAMER_SEQ2SEQ_H_
#define LEMMA_NAMER_SEQ2SEQ_H_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "lemma_namer/corpus.h"
#include "lemma_namer/nnet.h"

namespace lemma_namer {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ModelConfig {
  std::vector<InputKind> inputs = {InputKind::kStmt};
  std::size_t embedding_dim = 200;
  std::size_t hidden_units = 200;
  std::size_t num_layers = 1;
  double dropout = 0.5;
  bool use_attention = false;
  bool use_copy = false;
  std::size_t beam_size = 5;
  std::size_t max_decode_len = 64;
  std::size_t max_input_len = 1500;
  bool length_normalization = false;

  // "ln-s+bsexpl1+attn+copy" style names; the "ln-" prefix is optional on
  // input. Throws ConfigError for unknown parts, duplicates or no inputs.
  static ModelConfig from_name(std::string_view name);
  std::string name() const;

  // Throws ConfigError. With `require_grid`, dimensions must come from
  // {200, 500, 1000} and layers from {1, 2, 3}.
  void validate(bool require_grid = false) const;

  nlohmann::json to_json() const;
  static ModelConfig from_json(const nlohmann::json& j);

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

class ReferenceTooLong : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A record mapped to ids. Source tokens missing from the name vocabulary get
// extended ids name_vocab_size + k in order of first occurrence.
struct EncodedExample {
  std::vector<std::vector<int>> inputs;  // input-vocabulary ids per encoder
  std::vector<int> source_ids;           // extended name ids, all encoders
  std::vector<std::string> oov_tokens;   // text of extended id V + k
  std::vector<int> decoder_inputs;       // BOS y_1 .. y_n
  std::vector<int> targets;              // y_1 .. y_n EOS
  bool truncated = false;
};

// Empty input streams are encoded as a single PAD so every encoder sees at
// least one position. Targets missing from the vocabulary become their
// extended id when copying is on and they occur in the source, UNK otherwise.
EncodedExample encode_example(const ProcessedRecord& record,
                              const ModelConfig& config,
                              const Vocabularies& vocabs,
                              bool with_target = true);

template <typename T>
class Seq2Seq {
 public:
  using Mat = nnet::Mat<T>;
  using Vec = nnet::Vec<T>;

  Seq2Seq() = default;
  Seq2Seq(const ModelConfig& config, std::size_t input_vocab_size,
          std::size_t name_vocab_size);

  const ModelConfig& config() const { return config_; }
  std::size_t input_vocab_size() const { return input_vocab_size_; }
  std::size_t name_vocab_size() const { return name_vocab_size_; }

  // Stable, named parameter order; also the checkpoint order.
  nnet::ParamList<T> parameters();
  void init(std::uint64_t seed);
  void set_zero();

  // Instrumentation of one teacher-forced pass.
  struct ForwardTrace {
    std::vector<int> decoder_inputs;
    std::vector<double> target_log_probs;
  };

  // Mean per-step negative log likelihood of the targets. Accumulates
  // gradients into `grad` when given; dropout applies only when `dropout`
  // is given. Throws ReferenceTooLong.
  double forward_backward(const EncodedExample& ex, Seq2Seq* grad = nullptr,
                          const nnet::DropoutContext* dropout = nullptr,
                          ForwardTrace* trace = nullptr) const;

  struct Encoded {
    Mat states;  // concatenated positions of every encoder
    std::vector<int> source_ids;
    std::size_t extended_size = 0;
  };
  struct DecoderState {
    std::vector<Vec> h, c;
  };

  Encoded encode(const EncodedExample& ex, DecoderState* initial) const;
  // Log probabilities over the extended vocabulary for the step that
  // consumes `input_id`; extended ids are fed to the decoder as UNK.
  Vec step(const Encoded& enc, DecoderState& state, int input_id) const;

  template <typename U>
  Seq2Seq<U> cast() const;

 private:
  template <typename U>
  friend class Seq2Seq;

  void build();

  ModelConfig config_;
  std::size_t input_vocab_size_ = 0;
  std::size_t name_vocab_size_ = 0;

  nnet::Embedding<T> input_embedding_;
  nnet::Embedding<T> name_embedding_;
  std::vector<nnet::BiLstmEncoder<T>> encoders_;
  nnet::Fusion<T> fusion_;
  std::vector<nnet::LstmCell<T>> decoder_;
  nnet::Attention<T> attention_;
  nnet::Affine<T> generator_;
  nnet::CopyGate<T> copy_;
};

template <typename T>
template <typename U>
Seq2Seq<U> Seq2Seq<T>::cast() const {
  Seq2Seq<U> out(config_, input_vocab_size_, name_vocab_size_);
  auto src = const_cast<Seq2Seq*>(this)->parameters();
  auto dst = out.parameters();
  for (std::size_t i = 0; i < src.size(); ++i) {
    *dst[i].value = src[i].value->template cast<U>();
  }
  return out;
}

extern template class Seq2Seq<float>;
extern template class Seq2Seq<double>;

}  // namespace lemma_namer

#endif  // LEMMA_NAMER_SEQ2SEQ_H_
