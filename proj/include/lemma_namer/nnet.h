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

// A small differentiable core: embeddings, affine maps, LSTM cells,
// bi-directional LSTM encoders, encoder-state fusion, bilinear attention and
// the copy gate, each with an explicit backward pass.
//
// Layers are templated on the scalar type. Training uses float; gradient
// checks use double.

#ifndef LEMMA_NAMER_NNET_H_
#define LEMMA_NAMER_NNET_H_

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lemma_namer/random.h"

namespace lemma_namer::nnet {

template <typename T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <typename T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NonFiniteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shape plus row-major values; the serialized form of a parameter.
template <typename T>
struct DenseArray {
  std::vector<std::size_t> shape;
  std::vector<T> values;

  static DenseArray from_matrix(const Mat<T>& m);
  Mat<T> to_matrix() const;
};

template <typename T>
struct ParamRef {
  std::string name;
  Mat<T>* value;
};
template <typename T>
using ParamList = std::vector<ParamRef<T>>;

// Fills every parameter i.i.d. from U(lo, hi), in list order.
template <typename T>
void init_uniform(const ParamList<T>& params, Rng& rng, double lo = -0.1,
                  double hi = 0.1);

// Inverted dropout between stacked recurrent layers. A null context means
// evaluation mode.
struct DropoutContext {
  double rate = 0.5;
  Rng* rng = nullptr;
};

template <typename T>
Mat<T> dropout_mask(Eigen::Index rows, Eigen::Index cols,
                    const DropoutContext& ctx);

// Column-wise softmax.
template <typename T>
Mat<T> softmax_columns(const Mat<T>& scores);
template <typename T>
Vec<T> log_softmax(const Vec<T>& logits);

template <typename T>
struct Embedding {
  Mat<T> table;  // dim x vocab, one column per token

  Embedding() = default;
  Embedding(std::size_t vocab_size, std::size_t dim);

  Mat<T> forward(std::span<const int> ids) const;
  void backward(std::span<const int> ids, const Mat<T>& d_out,
                Embedding& grad) const;
  void collect(ParamList<T>& out, const std::string& prefix);
};

template <typename T>
struct Affine {
  Mat<T> weight;  // out x in
  Mat<T> bias;    // out x 1

  Affine() = default;
  Affine(std::size_t in, std::size_t out);

  Mat<T> forward(const Mat<T>& x) const;
  // Accumulates parameter gradients into `grad` and returns d_x.
  Mat<T> backward(const Mat<T>& x, const Mat<T>& d_y, Affine& grad) const;
  void collect(ParamList<T>& out, const std::string& prefix);
};

// One LSTM layer; gate blocks are ordered input, forget, cell, output.
template <typename T>
struct LstmCell {
  Mat<T> w_input;      // 4H x in
  Mat<T> w_recurrent;  // 4H x H
  Mat<T> bias;         // 4H x 1

  struct State {
    Vec<T> h;
    Vec<T> c;
  };

  // Column 0 of `cells`/`hiddens` holds the initial state.
  struct Trace {
    Mat<T> inputs;
    Mat<T> gates;  // post-activation
    Mat<T> cells;
    Mat<T> hiddens;
  };

  struct InputGrads {
    Mat<T> d_inputs;
    Vec<T> d_h0;
    Vec<T> d_c0;
  };

  LstmCell() = default;
  LstmCell(std::size_t input_dim, std::size_t hidden_dim);

  std::size_t input_dim() const { return static_cast<std::size_t>(w_input.cols()); }
  std::size_t hidden_dim() const {
    return static_cast<std::size_t>(w_recurrent.cols());
  }

  Trace run(const Mat<T>& inputs, const Vec<T>& h0, const Vec<T>& c0) const;
  State step(const Vec<T>& input, const State& prev) const;
  // `d_hidden` is the gradient for outputs h_1..h_T; `d_h_last`/`d_c_last`
  // are extra gradients on the final state.
  InputGrads backward(const Trace& trace, const Mat<T>& d_hidden,
                      const Vec<T>& d_h_last, const Vec<T>& d_c_last,
                      LstmCell& grad) const;
  void collect(ParamList<T>& out, const std::string& prefix);
};

class EmptySequenceError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Stacked bi-directional LSTM. Per-position outputs are [forward; backward]
// (2H rows); each layer's final state is [forward final; backward final].
template <typename T>
struct BiLstmEncoder {
  struct Layer {
    LstmCell<T> forward;
    LstmCell<T> backward;
  };
  std::vector<Layer> layers;

  struct Output {
    Mat<T> states;
    std::vector<Vec<T>> final_h;
    std::vector<Vec<T>> final_c;
  };

  struct Trace {
    std::vector<typename LstmCell<T>::Trace> fwd, bwd;
    std::vector<Mat<T>> masks;  // dropout on the input of layer l > 0
  };

  BiLstmEncoder() = default;
  BiLstmEncoder(std::size_t input_dim, std::size_t hidden_dim,
                std::size_t num_layers);

  std::size_t hidden_dim() const { return layers.front().forward.hidden_dim(); }

  // Throws EmptySequenceError for zero columns.
  Output forward(const Mat<T>& inputs, Trace* trace = nullptr,
                 const DropoutContext* dropout = nullptr) const;
  Mat<T> backward(const Trace& trace, const Mat<T>& d_states,
                  const std::vector<Vec<T>>& d_final_h,
                  const std::vector<Vec<T>>& d_final_c,
                  BiLstmEncoder& grad) const;
  void collect(ParamList<T>& out, const std::string& prefix);
};

// Per layer: h_d = W_h [h_1; ...; h_n] + b_h and c_d = W_c [c_1; ...] + b_c.
template <typename T>
struct Fusion {
  std::vector<Affine<T>> hidden;
  std::vector<Affine<T>> cell;

  Fusion() = default;
  Fusion(std::size_t num_encoders, std::size_t encoder_dim,
         std::size_t decoder_dim, std::size_t num_layers);

  // finals[k][l] is encoder k's final vector at layer l.
  static Vec<T> concat(const std::vector<std::vector<Vec<T>>>& finals,
                       std::size_t layer);

  struct Output {
    std::vector<Vec<T>> h;
    std::vector<Vec<T>> c;
  };
  Output forward(const std::vector<std::vector<Vec<T>>>& final_h,
                 const std::vector<std::vector<Vec<T>>>& final_c) const;
  // Returns gradients for final_h and final_c, indexed [encoder][layer].
  std::pair<std::vector<std::vector<Vec<T>>>, std::vector<std::vector<Vec<T>>>>
  backward(const std::vector<std::vector<Vec<T>>>& final_h,
           const std::vector<std::vector<Vec<T>>>& final_c,
           const std::vector<Vec<T>>& d_h, const std::vector<Vec<T>>& d_c,
           Fusion& grad) const;
  void collect(ParamList<T>& out, const std::string& prefix);
};

// Bilinear ("general") attention over the concatenated positions of all
// encoders, followed by the attentional output tanh(W_o [context; h] + b).
template <typename T>
struct Attention {
  Mat<T> score;  // decoder_dim x encoder_dim
  Affine<T> output;

  struct Trace {
    Mat<T> queries;   // encoder_dim x steps
    Mat<T> weights;   // positions x steps
    Mat<T> contexts;  // encoder_dim x steps
    Mat<T> joined;    // [contexts; decoder states]
    Mat<T> attentional;
  };

  struct Grads {
    Mat<T> d_encoder;
    Mat<T> d_decoder;
  };

  Attention() = default;
  Attention(std::size_t encoder_dim, std::size_t decoder_dim);

  // Single query: returns (context, weights).
  std::pair<Vec<T>, Vec<T>> attend(const Vec<T>& decoder_state,
                                   const Mat<T>& encoder_states) const;

  Mat<T> forward(const Mat<T>& encoder_states, const Mat<T>& decoder_states,
                 Trace& trace) const;
  // `d_weights_extra` and `d_context_extra` carry gradients from consumers of
  // the attention weights and contexts other than the attentional output.
  Grads backward(const Trace& trace, const Mat<T>& encoder_states,
                 const Mat<T>& decoder_states, const Mat<T>& d_attentional,
                 const Mat<T>& d_weights_extra, const Mat<T>& d_context_extra,
                 Attention& grad) const;
  void collect(ParamList<T>& out, const std::string& prefix);
};

// p_gen = sigmoid(w . [context; decoder state; decoder input] + b).
template <typename T>
struct CopyGate {
  Affine<T> gate;

  CopyGate() = default;
  CopyGate(std::size_t context_dim, std::size_t state_dim,
           std::size_t input_dim);

  // One probability per column.
  Mat<T> forward(const Mat<T>& features) const;
  // `d_p` is the gradient on p_gen; returns the gradient on the features.
  Mat<T> backward(const Mat<T>& features, const Mat<T>& p_gen,
                  const Mat<T>& d_p, CopyGate& grad) const;
  void collect(ParamList<T>& out, const std::string& prefix);
};

// P(w) = p_gen * softmax(logits)(w) + (1 - p_gen) * sum of the attention at
// positions whose token is w. `source_ids` hold extended ids (vocabulary ids
// or vocab_size + k for source-only tokens); the result has `extended_size`
// entries.
template <typename T>
Vec<T> copy_distribution(const Vec<T>& vocab_logits, T p_gen,
                         const Vec<T>& attention_weights,
                         std::span<const int> source_ids,
                         std::size_t extended_size);

struct GradCheckTensor {
  std::string name;
  Mat<double>* value;
  const Mat<double>* gradient;
};

struct GradCheckReport {
  double max_relative_error = 0;
  std::size_t coordinates = 0;
  std::string worst;
};

// Relative errors are |a - n| / max(|a|, |n|, kGradCheckFloor).
inline constexpr double kGradCheckFloor = 1e-6;

// Compares analytic gradients with central differences of `loss`. Tensors
// larger than `max_per_tensor` are checked on a seeded random sample of that
// many coordinates (0 checks everything). Throws NonFiniteError on NaN/Inf.
GradCheckReport grad_check(const std::function<double()>& loss,
                           std::span<const GradCheckTensor> tensors,
                           double epsilon = 1e-5, std::size_t max_per_tensor = 0,
                           std::uint64_t seed = 0);

}  // namespace lemma_namer::nnet

#endif  // LEMMA_NAMER_NNET_H_
