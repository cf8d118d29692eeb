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

#include "lemma_namer/nnet.h"

#include <cmath>
#include <limits>

namespace lemma_namer::nnet {

namespace {

template <typename T>
auto sigmoid(const Eigen::ArrayBase<T>& x) {
  return (typename T::Scalar(1) + (-x).exp()).inverse();
}

template <typename T>
Mat<T> reverse_columns(const Mat<T>& m) {
  return m.rowwise().reverse();
}

std::string join(const std::string& prefix, const char* name) {
  return prefix.empty() ? std::string(name) : prefix + "." + name;
}

}  // namespace

template <typename T>
DenseArray<T> DenseArray<T>::from_matrix(const Mat<T>& m) {
  DenseArray a;
  a.shape = {static_cast<std::size_t>(m.rows()),
             static_cast<std::size_t>(m.cols())};
  a.values.resize(static_cast<std::size_t>(m.size()));
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) a.values[k++] = m(r, c);
  }
  return a;
}

template <typename T>
Mat<T> DenseArray<T>::to_matrix() const {
  if (shape.size() != 2 || shape[0] * shape[1] != values.size()) {
    throw DimensionMismatch("dense array is not a well-formed matrix");
  }
  Mat<T> m(static_cast<Eigen::Index>(shape[0]),
           static_cast<Eigen::Index>(shape[1]));
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = values[k++];
  }
  return m;
}

template <typename T>
void init_uniform(const ParamList<T>& params, Rng& rng, double lo, double hi) {
  for (const auto& p : params) {
    for (Eigen::Index i = 0; i < p.value->size(); ++i) {
      p.value->data()[i] = static_cast<T>(uniform(rng, lo, hi));
    }
  }
}

template <typename T>
Mat<T> dropout_mask(Eigen::Index rows, Eigen::Index cols,
                    const DropoutContext& ctx) {
  Mat<T> mask(rows, cols);
  const T keep = static_cast<T>(1.0 / (1.0 - ctx.rate));
  for (Eigen::Index i = 0; i < mask.size(); ++i) {
    mask.data()[i] = uniform01(*ctx.rng) < ctx.rate ? T(0) : keep;
  }
  return mask;
}

template <typename T>
Mat<T> softmax_columns(const Mat<T>& scores) {
  Mat<T> out(scores.rows(), scores.cols());
  for (Eigen::Index c = 0; c < scores.cols(); ++c) {
    T peak = scores.col(c).maxCoeff();
    out.col(c) = (scores.col(c).array() - peak).exp();
    out.col(c) /= out.col(c).sum();
  }
  return out;
}

template <typename T>
Vec<T> log_softmax(const Vec<T>& logits) {
  T peak = logits.maxCoeff();
  T lse = peak + std::log((logits.array() - peak).exp().sum());
  return logits.array() - lse;
}

// ---------------------------------------------------------------- Embedding

template <typename T>
Embedding<T>::Embedding(std::size_t vocab_size, std::size_t dim)
    : table(Mat<T>::Zero(static_cast<Eigen::Index>(dim),
                         static_cast<Eigen::Index>(vocab_size))) {}

template <typename T>
Mat<T> Embedding<T>::forward(std::span<const int> ids) const {
  Mat<T> out(table.rows(), static_cast<Eigen::Index>(ids.size()));
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || ids[i] >= table.cols()) {
      throw DimensionMismatch("embedding id " + std::to_string(ids[i]) +
                              " out of range");
    }
    out.col(static_cast<Eigen::Index>(i)) = table.col(ids[i]);
  }
  return out;
}

template <typename T>
void Embedding<T>::backward(std::span<const int> ids, const Mat<T>& d_out,
                            Embedding& grad) const {
  for (std::size_t i = 0; i < ids.size(); ++i) {
    grad.table.col(ids[i]) += d_out.col(static_cast<Eigen::Index>(i));
  }
}

template <typename T>
void Embedding<T>::collect(ParamList<T>& out, const std::string& prefix) {
  out.push_back({join(prefix, "table"), &table});
}

// ------------------------------------------------------------------- Affine

template <typename T>
Affine<T>::Affine(std::size_t in, std::size_t out)
    : weight(Mat<T>::Zero(static_cast<Eigen::Index>(out),
                          static_cast<Eigen::Index>(in))),
      bias(Mat<T>::Zero(static_cast<Eigen::Index>(out), 1)) {}

template <typename T>
Mat<T> Affine<T>::forward(const Mat<T>& x) const {
  if (x.rows() != weight.cols()) {
    throw DimensionMismatch("affine input has " + std::to_string(x.rows()) +
                            " rows, expected " + std::to_string(weight.cols()));
  }
  Mat<T> y = weight * x;
  y.colwise() += bias.col(0);
  return y;
}

template <typename T>
Mat<T> Affine<T>::backward(const Mat<T>& x, const Mat<T>& d_y,
                           Affine& grad) const {
  grad.weight.noalias() += d_y * x.transpose();
  grad.bias += d_y.rowwise().sum();
  return weight.transpose() * d_y;
}

template <typename T>
void Affine<T>::collect(ParamList<T>& out, const std::string& prefix) {
  out.push_back({join(prefix, "weight"), &weight});
  out.push_back({join(prefix, "bias"), &bias});
}

// --------------------------------------------------------------------- LSTM

template <typename T>
LstmCell<T>::LstmCell(std::size_t input_dim, std::size_t hidden_dim) {
  const auto h = static_cast<Eigen::Index>(hidden_dim);
  w_input = Mat<T>::Zero(4 * h, static_cast<Eigen::Index>(input_dim));
  w_recurrent = Mat<T>::Zero(4 * h, h);
  bias = Mat<T>::Zero(4 * h, 1);
}

template <typename T>
typename LstmCell<T>::Trace LstmCell<T>::run(const Mat<T>& inputs,
                                             const Vec<T>& h0,
                                             const Vec<T>& c0) const {
  if (inputs.rows() != w_input.cols()) {
    throw DimensionMismatch("LSTM input has " + std::to_string(inputs.rows()) +
                            " rows, expected " +
                            std::to_string(w_input.cols()));
  }
  const Eigen::Index h = w_recurrent.cols();
  const Eigen::Index steps = inputs.cols();
  Trace tr;
  tr.inputs = inputs;
  tr.gates.resize(4 * h, steps);
  tr.cells.resize(h, steps + 1);
  tr.hiddens.resize(h, steps + 1);
  tr.cells.col(0) = c0;
  tr.hiddens.col(0) = h0;

  Mat<T> pre = w_input * inputs;
  pre.colwise() += bias.col(0);
  Vec<T> g(4 * h);
  for (Eigen::Index t = 0; t < steps; ++t) {
    g.noalias() = w_recurrent * tr.hiddens.col(t);
    g += pre.col(t);
    auto gates = tr.gates.col(t);
    gates.segment(0, h) = sigmoid(g.segment(0, h).array()).matrix();
    gates.segment(h, h) = sigmoid(g.segment(h, h).array()).matrix();
    gates.segment(2 * h, h) = g.segment(2 * h, h).array().tanh().matrix();
    gates.segment(3 * h, h) = sigmoid(g.segment(3 * h, h).array()).matrix();
    tr.cells.col(t + 1) =
        gates.segment(h, h).cwiseProduct(tr.cells.col(t)) +
        gates.segment(0, h).cwiseProduct(gates.segment(2 * h, h));
    tr.hiddens.col(t + 1) =
        gates.segment(3 * h, h).cwiseProduct(
            tr.cells.col(t + 1).array().tanh().matrix());
  }
  return tr;
}

template <typename T>
typename LstmCell<T>::State LstmCell<T>::step(const Vec<T>& input,
                                              const State& prev) const {
  const Eigen::Index h = w_recurrent.cols();
  Vec<T> g = w_input * input + w_recurrent * prev.h + bias.col(0);
  auto i = sigmoid(g.segment(0, h).array());
  auto f = sigmoid(g.segment(h, h).array());
  auto cand = g.segment(2 * h, h).array().tanh();
  auto o = sigmoid(g.segment(3 * h, h).array());
  State next;
  next.c = (f * prev.c.array() + i * cand).matrix();
  next.h = (o * next.c.array().tanh()).matrix();
  return next;
}

template <typename T>
typename LstmCell<T>::InputGrads LstmCell<T>::backward(
    const Trace& tr, const Mat<T>& d_hidden, const Vec<T>& d_h_last,
    const Vec<T>& d_c_last, LstmCell& grad) const {
  const Eigen::Index h = w_recurrent.cols();
  const Eigen::Index steps = tr.inputs.cols();
  Mat<T> d_gates(4 * h, steps);
  Vec<T> dh_next = d_h_last;
  Vec<T> dc_next = d_c_last;
  for (Eigen::Index t = steps - 1; t >= 0; --t) {
    auto gates = tr.gates.col(t);
    auto i = gates.segment(0, h).array();
    auto f = gates.segment(h, h).array();
    auto cand = gates.segment(2 * h, h).array();
    auto o = gates.segment(3 * h, h).array();
    Eigen::Array<T, Eigen::Dynamic, 1> tc = tr.cells.col(t + 1).array().tanh();
    Eigen::Array<T, Eigen::Dynamic, 1> dh =
        d_hidden.col(t).array() + dh_next.array();
    Eigen::Array<T, Eigen::Dynamic, 1> dc =
        dc_next.array() + dh * o * (T(1) - tc.square());
    auto dg = d_gates.col(t);
    dg.segment(0, h) = (dc * cand * i * (T(1) - i)).matrix();
    dg.segment(h, h) =
        (dc * tr.cells.col(t).array() * f * (T(1) - f)).matrix();
    dg.segment(2 * h, h) = (dc * i * (T(1) - cand.square())).matrix();
    dg.segment(3 * h, h) = (dh * tc * o * (T(1) - o)).matrix();
    dc_next = (dc * f).matrix();
    dh_next.noalias() = w_recurrent.transpose() * dg;
  }
  grad.w_input.noalias() += d_gates * tr.inputs.transpose();
  grad.w_recurrent.noalias() +=
      d_gates * tr.hiddens.leftCols(steps).transpose();
  grad.bias += d_gates.rowwise().sum();
  return {w_input.transpose() * d_gates, dh_next, dc_next};
}

template <typename T>
void LstmCell<T>::collect(ParamList<T>& out, const std::string& prefix) {
  out.push_back({join(prefix, "w_input"), &w_input});
  out.push_back({join(prefix, "w_recurrent"), &w_recurrent});
  out.push_back({join(prefix, "bias"), &bias});
}

// ---------------------------------------------------------------- BiLSTM

template <typename T>
BiLstmEncoder<T>::BiLstmEncoder(std::size_t input_dim, std::size_t hidden_dim,
                                std::size_t num_layers) {
  for (std::size_t l = 0; l < num_layers; ++l) {
    std::size_t in = l == 0 ? input_dim : 2 * hidden_dim;
    layers.push_back({LstmCell<T>(in, hidden_dim), LstmCell<T>(in, hidden_dim)});
  }
}

template <typename T>
typename BiLstmEncoder<T>::Output BiLstmEncoder<T>::forward(
    const Mat<T>& inputs, Trace* trace, const DropoutContext* dropout) const {
  if (inputs.cols() == 0) {
    throw EmptySequenceError("cannot encode an empty sequence");
  }
  const auto h = static_cast<Eigen::Index>(hidden_dim());
  const Vec<T> zero = Vec<T>::Zero(h);
  Output out;
  Mat<T> layer_input = inputs;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    if (l > 0 && dropout != nullptr) {
      Mat<T> mask = dropout_mask<T>(layer_input.rows(), layer_input.cols(), *dropout);
      layer_input = layer_input.cwiseProduct(mask);
      if (trace) trace->masks.push_back(std::move(mask));
    } else if (trace) {
      trace->masks.emplace_back();
    }
    auto fwd = layers[l].forward.run(layer_input, zero, zero);
    auto bwd = layers[l].backward.run(reverse_columns(layer_input), zero, zero);
    const Eigen::Index steps = layer_input.cols();
    Mat<T> states(2 * h, steps);
    states.topRows(h) = fwd.hiddens.rightCols(steps);
    states.bottomRows(h) = reverse_columns<T>(bwd.hiddens.rightCols(steps));
    Vec<T> fh(2 * h), fc(2 * h);
    fh << fwd.hiddens.col(steps), bwd.hiddens.col(steps);
    fc << fwd.cells.col(steps), bwd.cells.col(steps);
    out.final_h.push_back(std::move(fh));
    out.final_c.push_back(std::move(fc));
    if (trace) {
      trace->fwd.push_back(std::move(fwd));
      trace->bwd.push_back(std::move(bwd));
    }
    layer_input = std::move(states);
  }
  out.states = std::move(layer_input);
  return out;
}

template <typename T>
Mat<T> BiLstmEncoder<T>::backward(const Trace& trace, const Mat<T>& d_states,
                                  const std::vector<Vec<T>>& d_final_h,
                                  const std::vector<Vec<T>>& d_final_c,
                                  BiLstmEncoder& grad) const {
  const auto h = static_cast<Eigen::Index>(hidden_dim());
  Mat<T> d_out = d_states;
  for (std::size_t l = layers.size(); l-- > 0;) {
    auto rf = layers[l].forward.backward(trace.fwd[l], d_out.topRows(h),
                                         d_final_h[l].head(h),
                                         d_final_c[l].head(h),
                                         grad.layers[l].forward);
    auto rb = layers[l].backward.backward(
        trace.bwd[l], reverse_columns<T>(d_out.bottomRows(h)),
        d_final_h[l].tail(h), d_final_c[l].tail(h), grad.layers[l].backward);
    Mat<T> d_in = rf.d_inputs + reverse_columns(rb.d_inputs);
    if (l > 0 && trace.masks[l].size() > 0) d_in = d_in.cwiseProduct(trace.masks[l]);
    d_out = std::move(d_in);
  }
  return d_out;
}

template <typename T>
void BiLstmEncoder<T>::collect(ParamList<T>& out, const std::string& prefix) {
  for (std::size_t l = 0; l < layers.size(); ++l) {
    std::string p = join(prefix, ("layer" + std::to_string(l)).c_str());
    layers[l].forward.collect(out, p + ".fwd");
    layers[l].backward.collect(out, p + ".bwd");
  }
}

// ------------------------------------------------------------------ Fusion

template <typename T>
Fusion<T>::Fusion(std::size_t num_encoders, std::size_t encoder_dim,
                  std::size_t decoder_dim, std::size_t num_layers) {
  for (std::size_t l = 0; l < num_layers; ++l) {
    hidden.emplace_back(num_encoders * encoder_dim, decoder_dim);
    cell.emplace_back(num_encoders * encoder_dim, decoder_dim);
  }
}

template <typename T>
Vec<T> Fusion<T>::concat(const std::vector<std::vector<Vec<T>>>& finals,
                         std::size_t layer) {
  Eigen::Index total = 0;
  for (const auto& enc : finals) total += enc.at(layer).size();
  Vec<T> out(total);
  Eigen::Index at = 0;
  for (const auto& enc : finals) {
    out.segment(at, enc[layer].size()) = enc[layer];
    at += enc[layer].size();
  }
  return out;
}

template <typename T>
typename Fusion<T>::Output Fusion<T>::forward(
    const std::vector<std::vector<Vec<T>>>& final_h,
    const std::vector<std::vector<Vec<T>>>& final_c) const {
  if (final_h.empty() || final_h.size() != final_c.size()) {
    throw DimensionMismatch("fusion needs one (h, c) pair per encoder");
  }
  Output out;
  for (std::size_t l = 0; l < hidden.size(); ++l) {
    Vec<T> hc = concat(final_h, l);
    Vec<T> cc = concat(final_c, l);
    if (hc.size() != hidden[l].weight.cols() || cc.size() != cell[l].weight.cols()) {
      throw DimensionMismatch("fusion input dimension " +
                              std::to_string(hc.size()) + ", expected " +
                              std::to_string(hidden[l].weight.cols()));
    }
    out.h.push_back(hidden[l].forward(hc));
    out.c.push_back(cell[l].forward(cc));
  }
  return out;
}

template <typename T>
std::pair<std::vector<std::vector<Vec<T>>>, std::vector<std::vector<Vec<T>>>>
Fusion<T>::backward(const std::vector<std::vector<Vec<T>>>& final_h,
                    const std::vector<std::vector<Vec<T>>>& final_c,
                    const std::vector<Vec<T>>& d_h,
                    const std::vector<Vec<T>>& d_c, Fusion& grad) const {
  const std::size_t n = final_h.size();
  std::vector<std::vector<Vec<T>>> gh(n), gc(n);
  for (std::size_t l = 0; l < hidden.size(); ++l) {
    Vec<T> dhc = hidden[l].backward(concat(final_h, l), d_h[l], grad.hidden[l]);
    Vec<T> dcc = cell[l].backward(concat(final_c, l), d_c[l], grad.cell[l]);
    Eigen::Index at = 0;
    for (std::size_t k = 0; k < n; ++k) {
      Eigen::Index sz = final_h[k][l].size();
      gh[k].push_back(dhc.segment(at, sz));
      gc[k].push_back(dcc.segment(at, sz));
      at += sz;
    }
  }
  return {std::move(gh), std::move(gc)};
}

template <typename T>
void Fusion<T>::collect(ParamList<T>& out, const std::string& prefix) {
  for (std::size_t l = 0; l < hidden.size(); ++l) {
    std::string p = join(prefix, ("layer" + std::to_string(l)).c_str());
    hidden[l].collect(out, p + ".h");
    cell[l].collect(out, p + ".c");
  }
}

// --------------------------------------------------------------- Attention

template <typename T>
Attention<T>::Attention(std::size_t encoder_dim, std::size_t decoder_dim)
    : score(Mat<T>::Zero(static_cast<Eigen::Index>(decoder_dim),
                         static_cast<Eigen::Index>(encoder_dim))),
      output(encoder_dim + decoder_dim, decoder_dim) {}

template <typename T>
std::pair<Vec<T>, Vec<T>> Attention<T>::attend(
    const Vec<T>& decoder_state, const Mat<T>& encoder_states) const {
  if (encoder_states.cols() == 0) {
    throw EmptySequenceError("attention needs at least one position");
  }
  Vec<T> query = score.transpose() * decoder_state;
  Mat<T> scores = encoder_states.transpose() * query;
  Vec<T> weights = softmax_columns<T>(scores).col(0);
  Vec<T> context = encoder_states * weights;
  return {std::move(context), std::move(weights)};
}

template <typename T>
Mat<T> Attention<T>::forward(const Mat<T>& encoder_states,
                             const Mat<T>& decoder_states, Trace& tr) const {
  tr.queries = score.transpose() * decoder_states;
  tr.weights = softmax_columns<T>(encoder_states.transpose() * tr.queries);
  tr.contexts = encoder_states * tr.weights;
  tr.joined.resize(tr.contexts.rows() + decoder_states.rows(),
                   decoder_states.cols());
  tr.joined << tr.contexts, decoder_states;
  tr.attentional = output.forward(tr.joined).array().tanh().matrix();
  return tr.attentional;
}

template <typename T>
typename Attention<T>::Grads Attention<T>::backward(
    const Trace& tr, const Mat<T>& encoder_states, const Mat<T>& decoder_states,
    const Mat<T>& d_attentional, const Mat<T>& d_weights_extra,
    const Mat<T>& d_context_extra, Attention& grad) const {
  const Eigen::Index ce = tr.contexts.rows();
  Mat<T> d_pre =
      d_attentional.cwiseProduct((T(1) - tr.attentional.array().square()).matrix());
  Mat<T> d_joined = output.backward(tr.joined, d_pre, grad.output);
  Mat<T> d_context = d_joined.topRows(ce);
  if (d_context_extra.size() > 0) d_context += d_context_extra;
  Grads g;
  g.d_decoder = d_joined.bottomRows(d_joined.rows() - ce);
  g.d_encoder = d_context * tr.weights.transpose();
  Mat<T> d_weights = encoder_states.transpose() * d_context;
  if (d_weights_extra.size() > 0) d_weights += d_weights_extra;
  Mat<T> d_scores = tr.weights.cwiseProduct(d_weights);
  Eigen::Matrix<T, 1, Eigen::Dynamic> col_sums = d_scores.colwise().sum();
  d_scores -= tr.weights * col_sums.asDiagonal();
  g.d_encoder.noalias() += tr.queries * d_scores.transpose();
  Mat<T> d_queries = encoder_states * d_scores;
  grad.score.noalias() += decoder_states * d_queries.transpose();
  g.d_decoder.noalias() += score * d_queries;
  return g;
}

template <typename T>
void Attention<T>::collect(ParamList<T>& out, const std::string& prefix) {
  out.push_back({join(prefix, "score"), &score});
  output.collect(out, join(prefix, "output"));
}

// ----------------------------------------------------------------- Copy

template <typename T>
CopyGate<T>::CopyGate(std::size_t context_dim, std::size_t state_dim,
                      std::size_t input_dim)
    : gate(context_dim + state_dim + input_dim, 1) {}

template <typename T>
Mat<T> CopyGate<T>::forward(const Mat<T>& features) const {
  return sigmoid(gate.forward(features).array()).matrix();
}

template <typename T>
Mat<T> CopyGate<T>::backward(const Mat<T>& features, const Mat<T>& p_gen,
                             const Mat<T>& d_p, CopyGate& grad) const {
  Mat<T> d_z =
      d_p.cwiseProduct(p_gen.cwiseProduct((T(1) - p_gen.array()).matrix()));
  return gate.backward(features, d_z, grad.gate);
}

template <typename T>
void CopyGate<T>::collect(ParamList<T>& out, const std::string& prefix) {
  gate.collect(out, join(prefix, "gate"));
}

template <typename T>
Vec<T> copy_distribution(const Vec<T>& vocab_logits, T p_gen,
                         const Vec<T>& attention_weights,
                         std::span<const int> source_ids,
                         std::size_t extended_size) {
  if (static_cast<std::size_t>(attention_weights.size()) != source_ids.size()) {
    throw DimensionMismatch("attention weights and source ids differ in length");
  }
  if (extended_size < static_cast<std::size_t>(vocab_logits.size())) {
    throw DimensionMismatch("extended vocabulary smaller than the vocabulary");
  }
  Vec<T> out = Vec<T>::Zero(static_cast<Eigen::Index>(extended_size));
  out.head(vocab_logits.size()) =
      p_gen * log_softmax<T>(vocab_logits).array().exp().matrix();
  for (std::size_t i = 0; i < source_ids.size(); ++i) {
    int id = source_ids[i];
    if (id < 0 || static_cast<std::size_t>(id) >= extended_size) {
      throw DimensionMismatch("source id out of the extended vocabulary");
    }
    out(id) += (T(1) - p_gen) * attention_weights(static_cast<Eigen::Index>(i));
  }
  return out;
}

GradCheckReport grad_check(const std::function<double()>& loss,
                           std::span<const GradCheckTensor> tensors,
                           double epsilon, std::size_t max_per_tensor,
                           std::uint64_t seed) {
  GradCheckReport report;
  Rng rng(seed);
  auto finite = [](double v) { return std::isfinite(v); };
  for (const auto& t : tensors) {
    const auto size = static_cast<std::size_t>(t.value->size());
    if (t.gradient->size() != t.value->size()) {
      throw DimensionMismatch("gradient shape differs for " + t.name);
    }
    std::vector<std::size_t> coords;
    if (max_per_tensor == 0 || size <= max_per_tensor) {
      for (std::size_t i = 0; i < size; ++i) coords.push_back(i);
    } else {
      for (std::size_t i = 0; i < max_per_tensor; ++i) {
        coords.push_back(uniform_index(rng, size));
      }
    }
    for (std::size_t i : coords) {
      double& x = t.value->data()[i];
      const double saved = x;
      x = saved + epsilon;
      double up = loss();
      x = saved - epsilon;
      double down = loss();
      x = saved;
      double numeric = (up - down) / (2 * epsilon);
      double analytic = t.gradient->data()[i];
      if (!finite(up) || !finite(down) || !finite(analytic)) {
        throw NonFiniteError("non-finite value while checking " + t.name);
      }
      double denom = std::max({std::abs(analytic), std::abs(numeric),
                               kGradCheckFloor});
      double rel = std::abs(analytic - numeric) / denom;
      ++report.coordinates;
      if (rel > report.max_relative_error) {
        report.max_relative_error = rel;
        report.worst = t.name + "[" + std::to_string(i) + "]";
      }
    }
  }
  return report;
}

#define LEMMA_NAMER_INSTANTIATE(T)                                           \
  template struct DenseArray<T>;                                             \
  template void init_uniform<T>(const ParamList<T>&, Rng&, double, double);  \
  template Mat<T> dropout_mask<T>(Eigen::Index, Eigen::Index,                \
                                  const DropoutContext&);                    \
  template Mat<T> softmax_columns<T>(const Mat<T>&);                         \
  template Vec<T> log_softmax<T>(const Vec<T>&);                             \
  template struct Embedding<T>;                                              \
  template struct Affine<T>;                                                 \
  template struct LstmCell<T>;                                               \
  template struct BiLstmEncoder<T>;                                          \
  template struct Fusion<T>;                                                 \
  template struct Attention<T>;                                              \
  template struct CopyGate<T>;                                               \
  template Vec<T> copy_distribution<T>(const Vec<T>&, T, const Vec<T>&,      \
                                       std::span<const int>, std::size_t);

LEMMA_NAMER_INSTANTIATE(float)
LEMMA_NAMER_INSTANTIATE(double)

#undef LEMMA_NAMER_INSTANTIATE

}  // namespace lemma_namer::nnet
