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

#include "lemma_namer/seq2seq.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace lemma_namer {

using nlohmann::json;

namespace {

constexpr std::string_view kNamePrefix = "ln-";

bool on_grid(std::size_t dim) { return dim == 200 || dim == 500 || dim == 1000; }

}  // namespace

ModelConfig ModelConfig::from_name(std::string_view name) {
  if (name.starts_with(kNamePrefix)) name.remove_prefix(kNamePrefix.size());
  ModelConfig config;
  config.inputs.clear();
  std::size_t start = 0;
  while (start <= name.size()) {
    std::size_t end = name.find('+', start);
    if (end == std::string_view::npos) end = name.size();
    std::string_view part = name.substr(start, end - start);
    if (part == "attn") {
      if (config.use_attention) throw ConfigError("duplicate 'attn'");
      config.use_attention = true;
    } else if (part == "copy") {
      if (config.use_copy) throw ConfigError("duplicate 'copy'");
      config.use_copy = true;
    } else if (auto kind = input_kind_from_name(part)) {
      if (config.use_attention || config.use_copy) {
        throw ConfigError("inputs must precede 'attn' and 'copy'");
      }
      if (std::find(config.inputs.begin(), config.inputs.end(), *kind) !=
          config.inputs.end()) {
        throw ConfigError("duplicate input '" + std::string(part) + "'");
      }
      config.inputs.push_back(*kind);
    } else {
      throw ConfigError("unknown model component '" + std::string(part) + "'");
    }
    start = end + 1;
  }
  config.validate();
  return config;
}

std::string ModelConfig::name() const {
  std::string out(kNamePrefix);
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (i > 0) out += '+';
    out += input_kind_name(inputs[i]);
  }
  if (use_attention) out += "+attn";
  if (use_copy) out += "+copy";
  return out;
}

void ModelConfig::validate(bool require_grid) const {
  if (inputs.empty()) throw ConfigError("a model needs at least one input");
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (inputs[i] == inputs[j]) throw ConfigError("duplicate model input");
    }
  }
  if (use_copy && !use_attention) {
    throw ConfigError("the copy mechanism requires attention");
  }
  if (embedding_dim == 0 || hidden_units == 0 || num_layers == 0) {
    throw ConfigError("model dimensions must be positive");
  }
  if (!(dropout >= 0 && dropout < 1)) {
    throw ConfigError("dropout must lie in [0, 1)");
  }
  if (beam_size == 0) throw ConfigError("beam size must be positive");
  if (max_decode_len < 1) throw ConfigError("max_decode_len must be positive");
  if (max_input_len < 1) throw ConfigError("max_input_len must be positive");
  if (require_grid) {
    if (!on_grid(embedding_dim) || !on_grid(hidden_units)) {
      throw ConfigError("embedding and hidden sizes must be 200, 500 or 1000");
    }
    if (num_layers > 3) throw ConfigError("num_layers must be 1, 2 or 3");
  }
}

json ModelConfig::to_json() const {
  json in = json::array();
  for (InputKind k : inputs) in.push_back(std::string(input_kind_name(k)));
  return {{"inputs", in},
          {"embedding_dim", embedding_dim},
          {"hidden_units", hidden_units},
          {"num_layers", num_layers},
          {"dropout", dropout},
          {"use_attention", use_attention},
          {"use_copy", use_copy},
          {"beam_size", beam_size},
          {"max_decode_len", max_decode_len},
          {"max_input_len", max_input_len},
          {"length_normalization", length_normalization}};
}

ModelConfig ModelConfig::from_json(const json& j) {
  ModelConfig c;
  try {
    c.inputs.clear();
    for (const auto& n : j.at("inputs")) {
      auto kind = input_kind_from_name(n.get<std::string>());
      if (!kind) throw ConfigError("unknown input " + n.dump());
      c.inputs.push_back(*kind);
    }
    c.embedding_dim = j.at("embedding_dim").get<std::size_t>();
    c.hidden_units = j.at("hidden_units").get<std::size_t>();
    c.num_layers = j.at("num_layers").get<std::size_t>();
    c.dropout = j.at("dropout").get<double>();
    c.use_attention = j.at("use_attention").get<bool>();
    c.use_copy = j.at("use_copy").get<bool>();
    c.beam_size = j.at("beam_size").get<std::size_t>();
    c.max_decode_len = j.at("max_decode_len").get<std::size_t>();
    c.max_input_len = j.at("max_input_len").get<std::size_t>();
    c.length_normalization = j.value("length_normalization", false);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad model config: ") + e.what());
  }
  c.validate();
  return c;
}

EncodedExample encode_example(const ProcessedRecord& record,
                              const ModelConfig& config,
                              const Vocabularies& vocabs, bool with_target) {
  EncodedExample ex;
  const int v = static_cast<int>(vocabs.names.size());
  std::map<std::string, int, std::less<>> oov;
  for (InputKind kind : config.inputs) {
    const auto& tokens = record.input(kind);
    std::size_t len = std::min(tokens.size(), config.max_input_len);
    if (len < tokens.size()) ex.truncated = true;
    std::vector<int> ids;
    if (len == 0) {
      ids.push_back(Vocab::kPad);
      ex.source_ids.push_back(Vocab::kPad);
    }
    for (std::size_t i = 0; i < len; ++i) {
      const std::string& tok = tokens[i];
      ids.push_back(vocabs.inputs.id_of(tok));
      if (vocabs.names.contains(tok)) {
        ex.source_ids.push_back(vocabs.names.id_of(tok));
        continue;
      }
      auto [it, fresh] =
          oov.emplace(tok, v + static_cast<int>(ex.oov_tokens.size()));
      if (fresh) ex.oov_tokens.push_back(tok);
      ex.source_ids.push_back(it->second);
    }
    ex.inputs.push_back(std::move(ids));
  }
  if (!with_target) return ex;
  ex.decoder_inputs.push_back(Vocab::kBos);
  for (const auto& tok : record.name_subtokens) {
    int id = vocabs.names.id_of(tok);
    if (id == Vocab::kUnk && !vocabs.names.contains(tok) && config.use_copy) {
      auto it = oov.find(tok);
      if (it != oov.end()) id = it->second;
    }
    ex.targets.push_back(id);
    ex.decoder_inputs.push_back(id);
  }
  ex.targets.push_back(Vocab::kEos);
  return ex;
}

template <typename T>
Seq2Seq<T>::Seq2Seq(const ModelConfig& config, std::size_t input_vocab_size,
                    std::size_t name_vocab_size)
    : config_(config),
      input_vocab_size_(input_vocab_size),
      name_vocab_size_(name_vocab_size) {
  config_.validate();
  build();
}

template <typename T>
void Seq2Seq<T>::build() {
  const std::size_t e = config_.embedding_dim;
  const std::size_t h = config_.hidden_units;
  const std::size_t layers = config_.num_layers;
  const std::size_t n = config_.inputs.size();
  input_embedding_ = nnet::Embedding<T>(input_vocab_size_, e);
  name_embedding_ = nnet::Embedding<T>(name_vocab_size_, e);
  encoders_.assign(n, nnet::BiLstmEncoder<T>(e, h, layers));
  fusion_ = nnet::Fusion<T>(n, 2 * h, h, layers);
  decoder_.clear();
  for (std::size_t l = 0; l < layers; ++l) {
    decoder_.emplace_back(l == 0 ? e : h, h);
  }
  if (config_.use_attention) attention_ = nnet::Attention<T>(2 * h, h);
  generator_ = nnet::Affine<T>(h, name_vocab_size_);
  if (config_.use_copy) copy_ = nnet::CopyGate<T>(2 * h, h, e);
}

template <typename T>
nnet::ParamList<T> Seq2Seq<T>::parameters() {
  nnet::ParamList<T> out;
  input_embedding_.collect(out, "input_embedding");
  name_embedding_.collect(out, "name_embedding");
  for (std::size_t k = 0; k < encoders_.size(); ++k) {
    encoders_[k].collect(
        out, "encoder." + std::string(input_kind_name(config_.inputs[k])));
  }
  fusion_.collect(out, "fusion");
  for (std::size_t l = 0; l < decoder_.size(); ++l) {
    decoder_[l].collect(out, "decoder.layer" + std::to_string(l));
  }
  if (config_.use_attention) attention_.collect(out, "attention");
  generator_.collect(out, "generator");
  if (config_.use_copy) copy_.collect(out, "copy");
  return out;
}

template <typename T>
void Seq2Seq<T>::init(std::uint64_t seed) {
  Rng rng(seed);
  nnet::init_uniform(parameters(), rng);
}

template <typename T>
void Seq2Seq<T>::set_zero() {
  for (auto& p : parameters()) p.value->setZero();
}

template <typename T>
double Seq2Seq<T>::forward_backward(const EncodedExample& ex, Seq2Seq* grad,
                                    const nnet::DropoutContext* dropout,
                                    ForwardTrace* trace) const {
  const std::size_t steps = ex.targets.size();
  if (steps == 0 || ex.decoder_inputs.size() != steps) {
    throw std::invalid_argument("example has no reference name");
  }
  if (steps > config_.max_decode_len) {
    throw ReferenceTooLong("reference needs " + std::to_string(steps) +
                           " decoder steps; max_decode_len is " +
                           std::to_string(config_.max_decode_len));
  }
  if (ex.inputs.size() != encoders_.size()) {
    throw nnet::DimensionMismatch("example has the wrong number of inputs");
  }
  const auto h = static_cast<Eigen::Index>(config_.hidden_units);
  const auto e = static_cast<Eigen::Index>(config_.embedding_dim);
  const auto t_len = static_cast<Eigen::Index>(steps);
  const int v = static_cast<int>(name_vocab_size_);
  const std::size_t n = encoders_.size();
  const std::size_t layers = decoder_.size();

  // Encoders.
  std::vector<typename nnet::BiLstmEncoder<T>::Trace> enc_traces(n);
  std::vector<std::vector<Vec>> final_h(n), final_c(n);
  std::vector<Eigen::Index> offsets(n + 1, 0);
  std::vector<Mat> enc_states(n);
  for (std::size_t k = 0; k < n; ++k) {
    Mat x = input_embedding_.forward(ex.inputs[k]);
    auto out = encoders_[k].forward(x, grad ? &enc_traces[k] : nullptr, dropout);
    enc_states[k] = std::move(out.states);
    final_h[k] = std::move(out.final_h);
    final_c[k] = std::move(out.final_c);
    offsets[k + 1] = offsets[k] + enc_states[k].cols();
  }
  Mat enc(2 * h, offsets[n]);
  for (std::size_t k = 0; k < n; ++k) {
    enc.middleCols(offsets[k], enc_states[k].cols()) = enc_states[k];
  }
  if (config_.use_copy &&
      static_cast<Eigen::Index>(ex.source_ids.size()) != enc.cols()) {
    throw nnet::DimensionMismatch("source ids do not align with positions");
  }
  auto init = fusion_.forward(final_h, final_c);

  // Decoder under teacher forcing; extended ids enter as UNK.
  std::vector<int> dec_ids(ex.decoder_inputs);
  for (int& id : dec_ids) {
    if (id >= v) id = Vocab::kUnk;
  }
  Mat y = name_embedding_.forward(dec_ids);
  std::vector<typename nnet::LstmCell<T>::Trace> dec_traces(layers);
  std::vector<Mat> dec_masks(layers);
  Mat layer_in = y;
  for (std::size_t l = 0; l < layers; ++l) {
    if (l > 0 && dropout) {
      dec_masks[l] = nnet::dropout_mask<T>(layer_in.rows(), layer_in.cols(), *dropout);
      layer_in = layer_in.cwiseProduct(dec_masks[l]);
    }
    dec_traces[l] = decoder_[l].run(layer_in, init.h[l], init.c[l]);
    layer_in = dec_traces[l].hiddens.rightCols(t_len);
  }
  const Mat top = std::move(layer_in);

  typename nnet::Attention<T>::Trace att;
  Mat attentional =
      config_.use_attention ? attention_.forward(enc, top, att) : top;
  Mat logits = generator_.forward(attentional);
  Mat probs = nnet::softmax_columns<T>(logits);

  Mat features, p_gen;
  if (config_.use_copy) {
    features.resize(2 * h + h + e, t_len);
    features << att.contexts, top, y;
    p_gen = copy_.forward(features);
  }

  // Loss.
  constexpr T kTiny = std::numeric_limits<T>::min();
  std::vector<T> mixture(steps, T(1)), copied(steps, T(0));
  double total = 0;
  if (trace) {
    trace->decoder_inputs = ex.decoder_inputs;
    trace->target_log_probs.clear();
  }
  for (std::size_t t = 0; t < steps; ++t) {
    const int target = ex.targets[t];
    const auto tc = static_cast<Eigen::Index>(t);
    double lp;
    if (config_.use_copy) {
      T s_y = target < v ? probs(target, tc) : T(0);
      T a_y = 0;
      for (std::size_t i = 0; i < ex.source_ids.size(); ++i) {
        if (ex.source_ids[i] == target) a_y += att.weights(static_cast<Eigen::Index>(i), tc);
      }
      T p = p_gen(0, tc);
      mixture[t] = std::max(p * s_y + (T(1) - p) * a_y, kTiny);
      copied[t] = a_y;
      lp = std::log(static_cast<double>(mixture[t]));
    } else {
      if (target >= v) throw nnet::DimensionMismatch("target outside vocabulary");
      Vec col = logits.col(tc);
      lp = static_cast<double>(nnet::log_softmax<T>(col)(target));
    }
    if (trace) trace->target_log_probs.push_back(lp);
    total -= lp;
  }
  const double loss = total / static_cast<double>(steps);
  if (grad == nullptr) return loss;

  // Backward.
  const T g = T(1) / static_cast<T>(steps);
  Mat d_logits = Mat::Zero(logits.rows(), t_len);
  Mat d_weights, d_p;
  if (config_.use_copy) {
    d_weights = Mat::Zero(enc.cols(), t_len);
    d_p = Mat::Zero(1, t_len);
  }
  for (std::size_t t = 0; t < steps; ++t) {
    const int target = ex.targets[t];
    const auto tc = static_cast<Eigen::Index>(t);
    if (!config_.use_copy) {
      d_logits.col(tc) = g * probs.col(tc);
      d_logits(target, tc) -= g;
      continue;
    }
    const T p = p_gen(0, tc);
    const T coef = -g / mixture[t];
    const T s_y = target < v ? probs(target, tc) : T(0);
    if (target < v) {
      d_logits.col(tc) = -coef * p * s_y * probs.col(tc);
      d_logits(target, tc) += coef * p * s_y;
    }
    d_p(0, tc) = coef * (s_y - copied[t]);
    for (std::size_t i = 0; i < ex.source_ids.size(); ++i) {
      if (ex.source_ids[i] == target) {
        d_weights(static_cast<Eigen::Index>(i), tc) += coef * (T(1) - p);
      }
    }
  }
  Mat d_attentional = generator_.backward(attentional, d_logits, grad->generator_);
  Mat d_top = Mat::Zero(h, t_len);
  Mat d_y = Mat::Zero(e, t_len);
  Mat d_context;
  if (config_.use_copy) {
    Mat d_features = copy_.backward(features, p_gen, d_p, grad->copy_);
    d_context = d_features.topRows(2 * h);
    d_top += d_features.middleRows(2 * h, h);
    d_y += d_features.bottomRows(e);
  }
  Mat d_enc;
  if (config_.use_attention) {
    auto ag = attention_.backward(att, enc, top, d_attentional, d_weights,
                                  d_context, grad->attention_);
    d_enc = std::move(ag.d_encoder);
    d_top += ag.d_decoder;
  } else {
    d_top += d_attentional;
    d_enc = Mat::Zero(2 * h, enc.cols());
  }

  std::vector<Vec> d_h0(layers), d_c0(layers);
  const Vec zero = Vec::Zero(h);
  Mat d_out = std::move(d_top);
  for (std::size_t l = layers; l-- > 0;) {
    auto ig = decoder_[l].backward(dec_traces[l], d_out, zero, zero,
                                   grad->decoder_[l]);
    d_h0[l] = std::move(ig.d_h0);
    d_c0[l] = std::move(ig.d_c0);
    d_out = std::move(ig.d_inputs);
    if (l > 0 && dec_masks[l].size() > 0) d_out = d_out.cwiseProduct(dec_masks[l]);
  }
  d_y += d_out;
  name_embedding_.backward(dec_ids, d_y, grad->name_embedding_);

  auto [g_h, g_c] = fusion_.backward(final_h, final_c, d_h0, d_c0, grad->fusion_);
  for (std::size_t k = 0; k < n; ++k) {
    Mat d_states = d_enc.middleCols(offsets[k], offsets[k + 1] - offsets[k]);
    Mat d_x = encoders_[k].backward(enc_traces[k], d_states, g_h[k], g_c[k],
                                    grad->encoders_[k]);
    input_embedding_.backward(ex.inputs[k], d_x, grad->input_embedding_);
  }
  return loss;
}

template <typename T>
typename Seq2Seq<T>::Encoded Seq2Seq<T>::encode(const EncodedExample& ex,
                                                DecoderState* initial) const {
  if (ex.inputs.size() != encoders_.size()) {
    throw nnet::DimensionMismatch("example has the wrong number of inputs");
  }
  const auto h = static_cast<Eigen::Index>(config_.hidden_units);
  const std::size_t n = encoders_.size();
  std::vector<std::vector<Vec>> final_h(n), final_c(n);
  std::vector<Mat> states(n);
  Eigen::Index total = 0;
  for (std::size_t k = 0; k < n; ++k) {
    auto out = encoders_[k].forward(input_embedding_.forward(ex.inputs[k]));
    states[k] = std::move(out.states);
    final_h[k] = std::move(out.final_h);
    final_c[k] = std::move(out.final_c);
    total += states[k].cols();
  }
  Encoded enc;
  enc.states.resize(2 * h, total);
  Eigen::Index at = 0;
  for (auto& s : states) {
    enc.states.middleCols(at, s.cols()) = s;
    at += s.cols();
  }
  enc.source_ids = ex.source_ids;
  enc.extended_size =
      name_vocab_size_ + (config_.use_copy ? ex.oov_tokens.size() : 0);
  if (initial) {
    auto init = fusion_.forward(final_h, final_c);
    initial->h = std::move(init.h);
    initial->c = std::move(init.c);
  }
  return enc;
}

template <typename T>
typename Seq2Seq<T>::Vec Seq2Seq<T>::step(const Encoded& enc,
                                          DecoderState& state,
                                          int input_id) const {
  if (input_id < 0) throw nnet::DimensionMismatch("negative decoder input");
  const int id = input_id >= static_cast<int>(name_vocab_size_) ? Vocab::kUnk
                                                               : input_id;
  const Vec x = name_embedding_.table.col(id);
  Vec input = x;
  for (std::size_t l = 0; l < decoder_.size(); ++l) {
    auto next = decoder_[l].step(input, {state.h[l], state.c[l]});
    state.h[l] = next.h;
    state.c[l] = std::move(next.c);
    input = std::move(next.h);
  }
  const Vec& top = state.h.back();
  if (!config_.use_attention) {
    return nnet::log_softmax<T>(Vec(generator_.forward(top)));
  }
  auto [context, weights] = attention_.attend(top, enc.states);
  Vec joined(context.size() + top.size());
  joined << context, top;
  Vec attentional = attention_.output.forward(joined).array().tanh().matrix();
  Vec logits = generator_.forward(attentional);
  if (!config_.use_copy) return nnet::log_softmax<T>(logits);
  Vec features(context.size() + top.size() + x.size());
  features << context, top, x;
  const T p = copy_.forward(features)(0, 0);
  Vec dist = nnet::copy_distribution<T>(logits, p, weights, enc.source_ids,
                                        enc.extended_size);
  return dist.array().log().matrix();
}

template class Seq2Seq<float>;
template class Seq2Seq<double>;

}  // namespace lemma_namer
