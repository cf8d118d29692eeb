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

#include "lemma_namer/trainer.h"

#include <cmath>
#include <numeric>

namespace lemma_namer {

using nlohmann::json;

void TrainConfig::validate() const {
  if (!(learning_rate > 0)) throw ConfigError("learning rate must be positive");
  if (patience < 1) throw ConfigError("patience must be at least 1");
  if (checkpoint_interval < 1) throw ConfigError("checkpoint_interval must be positive");
  if (batch_size < 1) throw ConfigError("batch_size must be positive");
  if (clip_norm < 0) throw ConfigError("clip_norm must be non-negative");
}

json TrainConfig::to_json() const {
  return {{"learning_rate", learning_rate},
          {"beta1", beta1},
          {"beta2", beta2},
          {"epsilon", epsilon},
          {"checkpoint_interval", checkpoint_interval},
          {"patience", patience},
          {"max_steps", max_steps},
          {"batch_size", batch_size},
          {"seed", seed},
          {"clip_norm", clip_norm}};
}

TrainConfig TrainConfig::from_json(const json& j) {
  TrainConfig c;
  try {
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.beta1 = j.value("beta1", c.beta1);
    c.beta2 = j.value("beta2", c.beta2);
    c.epsilon = j.value("epsilon", c.epsilon);
    c.checkpoint_interval = j.value("checkpoint_interval", c.checkpoint_interval);
    c.patience = j.value("patience", c.patience);
    c.max_steps = j.value("max_steps", c.max_steps);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.seed = j.value("seed", c.seed);
    c.clip_norm = j.value("clip_norm", c.clip_norm);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad train config: ") + e.what());
  }
  c.validate();
  return c;
}

void Adam::update(const nnet::ParamList<float>& params,
                  const nnet::ParamList<float>& grads) {
  if (m_.empty()) {
    for (const auto& p : params) {
      m_.push_back(nnet::Mat<float>::Zero(p.value->rows(), p.value->cols()));
      v_.push_back(nnet::Mat<float>::Zero(p.value->rows(), p.value->cols()));
    }
  }
  ++t_;
  const auto b1 = static_cast<float>(config_.beta1);
  const auto b2 = static_cast<float>(config_.beta2);
  const auto step = static_cast<float>(
      config_.learning_rate *
      std::sqrt(1 - std::pow(config_.beta2, static_cast<double>(t_))) /
      (1 - std::pow(config_.beta1, static_cast<double>(t_))));
  const auto eps = static_cast<float>(config_.epsilon);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto g = grads[i].value->array();
    m_[i].array() = b1 * m_[i].array() + (1 - b1) * g;
    v_[i].array() = b2 * v_[i].array() + (1 - b2) * g.square();
    params[i].value->array() -= step * m_[i].array() / (v_[i].array().sqrt() + eps);
  }
}

bool EarlyStopper::observe(double loss) {
  const std::size_t index = seen_++;
  if (index == 0 || loss < best_) {
    best_ = loss;
    best_index_ = index;
    bad_ = 0;
    return true;
  }
  ++bad_;
  return false;
}

json LogEntry::to_json() const {
  json j = {{"step", step}, {"train_loss", train_loss}};
  if (val_loss) j["val_loss"] = *val_loss;
  if (checkpoint_path) j["checkpoint_path"] = *checkpoint_path;
  return j;
}

Trainer::Trainer(Seq2Seq<float>& model, std::vector<EncodedExample> train,
                 std::vector<EncodedExample> val, const TrainConfig& config)
    : model_(model),
      grad_(model.config(), model.input_vocab_size(), model.name_vocab_size()),
      train_(std::move(train)),
      val_(std::move(val)),
      config_(config),
      adam_(config),
      rng_(config.seed) {
  config_.validate();
  if (train_.empty()) throw EmptyTrainSet("training set is empty");
  order_.resize(train_.size());
  std::iota(order_.begin(), order_.end(), 0);
  cursor_ = order_.size();
}

const EncodedExample& Trainer::next_example() {
  if (cursor_ == order_.size()) {
    shuffle_in_place(order_, rng_);
    cursor_ = 0;
  }
  return train_[order_[cursor_++]];
}

double Trainer::step() {
  grad_.set_zero();
  const std::size_t batch = std::min(config_.batch_size, train_.size());
  nnet::DropoutContext dropout{model_.config().dropout, &rng_};
  double total = 0;
  for (std::size_t b = 0; b < batch; ++b) {
    total += model_.forward_backward(next_example(), &grad_, &dropout);
  }
  auto grads = grad_.parameters();
  double sq = 0;
  for (auto& g : grads) {
    *g.value /= static_cast<float>(batch);
    sq += static_cast<double>(g.value->squaredNorm());
  }
  if (!std::isfinite(sq)) throw nnet::NonFiniteError("non-finite gradient");
  const double norm = std::sqrt(sq);
  if (config_.clip_norm > 0 && norm > config_.clip_norm) {
    const auto scale = static_cast<float>(config_.clip_norm / norm);
    for (auto& g : grads) *g.value *= scale;
  }
  adam_.update(model_.parameters(), grads);
  return total / static_cast<double>(batch);
}

double Trainer::evaluate(const std::vector<EncodedExample>& examples) const {
  if (examples.empty()) return 0;
  double total = 0;
  for (const auto& ex : examples) total += model_.forward_backward(ex);
  return total / static_cast<double>(examples.size());
}

TrainResult Trainer::run() {
  TrainResult result;
  EarlyStopper stopper(config_.patience);
  Seq2Seq<float> best = model_;
  double running = 0;
  std::size_t since = 0;
  auto checkpoint = [&](std::size_t step) {
    LogEntry entry;
    entry.step = step;
    entry.train_loss = since > 0 ? running / static_cast<double>(since) : 0;
    running = 0;
    since = 0;
    if (!val_.empty()) {
      entry.val_loss = evaluate(val_);
      if (stopper.observe(*entry.val_loss)) {
        best = model_;
        result.best_step = step;
        result.best_val_loss = entry.val_loss;
      }
    } else {
      best = model_;
      result.best_step = step;
    }
    if (hook_) entry.checkpoint_path = hook_(model_, step);
    if (log_stream_) *log_stream_ << entry.to_json().dump() << '\n' << std::flush;
    result.log.push_back(std::move(entry));
  };
  while (adam_.steps() < config_.max_steps) {
    running += step();
    ++since;
    if (adam_.steps() % config_.checkpoint_interval == 0) {
      checkpoint(adam_.steps());
      if (stopper.should_stop()) {
        result.stopped_early = true;
        break;
      }
    }
  }
  if (since > 0) checkpoint(adam_.steps());
  result.steps = adam_.steps();
  model_ = std::move(best);
  return result;
}

void check_architecture(const ModelConfig& have, const ModelConfig& expected) {
  if (have.inputs != expected.inputs || have.embedding_dim != expected.embedding_dim ||
      have.hidden_units != expected.hidden_units ||
      have.num_layers != expected.num_layers ||
      have.use_attention != expected.use_attention ||
      have.use_copy != expected.use_copy) {
    throw ConfigMismatch("checkpoint is " + have.name() + ", requested " +
                         expected.name());
  }
}

TrainResult fine_tune(Seq2Seq<float>& model, const ModelConfig& expected,
                      std::vector<EncodedExample> train,
                      std::vector<EncodedExample> val, const TrainConfig& config) {
  check_architecture(model.config(), expected);
  if (config.max_steps == 0) return {};
  Trainer trainer(model, std::move(train), std::move(val), config);
  return trainer.run();
}

}  // namespace lemma_namer
