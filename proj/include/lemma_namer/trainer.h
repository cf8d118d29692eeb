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

// Mini-batch Adam training with periodic validation and early stopping.

#ifndef LEMMA_NAMER_TRAINER_H_
#define LEMMA_NAMER_TRAINER_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "lemma_namer/seq2seq.h"

namespace lemma_namer {

struct TrainConfig {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::size_t checkpoint_interval = 200;
  std::size_t patience = 3;
  std::size_t max_steps = 10000;
  std::size_t batch_size = 32;
  std::uint64_t seed = 0;
  // Global gradient-norm clipping; 0 disables it.
  double clip_norm = 5.0;

  void validate() const;
  nlohmann::json to_json() const;
  static TrainConfig from_json(const nlohmann::json& j);
};

class EmptyTrainSet : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ConfigMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class Adam {
 public:
  explicit Adam(const TrainConfig& config) : config_(config) {}
  void update(const nnet::ParamList<float>& params,
              const nnet::ParamList<float>& grads);
  std::size_t steps() const { return t_; }

 private:
  TrainConfig config_;
  std::size_t t_ = 0;
  std::vector<nnet::Mat<float>> m_, v_;
};

// Stops once `patience` consecutive checkpoints fail to strictly improve on
// the best validation loss.
class EarlyStopper {
 public:
  explicit EarlyStopper(std::size_t patience) : patience_(patience) {}

  // Returns true when `loss` is a new best.
  bool observe(double loss);
  bool should_stop() const { return bad_ >= patience_; }
  // 0-based index of the best checkpoint so far.
  std::size_t best_index() const { return best_index_; }
  double best_loss() const { return best_; }
  std::size_t checkpoints() const { return seen_; }

 private:
  std::size_t patience_;
  std::size_t seen_ = 0;
  std::size_t bad_ = 0;
  std::size_t best_index_ = 0;
  double best_ = 0;
};

struct LogEntry {
  std::size_t step = 0;
  double train_loss = 0;
  std::optional<double> val_loss;
  std::optional<std::string> checkpoint_path;

  nlohmann::json to_json() const;
};

struct TrainResult {
  std::vector<LogEntry> log;
  std::size_t steps = 0;
  std::size_t best_step = 0;
  std::optional<double> best_val_loss;
  bool stopped_early = false;
};

class Trainer {
 public:
  // Called at every checkpoint; returns the path written, if any.
  using CheckpointHook =
      std::function<std::optional<std::string>(const Seq2Seq<float>&, std::size_t)>;

  // `model` is trained in place. Throws EmptyTrainSet.
  Trainer(Seq2Seq<float>& model, std::vector<EncodedExample> train,
          std::vector<EncodedExample> val, const TrainConfig& config);

  void set_checkpoint_hook(CheckpointHook hook) { hook_ = std::move(hook); }
  void set_log_stream(std::ostream* out) { log_stream_ = out; }

  // One Adam update on the next mini-batch; returns its mean loss.
  double step();
  // Mean loss over `examples` in evaluation mode.
  double evaluate(const std::vector<EncodedExample>& examples) const;

  // Trains to max_steps or early stop and leaves the best-validation
  // parameters in the model.
  TrainResult run();

  std::size_t steps_done() const { return adam_.steps(); }

 private:
  const EncodedExample& next_example();

  Seq2Seq<float>& model_;
  Seq2Seq<float> grad_;
  std::vector<EncodedExample> train_;
  std::vector<EncodedExample> val_;
  TrainConfig config_;
  Adam adam_;
  Rng rng_;
  std::vector<std::size_t> order_;
  std::size_t cursor_ = 0;
  CheckpointHook hook_;
  std::ostream* log_stream_ = nullptr;
};

// Throws ConfigMismatch unless both configs describe the same architecture.
void check_architecture(const ModelConfig& have, const ModelConfig& expected);

// Continues training a loaded model. Throws ConfigMismatch when `expected`
// names a different architecture than the model's.
TrainResult fine_tune(Seq2Seq<float>& model, const ModelConfig& expected,
                      std::vector<EncodedExample> train,
                      std::vector<EncodedExample> val, const TrainConfig& config);

}  // namespace lemma_namer

#endif  // LEMMA_NAMER_TRAINER_H_
