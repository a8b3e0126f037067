// Copyright 2026 The mcsep Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Mini-batch training with utterance-level PIT, Adam, validation-based early
// stopping and best-checkpoint retention.
//
// Each epoch shuffles the training set, cuts a random crop per utterance and
// takes one Adam step per mini-batch on the mean PIT loss. Per-utterance
// gradients are summed in sample order, so the result does not depend on the
// number of worker threads. All randomness derives from TrainConfig::seed.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mcsep/io/keyvalue.hpp"
#include "mcsep/model/config.hpp"
#include "mcsep/model/parameters.hpp"
#include "mcsep/train/adam.hpp"
#include "mcsep/train/dataset.hpp"
#include "mcsep/train/loss.hpp"

namespace mcsep::train {

struct TrainConfig {
  model::ModelConfig model;
  double learning_rate = 1e-3;
  double segment_seconds = 4.0;  // <= 0 trains on whole utterances
  std::size_t patience = 6;
  std::size_t batch_size = 4;
  std::size_t max_epochs = 100;
  std::size_t max_steps = 0;  // 0 = no limit
  std::uint64_t seed = 0;
  SiSnrOptions loss;
  double clip_norm = 5.0;  // 0 disables clipping
  std::size_t threads = 1;
  int sample_rate = 8000;

  void validate() const;
  AdamOptions adam() const { return {learning_rate, 0.9, 0.999, 1e-8}; }
  std::size_t segment_samples() const;
};

/// Keys: the model keys plus lr, batch_size, patience, seed, zero_mean,
/// clamp_db, segment_seconds, max_epochs, max_steps, clip_norm, threads. Any
/// other key is a ConfigError.
TrainConfig train_config_from(const io::KeyValues& kv, const TrainConfig& defaults = {});
std::string serialize(const TrainConfig& config);

/// Validation-loss patience counter. Only a strict improvement resets it.
class EarlyStopping {
 public:
  explicit EarlyStopping(std::size_t patience);

  /// Records the next epoch's loss; true when training should stop.
  bool update(double loss);
  bool improved() const { return last_improved_; }
  std::size_t best_epoch() const { return best_epoch_; }  // 1-based, 0 before any update
  double best_loss() const { return best_loss_; }
  std::size_t epochs() const { return epochs_; }

 private:
  std::size_t patience_;
  std::size_t epochs_ = 0;
  std::size_t best_epoch_ = 0;
  std::size_t since_best_ = 0;
  double best_loss_ = 0;
  bool last_improved_ = false;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0;
  double valid_loss = 0;
};

struct TrainResult {
  model::ParameterSet<float> best;
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;
  std::size_t steps = 0;
  bool early_stopped = false;
};

struct TrainHooks {
  std::function<void(const EpochRecord&)> on_epoch;
  /// Called after every optimizer step; returning false ends training after
  /// the current epoch's validation.
  std::function<bool(std::size_t step, double batch_loss, const model::ParameterSet<float>&)> on_step;
};

/// Throws std::invalid_argument for empty sets and std::runtime_error when the
/// loss becomes non-finite.
TrainResult train(const std::vector<Sample>& train_set, const std::vector<Sample>& valid_set,
                  const TrainConfig& config, model::ParameterSet<float> init, const TrainHooks& hooks = {});

/// Mean PIT loss over whole utterances, no gradients.
double mean_loss(const std::vector<Sample>& samples, const model::ParameterSet<float>& params,
                 const model::ModelConfig& config, const SiSnrOptions& options);

/// "epoch,train_loss,valid_loss" rows.
std::string loss_history_csv(const std::vector<EpochRecord>& history);

}  // namespace mcsep::train
