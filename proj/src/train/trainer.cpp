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

#include "mcsep/train/trainer.hpp"

#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "mcsep/model/separator.hpp"

namespace mcsep::train {

namespace {

using model::ParameterSet;

struct SampleResult {
  double loss = 0;
  std::vector<std::vector<double>> grads;
};

SampleResult loss_and_grad(const Sample& s, ParameterSet<float>& params, const TrainConfig& config) {
  std::vector<core::Tensor<float>> channels;
  for (const auto& ch : s.mixture) channels.emplace_back(core::Shape{ch.size()}, ch);
  params.zero_grad();
  auto out = model::forward(channels, params, config.model);
  auto pit = pit_loss(out.estimates, s.references, config.loss);
  SampleResult r;
  r.loss = pit.loss.item();
  if (!std::isfinite(r.loss)) throw std::runtime_error("non-finite training loss on utterance " + s.id);
  core::backward(pit.loss);
  for (const auto& [name, t] : params.entries()) {
    if (t.has_grad()) {
      const auto g = t.grad();
      r.grads.emplace_back(g.begin(), g.end());
    } else {
      r.grads.emplace_back(t.numel(), 0.0);
    }
  }
  return r;
}

void copy_values(const ParameterSet<float>& from, ParameterSet<float>& to) {
  for (std::size_t i = 0; i < from.size(); ++i) {
    const auto src = from.entries()[i].second.data();
    auto dst = to.get(from.entries()[i].first).data();
    std::copy(src.begin(), src.end(), dst.begin());
  }
}

std::vector<std::size_t> shuffled(std::size_t n, std::uint64_t seed, std::size_t epoch) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto rng = util::make_rng(seed, "shuffle", epoch);
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[util::uniform_index(rng, i)]);
  return order;
}

}  // namespace

void TrainConfig::validate() const {
  model.validate();
  if (!(learning_rate > 0)) throw std::invalid_argument("train config: lr must be positive");
  if (patience < 1) throw std::invalid_argument("train config: patience must be at least 1");
  if (batch_size < 1) throw std::invalid_argument("train config: batch_size must be at least 1");
  if (max_epochs < 1) throw std::invalid_argument("train config: max_epochs must be at least 1");
  if (threads < 1) throw std::invalid_argument("train config: threads must be at least 1");
  if (!(loss.clamp_db > 0)) throw std::invalid_argument("train config: clamp_db must be positive");
  if (clip_norm < 0) throw std::invalid_argument("train config: clip_norm must not be negative");
  if (sample_rate <= 0) throw std::invalid_argument("train config: sample rate must be positive");
}

std::size_t TrainConfig::segment_samples() const {
  return segment_seconds > 0 ? static_cast<std::size_t>(std::lround(segment_seconds * sample_rate)) : 0;
}

TrainConfig train_config_from(const io::KeyValues& kv, const TrainConfig& defaults) {
  static const std::set<std::string> known{"variant", "M",          "K",        "L",        "N",
                                           "B",       "H",          "P",        "X",        "R",
                                           "Sc",      "lr",         "batch_size", "patience", "seed",
                                           "zero_mean", "clamp_db", "segment_seconds", "max_epochs", "max_steps",
                                           "clip_norm", "threads"};
  for (const auto& [key, value] : kv.values())
    if (!known.count(key)) throw io::ConfigError("train config: unknown key '" + key + "'");
  TrainConfig c = defaults;
  c.model = model::model_config_from(kv, defaults.model);
  c.learning_rate = kv.get_double("lr", c.learning_rate);
  c.batch_size = kv.get_size("batch_size", c.batch_size);
  c.patience = kv.get_size("patience", c.patience);
  c.seed = static_cast<std::uint64_t>(kv.get_int("seed", static_cast<std::int64_t>(c.seed)));
  c.loss.zero_mean = kv.get_bool("zero_mean", c.loss.zero_mean);
  c.loss.clamp_db = kv.get_double("clamp_db", c.loss.clamp_db);
  c.segment_seconds = kv.get_double("segment_seconds", c.segment_seconds);
  c.max_epochs = kv.get_size("max_epochs", c.max_epochs);
  c.max_steps = kv.get_size("max_steps", c.max_steps);
  c.clip_norm = kv.get_double("clip_norm", c.clip_norm);
  c.threads = kv.get_size("threads", c.threads);
  c.validate();
  return c;
}

std::string serialize(const TrainConfig& c) {
  std::ostringstream out;
  out.precision(17);
  out << model::serialize(c.model) << "lr = " << c.learning_rate << "\nbatch_size = " << c.batch_size
      << "\npatience = " << c.patience << "\nseed = " << c.seed << "\nzero_mean = " << (c.loss.zero_mean ? "on" : "off")
      << "\nclamp_db = " << c.loss.clamp_db << "\nsegment_seconds = " << c.segment_seconds
      << "\nmax_epochs = " << c.max_epochs << "\nmax_steps = " << c.max_steps << "\nclip_norm = " << c.clip_norm
      << "\nthreads = " << c.threads << "\n";
  return out.str();
}

EarlyStopping::EarlyStopping(std::size_t patience) : patience_(patience) {
  if (patience == 0) throw std::invalid_argument("early stopping: patience must be at least 1");
}

bool EarlyStopping::update(double loss) {
  ++epochs_;
  last_improved_ = best_epoch_ == 0 || loss < best_loss_;
  if (last_improved_) {
    best_loss_ = loss;
    best_epoch_ = epochs_;
    since_best_ = 0;
  } else {
    ++since_best_;
  }
  return since_best_ >= patience_;
}

double mean_loss(const std::vector<Sample>& samples, const ParameterSet<float>& params,
                 const model::ModelConfig& config, const SiSnrOptions& options) {
  if (samples.empty()) throw std::invalid_argument("mean_loss: no samples");
  auto frozen = params.clone();
  frozen.set_requires_grad(false);
  double total = 0;
  for (const auto& s : samples) {
    auto est = model::separate(s.mixture, frozen, config);
    total += pit_loss(est, s.references, options).loss;
  }
  return total / double(samples.size());
}

TrainResult train(const std::vector<Sample>& train_set, const std::vector<Sample>& valid_set,
                  const TrainConfig& config, ParameterSet<float> init, const TrainHooks& hooks) {
  config.validate();
  if (train_set.empty()) throw std::invalid_argument("train: empty training set");
  if (valid_set.empty()) throw std::invalid_argument("train: empty validation set");
  init.check_layout(config.model);

  auto params = init.clone();
  params.set_requires_grad(true);
  const std::size_t workers = std::min(config.threads, config.batch_size);
  std::vector<ParameterSet<float>> replicas;
  for (std::size_t w = 1; w < workers; ++w) replicas.push_back(params.clone());

  auto state = make_optimizer_state(params);
  EarlyStopping stopper(config.patience);
  TrainResult result;
  result.best = params.clone();
  result.best.set_requires_grad(false);
  const std::size_t crop = config.segment_samples();
  bool halt = false;

  for (std::size_t epoch = 1; epoch <= config.max_epochs && !halt; ++epoch) {
    const auto order = shuffled(train_set.size(), config.seed, epoch);
    double epoch_loss = 0;
    std::size_t seen = 0;
    for (std::size_t first = 0; first < order.size() && !halt; first += config.batch_size) {
      const std::size_t count = std::min(config.batch_size, order.size() - first);
      std::vector<Sample> batch;
      for (std::size_t i = 0; i < count; ++i) {
        const std::size_t idx = order[first + i];
        if (crop == 0) {
          batch.push_back(train_set[idx]);
        } else {
          auto rng = util::make_rng(config.seed, "crop:" + std::to_string(epoch), idx);
          batch.push_back(compute_crop(train_set[idx], crop, rng));
        }
      }

      std::vector<SampleResult> results(count);
      auto run = [&](std::size_t w) {
        auto& p = w == 0 ? params : replicas[w - 1];
        for (std::size_t i = w; i < count; i += workers) results[i] = loss_and_grad(batch[i], p, config);
      };
      if (workers == 1) {
        run(0);
      } else {
        std::vector<std::exception_ptr> errors(workers);
        {
          std::vector<std::jthread> pool;
          for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
              try {
                run(w);
              } catch (...) {
                errors[w] = std::current_exception();
              }
            });
        }
        for (auto& e : errors)
          if (e) std::rethrow_exception(e);
      }

      auto grads = std::move(results[0].grads);
      double batch_loss = results[0].loss;
      for (std::size_t i = 1; i < count; ++i) {
        batch_loss += results[i].loss;
        for (std::size_t t = 0; t < grads.size(); ++t)
          for (std::size_t j = 0; j < grads[t].size(); ++j) grads[t][j] += results[i].grads[t][j];
      }
      for (auto& g : grads)
        for (auto& x : g) x /= double(count);
      if (config.clip_norm > 0) clip_grad_norm(grads, config.clip_norm);
      adam_step(params, grads, state, config.adam());
      for (auto& r : replicas) copy_values(params, r);

      epoch_loss += batch_loss;
      seen += count;
      ++result.steps;
      batch_loss /= double(count);
      if (hooks.on_step && !hooks.on_step(result.steps, batch_loss, params)) halt = true;
      if (config.max_steps && result.steps >= config.max_steps) halt = true;
    }

    EpochRecord record{epoch, epoch_loss / double(seen), mean_loss(valid_set, params, config.model, config.loss)};
    if (!std::isfinite(record.valid_loss))
      throw std::runtime_error("non-finite validation loss in epoch " + std::to_string(epoch));
    result.history.push_back(record);
    const bool stop = stopper.update(record.valid_loss);
    if (stopper.improved()) {
      result.best = params.clone();
      result.best.set_requires_grad(false);
      result.best_epoch = epoch;
    }
    if (hooks.on_epoch) hooks.on_epoch(record);
    if (stop) {
      result.early_stopped = true;
      break;
    }
  }
  return result;
}

std::string loss_history_csv(const std::vector<EpochRecord>& history) {
  std::ostringstream out;
  out.precision(10);
  out << "epoch,train_loss,valid_loss\n";
  for (const auto& r : history) out << r.epoch << ',' << r.train_loss << ',' << r.valid_loss << '\n';
  return out.str();
}

}  // namespace mcsep::train
