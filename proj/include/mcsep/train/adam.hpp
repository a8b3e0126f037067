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

// Adam with bias correction. Moments are kept in double regardless of the
// parameter type.

#include <cstddef>
#include <vector>

#include "mcsep/model/parameters.hpp"

namespace mcsep::train {

struct AdamOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct OptimizerState {
  std::vector<std::vector<double>> first;   // one per parameter tensor
  std::vector<std::vector<double>> second;
  std::size_t step = 0;
};

template <typename T>
OptimizerState make_optimizer_state(const model::ParameterSet<T>& params);

/// One update. grads[i] belongs to params.entries()[i]; throws
/// std::invalid_argument when the shapes disagree.
template <typename T>
void adam_step(model::ParameterSet<T>& params, const std::vector<std::vector<double>>& grads, OptimizerState& state,
               const AdamOptions& options);

/// Scales all gradients so their joint L2 norm is at most max_norm. Returns
/// the norm before scaling.
double clip_grad_norm(std::vector<std::vector<double>>& grads, double max_norm);

}  // namespace mcsep::train
