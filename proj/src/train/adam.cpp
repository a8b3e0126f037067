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

#include "mcsep/train/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace mcsep::train {

template <typename T>
OptimizerState make_optimizer_state(const model::ParameterSet<T>& params) {
  OptimizerState s;
  for (const auto& [name, t] : params.entries()) {
    s.first.emplace_back(t.numel(), 0.0);
    s.second.emplace_back(t.numel(), 0.0);
  }
  return s;
}

template <typename T>
void adam_step(model::ParameterSet<T>& params, const std::vector<std::vector<double>>& grads, OptimizerState& state,
               const AdamOptions& o) {
  const auto& entries = params.entries();
  if (grads.size() != entries.size() || state.first.size() != entries.size())
    throw std::invalid_argument("adam_step: gradient/state count does not match the parameter set");
  ++state.step;
  const double c1 = 1.0 - std::pow(o.beta1, double(state.step));
  const double c2 = 1.0 - std::pow(o.beta2, double(state.step));
  for (std::size_t i = 0; i < entries.size(); ++i) {
    auto& tensor = params.get(entries[i].first);
    auto values = tensor.data();
    auto& m = state.first[i];
    auto& v = state.second[i];
    if (grads[i].size() != values.size() || m.size() != values.size())
      throw std::invalid_argument("adam_step: shape mismatch for " + entries[i].first);
    for (std::size_t j = 0; j < values.size(); ++j) {
      const double g = grads[i][j];
      m[j] = o.beta1 * m[j] + (1.0 - o.beta1) * g;
      v[j] = o.beta2 * v[j] + (1.0 - o.beta2) * g * g;
      const double update = o.learning_rate * (m[j] / c1) / (std::sqrt(v[j] / c2) + o.epsilon);
      values[j] = static_cast<T>(double(values[j]) - update);
    }
  }
}

double clip_grad_norm(std::vector<std::vector<double>>& grads, double max_norm) {
  double sq = 0;
  for (const auto& g : grads)
    for (double x : g) sq += x * x;
  const double norm = std::sqrt(sq);
  if (norm > max_norm && norm > 0) {
    const double f = max_norm / norm;
    for (auto& g : grads)
      for (auto& x : g) x *= f;
  }
  return norm;
}

template OptimizerState make_optimizer_state(const model::ParameterSet<float>&);
template OptimizerState make_optimizer_state(const model::ParameterSet<double>&);
template void adam_step(model::ParameterSet<float>&, const std::vector<std::vector<double>>&, OptimizerState&,
                        const AdamOptions&);
template void adam_step(model::ParameterSet<double>&, const std::vector<std::vector<double>>&, OptimizerState&,
                        const AdamOptions&);

}  // namespace mcsep::train
