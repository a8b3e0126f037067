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

#include "mcsep/core/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace mcsep::core {

GradCheckResult finite_diff_check(const ScalarGraph& graph, std::vector<Tensor<double>>& inputs,
                                  double epsilon) {
  for (auto& in : inputs) {
    in.set_requires_grad(true);
    in.zero_grad();
  }
  backward(graph(inputs));

  GradCheckResult result;
  for (std::size_t which = 0; which < inputs.size(); ++which) {
    auto& in = inputs[which];
    std::vector<double> analytic(in.numel(), 0.0);
    if (in.has_grad()) std::copy(in.grad().begin(), in.grad().end(), analytic.begin());
    auto values = in.data();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double saved = values[i];
      values[i] = saved + epsilon;
      const double up = graph(inputs).item();
      values[i] = saved - epsilon;
      const double down = graph(inputs).item();
      values[i] = saved;
      const double numeric = (up - down) / (2 * epsilon);
      const double denom = std::max({std::abs(analytic[i]), std::abs(numeric), 1e-8});
      const double rel = std::abs(analytic[i] - numeric) / denom;
      if (rel > result.max_relative_error) {
        result = {rel, which, i, analytic[i], numeric};
      }
    }
  }
  return result;
}

}  // namespace mcsep::core
