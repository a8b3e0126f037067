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

#include <functional>
#include <vector>

#include "mcsep/core/tensor.hpp"

namespace mcsep::core {

using ScalarGraph = std::function<Tensor<double>(const std::vector<Tensor<double>>&)>;

struct GradCheckResult {
  double max_relative_error = 0;
  std::size_t worst_input = 0;
  std::size_t worst_index = 0;
  double analytic = 0;  // at the worst coordinate
  double numeric = 0;
};

/// Compares backward() against central differences (f(x+e) - f(x-e)) / 2e on
/// every coordinate of every input. The relative error of a coordinate uses
/// max(|analytic|, |numeric|, 1e-8) as denominator. `graph` must return a
/// one-element tensor and is re-evaluated 2 * (total coordinates) times.
/// Inputs are modified in place during the sweep and restored afterwards.
GradCheckResult finite_diff_check(const ScalarGraph& graph, std::vector<Tensor<double>>& inputs,
                                  double epsilon = 1e-6);

}  // namespace mcsep::core
