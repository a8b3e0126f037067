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

#include <random>
#include <vector>

#include "mcsep/core/tensor.hpp"

namespace mcsep::testing {

template <typename T>
std::vector<T> random_values(std::size_t n, std::mt19937_64& rng, T lo = T(-1), T hi = T(1)) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<T> v(n);
  for (auto& x : v) x = static_cast<T>(dist(rng));
  return v;
}

template <typename T>
core::Tensor<T> random_tensor(core::Shape shape, std::mt19937_64& rng, bool requires_grad = false) {
  const std::size_t n = core::shape_numel(shape);
  return core::Tensor<T>(std::move(shape), random_values<T>(n, rng), requires_grad);
}

// Values bounded away from zero, for ops with a kink at the origin.
inline std::vector<double> away_from_zero(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> mag(0.05, 1.0);
  std::bernoulli_distribution sign(0.5);
  std::vector<double> v(n);
  for (auto& x : v) x = sign(rng) ? mag(rng) : -mag(rng);
  return v;
}

template <typename T>
double max_abs_diff(std::span<const T> a, std::span<const T> b) {
  double worst = 0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(double(a[i]) - double(b[i])));
  return worst;
}

}  // namespace mcsep::testing
