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

// Scale-invariant SNR and its utterance-level permutation-invariant loss.
//
//   alpha = <s, e> / |s|^2,   SI-SNR = 10 log10(|alpha s|^2 / |alpha s - e|^2)
//
// With zero_mean set, s and e are mean-subtracted first. Results are clamped
// to [-clamp_db, +clamp_db]; a clamped value has zero gradient.
//
// Permutations map references to estimates: permutation[k] is the index of
// the estimate assigned to reference k. When several assignments reach the
// same minimum loss, the first one in lexicographic order wins.

#include <span>
#include <vector>

#include "mcsep/core/tensor.hpp"

namespace mcsep::train {

struct SiSnrOptions {
  bool zero_mean = true;
  double clamp_db = 60.0;
};

/// Throws std::invalid_argument on length mismatch or a reference with no
/// energy (after mean removal when zero_mean is set).
template <typename T>
double si_snr(std::span<const T> estimate, std::span<const T> reference, const SiSnrOptions& options = {});

/// Differentiable in `estimate`; returns a one-element tensor in dB.
template <typename T>
core::Tensor<T> si_snr(const core::Tensor<T>& estimate, std::span<const T> reference,
                       const SiSnrOptions& options = {});

struct PitResult {
  double loss = 0;  // -(1/K) sum of SI-SNR under the chosen assignment
  std::vector<std::size_t> permutation;
};

/// Enumerates all K! assignments.
template <typename T>
PitResult pit_loss(const std::vector<std::vector<T>>& estimates, const std::vector<std::vector<T>>& references,
                   const SiSnrOptions& options = {});

template <typename T>
struct PitLoss {
  core::Tensor<T> loss;
  std::vector<std::size_t> permutation;
};

/// The assignment is chosen on values, then the loss is rebuilt as a graph
/// over the chosen pairs only.
template <typename T>
PitLoss<T> pit_loss(const std::vector<core::Tensor<T>>& estimates, const std::vector<std::vector<T>>& references,
                    const SiSnrOptions& options = {});

}  // namespace mcsep::train
