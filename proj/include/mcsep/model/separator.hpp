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

// Forward passes of the single-channel separator and its early-fusion and
// late-fusion multi-microphone extensions.
//
//   single:  W = U X;  B = BNL(W);  Y = TCN(B);  M_k = ME_k(Y)
//   early:   W_m = U X_m;  B = BNL_EF([W_1; ...; W_M]);  Y = TCN(B);  M_k = ME_k(Y)
//   late:    W_m = U X_m;  Y_m = TCN(BNL(W_m));  M_k = ME_LF,k([Y_1; ...; Y_M])
//
// In every variant the masks act on the reference microphone's encoding W_1:
// Z_k = M_k . W_1, the decoder maps Z_k back to L x T frames, and overlap-add
// restores a waveform of the input length.
//
// The early-fusion bottleneck normalizes each microphone's N rows with its
// own global statistics before the shared 1x1 convolution, so a zero weight
// slice makes a microphone exactly invisible to the network.

#include <vector>

#include "mcsep/core/segment.hpp"
#include "mcsep/core/tensor.hpp"
#include "mcsep/model/config.hpp"
#include "mcsep/model/parameters.hpp"

namespace mcsep::model {

template <typename T>
using Waveform = core::Tensor<T>;

template <typename T>
struct SeparationOutput {
  std::vector<Waveform<T>> estimates;  // K waveforms of the input length
  std::vector<core::Tensor<T>> masks;  // K masks, N x T
};

inline constexpr double kNormEps = 1e-8;

/// W = U * segment(x, L, L/2). Throws std::invalid_argument for inputs shorter
/// than L.
template <typename T>
core::Tensor<T> encode(const Waveform<T>& x, const ParameterSet<T>& params, const ModelConfig& config);

/// Decoder + overlap-add for one masked representation.
template <typename T>
Waveform<T> decode(const core::Tensor<T>& z, const ParameterSet<T>& params, const ModelConfig& config,
                   std::size_t length);

template <typename T>
std::vector<Waveform<T>> separate_single(const Waveform<T>& x, const ParameterSet<T>& params,
                                         const ModelConfig& config);

template <typename T>
std::vector<Waveform<T>> separate_ef(const std::vector<Waveform<T>>& channels, const ParameterSet<T>& params,
                                     const ModelConfig& config);

template <typename T>
std::vector<Waveform<T>> separate_lf(const std::vector<Waveform<T>>& channels, const ParameterSet<T>& params,
                                     const ModelConfig& config);

/// Dispatches on config.variant; also returns the masks.
template <typename T>
SeparationOutput<T> forward(const std::vector<Waveform<T>>& channels, const ParameterSet<T>& params,
                            const ModelConfig& config);

/// Convenience for inference on plain sample buffers.
std::vector<std::vector<float>> separate(const std::vector<std::vector<float>>& channels,
                                         const ParameterSet<float>& params, const ModelConfig& config);

}  // namespace mcsep::model
