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

// Differentiable operations used by the separation networks. 2-D tensors are
// laid out channels x frames (row-major); 1-D tensors are waveforms.

#include <span>
#include <vector>

#include "mcsep/core/tensor.hpp"

namespace mcsep::core {

/// [p x q] * [q x r] -> [p x r]
template <typename T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b);

/// Non-causal "same" 1-D convolution over the frame axis.
///
/// input is C_in x T, kernel is C_out x (C_in / groups) x P with P odd, bias
/// is an optional C_out-element tensor (pass an undefined Tensor for none).
/// Each side is zero padded by dilation * (P - 1) / 2 frames so the output has
/// T frames. groups == C_in == C_out is a depthwise convolution; P == 1 is a
/// pointwise (1x1) channel mix.
template <typename T>
Tensor<T> conv1d(const Tensor<T>& input, const Tensor<T>& kernel, const Tensor<T>& bias,
                 std::size_t dilation = 1, std::size_t groups = 1);

/// Global layer normalization: statistics over all C x T elements,
/// then per-channel gain and bias (each C elements).
///
/// With groups > 1 the rows are split into `groups` equal contiguous blocks
/// that are normalized independently; the multi-microphone bottleneck uses this
/// to normalize each microphone's features on its own statistics.
template <typename T>
Tensor<T> global_layer_norm(const Tensor<T>& input, const Tensor<T>& gamma,
                            const Tensor<T>& beta, T eps, std::size_t groups = 1);

/// x if x >= 0 else slope * x, with a single trainable slope.
template <typename T>
Tensor<T> prelu(const Tensor<T>& input, const Tensor<T>& slope);

template <typename T>
Tensor<T> sigmoid(const Tensor<T>& input);

/// Row-block concatenation of C_i x T tensors.
template <typename T>
Tensor<T> concat_channels(const std::vector<Tensor<T>>& inputs);

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b);

/// Hadamard product.
template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b);

template <typename T>
Tensor<T> scale(const Tensor<T>& a, T factor);

/// Sum of all elements as a one-element tensor.
template <typename T>
Tensor<T> sum(const Tensor<T>& a);

/// Sum of one-element tensors.
template <typename T>
Tensor<T> add_scalars(const std::vector<Tensor<T>>& terms);

/// Rows [first, first + count) of a 2-D tensor.
template <typename T>
Tensor<T> slice_rows(const Tensor<T>& input, std::size_t first, std::size_t count);

/// Elementwise weighted sum: sum_i x[i] * w[i] as a one-element tensor. Handy
/// for turning a tensor-valued function into a scalar for gradient checks.
template <typename T>
Tensor<T> weighted_sum(const Tensor<T>& a, std::span<const T> weights);

}  // namespace mcsep::core
