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

// Framing of a waveform into overlapping columns and the inverse overlap-add.
//
// Column t of the L x T matrix holds samples [t * hop, t * hop + L), zero
// padded past the end of the waveform, with
//   T = ceil(max(n - L, 0) / hop) + 1.
// overlap_add divides every output sample by the number of columns covering
// it, so overlap_add(segment(x)) reproduces x exactly (up to rounding) for any
// hop <= L, edges included.

#include <cstddef>

#include "mcsep/core/tensor.hpp"

namespace mcsep::core {

template <typename T>
struct SegmentMatrix {
  Tensor<T> data;  // L x T
  std::size_t segment_length = 0;
  std::size_t hop = 0;
  std::size_t original_length = 0;

  std::size_t frames() const { return data.dim(1); }
};

/// Frame count for a waveform of `length` samples.
std::size_t segment_count(std::size_t length, std::size_t segment_length, std::size_t hop);

template <typename T>
SegmentMatrix<T> segment(const Tensor<T>& waveform, std::size_t segment_length, std::size_t hop);

/// Differentiable with respect to segments.data.
template <typename T>
Tensor<T> overlap_add(const SegmentMatrix<T>& segments);

}  // namespace mcsep::core
