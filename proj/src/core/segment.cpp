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

#include "mcsep/core/segment.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace mcsep::core {

std::size_t segment_count(std::size_t length, std::size_t segment_length, std::size_t hop) {
  const std::size_t excess = length > segment_length ? length - segment_length : 0;
  return (excess + hop - 1) / hop + 1;
}

template <typename T>
SegmentMatrix<T> segment(const Tensor<T>& waveform, std::size_t segment_length, std::size_t hop) {
  if (segment_length == 0) throw std::invalid_argument("segment: segment length must be positive");
  if (hop == 0 || hop > segment_length)
    throw std::invalid_argument("segment: hop " + std::to_string(hop) + " must be in [1, " +
                                std::to_string(segment_length) + "]");
  if (waveform.rank() != 1) throw std::invalid_argument("segment: waveform must be 1-D");
  const std::size_t n = waveform.numel();
  const std::size_t frames = segment_count(n, segment_length, hop);
  const auto x = waveform.data();

  std::vector<T> out(segment_length * frames, T(0));
  for (std::size_t l = 0; l < segment_length; ++l)
    for (std::size_t t = 0; t < frames; ++t) {
      const std::size_t i = t * hop + l;
      if (i < n) out[l * frames + t] = x[i];
    }

  auto* nx = &waveform.node();
  Tensor<T> data = Tensor<T>::make_result(
      "segment", {segment_length, frames}, std::move(out), {waveform},
      [nx, segment_length, hop, frames, n](detail::Node<T>& self) {
        auto& dx = nx->ensure_grad();
        for (std::size_t l = 0; l < segment_length; ++l)
          for (std::size_t t = 0; t < frames; ++t) {
            const std::size_t i = t * hop + l;
            if (i < n) dx[i] += self.grad[l * frames + t];
          }
      });
  return {std::move(data), segment_length, hop, n};
}

template <typename T>
Tensor<T> overlap_add(const SegmentMatrix<T>& segments) {
  const Tensor<T>& s = segments.data;
  if (s.rank() != 2 || s.dim(0) != segments.segment_length)
    throw std::invalid_argument("overlap_add: data must be segment_length x frames");
  const std::size_t len = segments.segment_length;
  const std::size_t hop = segments.hop;
  const std::size_t frames = s.dim(1);
  const std::size_t n = segments.original_length;
  if (hop == 0 || hop > len || n == 0 || frames != segment_count(n, len, hop))
    throw std::invalid_argument("overlap_add: inconsistent segment matrix");

  std::vector<T> count(n, T(0));
  std::vector<T> acc(n, T(0));
  const auto v = s.data();
  for (std::size_t t = 0; t < frames; ++t)
    for (std::size_t l = 0; l < len; ++l) {
      const std::size_t i = t * hop + l;
      if (i >= n) break;
      acc[i] += v[l * frames + t];
      count[i] += T(1);
    }
  for (std::size_t i = 0; i < n; ++i) acc[i] /= count[i];

  auto* ns = &s.node();
  return Tensor<T>::make_result("overlap_add", {n}, std::move(acc), {s},
                                [ns, len, hop, frames, n, count = std::move(count)](detail::Node<T>& self) {
                                  auto& ds = ns->ensure_grad();
                                  for (std::size_t t = 0; t < frames; ++t)
                                    for (std::size_t l = 0; l < len; ++l) {
                                      const std::size_t i = t * hop + l;
                                      if (i >= n) break;
                                      ds[l * frames + t] += self.grad[i] / count[i];
                                    }
                                });
}

template struct SegmentMatrix<float>;
template struct SegmentMatrix<double>;
template SegmentMatrix<float> segment(const Tensor<float>&, std::size_t, std::size_t);
template SegmentMatrix<double> segment(const Tensor<double>&, std::size_t, std::size_t);
template Tensor<float> overlap_add(const SegmentMatrix<float>&);
template Tensor<double> overlap_add(const SegmentMatrix<double>&);

}  // namespace mcsep::core
