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

// Short-time Fourier transform with a periodic square-root Hann window used
// for both analysis and synthesis. The signal is padded by window - hop zeros
// at the front and enough at the back that every sample sits under the same
// number of frames; the inverse divides by the summed squared window, so
// unmodified spectra reconstruct the input to rounding error.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace mcsep::metrics {

struct StftOptions {
  std::size_t window = 256;
  std::size_t hop = 64;
};

struct Spectrogram {
  std::size_t frames = 0;
  std::size_t bins = 0;  // window / 2 + 1
  std::vector<std::complex<double>> data;  // frame-major

  std::complex<double>& at(std::size_t frame, std::size_t bin) { return data[frame * bins + bin]; }
  const std::complex<double>& at(std::size_t frame, std::size_t bin) const { return data[frame * bins + bin]; }
};

std::vector<double> sqrt_hann(std::size_t window);

/// Throws std::invalid_argument unless 0 < hop <= window / 2 and window is even.
Spectrogram stft(std::span<const double> signal, const StftOptions& options = {});

std::vector<double> istft(const Spectrogram& spec, std::size_t length, const StftOptions& options = {});

}  // namespace mcsep::metrics
