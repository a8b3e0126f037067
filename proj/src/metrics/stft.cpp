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

#include "mcsep/metrics/stft.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace mcsep::metrics {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

void check(const StftOptions& o) {
  if (o.window < 2 || o.window % 2 != 0) throw std::invalid_argument("stft: window must be even and at least 2");
  if (o.hop == 0 || o.hop > o.window / 2) throw std::invalid_argument("stft: hop must lie in [1, window/2]");
}

std::size_t pad_front(const StftOptions& o) { return o.window - o.hop; }

std::size_t frame_count(std::size_t length, const StftOptions& o) {
  // Frames until the last one starts at or past the final sample.
  const std::size_t padded = pad_front(o) + length;
  return padded / o.hop + 1;
}

}  // namespace

std::vector<double> sqrt_hann(std::size_t window) {
  std::vector<double> w(window);
  for (std::size_t n = 0; n < window; ++n)
    w[n] = std::sqrt(0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * double(n) / double(window)));
  return w;
}

Spectrogram stft(std::span<const double> signal, const StftOptions& o) {
  check(o);
  const auto w = sqrt_hann(o.window);
  const std::size_t front = pad_front(o);
  Spectrogram spec;
  spec.frames = frame_count(signal.size(), o);
  spec.bins = o.window / 2 + 1;
  spec.data.resize(spec.frames * spec.bins);

  double* in = fftw_alloc_real(o.window);
  fftw_complex* out = fftw_alloc_complex(spec.bins);
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_r2c_1d(int(o.window), in, out, FFTW_ESTIMATE);
  }
  for (std::size_t f = 0; f < spec.frames; ++f) {
    for (std::size_t n = 0; n < o.window; ++n) {
      const std::size_t pos = f * o.hop + n;
      in[n] = pos >= front && pos - front < signal.size() ? signal[pos - front] * w[n] : 0.0;
    }
    fftw_execute(plan);
    for (std::size_t b = 0; b < spec.bins; ++b) spec.at(f, b) = {out[b][0], out[b][1]};
  }
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(in);
  fftw_free(out);
  return spec;
}

std::vector<double> istft(const Spectrogram& spec, std::size_t length, const StftOptions& o) {
  check(o);
  if (spec.bins != o.window / 2 + 1) throw std::invalid_argument("istft: bin count does not match the window");
  if (spec.frames < frame_count(length, o)) throw std::invalid_argument("istft: too few frames for the length");
  const auto w = sqrt_hann(o.window);
  const std::size_t front = pad_front(o);
  const std::size_t total = (spec.frames - 1) * o.hop + o.window;
  std::vector<double> acc(total, 0.0), norm(total, 0.0);

  fftw_complex* in = fftw_alloc_complex(spec.bins);
  double* out = fftw_alloc_real(o.window);
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_c2r_1d(int(o.window), in, out, FFTW_ESTIMATE);
  }
  for (std::size_t f = 0; f < spec.frames; ++f) {
    for (std::size_t b = 0; b < spec.bins; ++b) {
      in[b][0] = spec.at(f, b).real();
      in[b][1] = spec.at(f, b).imag();
    }
    fftw_execute(plan);
    for (std::size_t n = 0; n < o.window; ++n) {
      acc[f * o.hop + n] += out[n] / double(o.window) * w[n];
      norm[f * o.hop + n] += w[n] * w[n];
    }
  }
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(in);
  fftw_free(out);

  std::vector<double> y(length);
  for (std::size_t i = 0; i < length; ++i) y[i] = acc[front + i] / norm[front + i];
  return y;
}

}  // namespace mcsep::metrics
