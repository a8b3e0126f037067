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

#include "mcsep/spatial/mixer.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <stdexcept>
#include <string>

namespace mcsep::spatial {

namespace {

// FFTW's planner is not thread-safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::size_t next_fast_size(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

Signal fft_convolve(const Signal& x, const Signal& h, std::size_t length) {
  const std::size_t full = x.size() + h.size() - 1;
  const std::size_t n = next_fast_size(full);
  const std::size_t bins = n / 2 + 1;
  double* a = fftw_alloc_real(n);
  double* b = fftw_alloc_real(n);
  fftw_complex* fa = fftw_alloc_complex(bins);
  fftw_complex* fb = fftw_alloc_complex(bins);
  fftw_plan pa, pb, inv;
  {
    std::lock_guard lock(planner_mutex());
    pa = fftw_plan_dft_r2c_1d(static_cast<int>(n), a, fa, FFTW_ESTIMATE);
    pb = fftw_plan_dft_r2c_1d(static_cast<int>(n), b, fb, FFTW_ESTIMATE);
    inv = fftw_plan_dft_c2r_1d(static_cast<int>(n), fa, a, FFTW_ESTIMATE);
  }
  std::fill(a, a + n, 0.0);
  std::fill(b, b + n, 0.0);
  std::copy(x.begin(), x.end(), a);
  std::copy(h.begin(), h.end(), b);
  fftw_execute(pa);
  fftw_execute(pb);
  for (std::size_t i = 0; i < bins; ++i) {
    const double re = fa[i][0] * fb[i][0] - fa[i][1] * fb[i][1];
    const double im = fa[i][0] * fb[i][1] + fa[i][1] * fb[i][0];
    fa[i][0] = re;
    fa[i][1] = im;
  }
  fftw_execute(inv);
  Signal out(length, 0.0);
  for (std::size_t i = 0; i < std::min(length, full); ++i) out[i] = a[i] / double(n);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(pa);
    fftw_destroy_plan(pb);
    fftw_destroy_plan(inv);
  }
  fftw_free(a);
  fftw_free(b);
  fftw_free(fa);
  fftw_free(fb);
  return out;
}

}  // namespace

Signal convolve(const Signal& x, const Signal& h, std::size_t length) {
  if (x.empty() || h.empty()) return Signal(length, 0.0);
  if (h.size() > 64 && x.size() > 64) return fft_convolve(x, h, length);
  Signal out(length, 0.0);
  for (std::size_t i = 0; i < length; ++i) {
    const std::size_t lo = i + 1 > h.size() ? i + 1 - h.size() : 0;
    const std::size_t hi = std::min(i, x.size() - 1);
    double acc = 0;
    for (std::size_t j = lo; j <= hi; ++j) acc += x[j] * h[i - j];
    out[i] = acc;
  }
  return out;
}

double mean_power(const Signal& x) {
  if (x.empty()) return 0.0;
  double acc = 0;
  for (double v : x) acc += v * v;
  return acc / double(x.size());
}

MixtureSample mix(const std::vector<Signal>& dry, const Scene& scene, const RirSet& rirs, double target_snr_db) {
  const std::size_t k_count = dry.size(), m_count = scene.mics.size();
  if (k_count < 2) throw std::invalid_argument("mix: need at least two sources");
  if (k_count != scene.speakers.size())
    throw std::invalid_argument("mix: " + std::to_string(k_count) + " sources for " +
                                std::to_string(scene.speakers.size()) + " speaker positions");
  if (rirs.size() != m_count) throw std::invalid_argument("mix: response set does not match the microphones");
  for (const auto& row : rirs)
    if (row.size() != k_count) throw std::invalid_argument("mix: response set does not match the speakers");
  const std::size_t n = dry.front().size();
  for (std::size_t k = 0; k < k_count; ++k) {
    if (dry[k].size() != n) throw std::invalid_argument("mix: dry sources differ in length");
    if (!(mean_power(dry[k]) > 0)) throw std::invalid_argument("mix: source " + std::to_string(k) + " is silent");
  }

  MixtureSample out;
  out.snr_db = target_snr_db;
  out.t60 = scene.t60;
  out.angle_deg = angle_difference(scene);
  out.images.assign(k_count, std::vector<Signal>(m_count));
  for (std::size_t k = 0; k < k_count; ++k)
    for (std::size_t m = 0; m < m_count; ++m) out.images[k][m] = convolve(dry[k], rirs[m][k], n);

  const double p_first = mean_power(out.images[0][0]);
  if (!(p_first > 0)) throw std::invalid_argument("mix: source 0 is silent at microphone 1");
  out.gains.assign(k_count, 1.0);
  for (std::size_t k = 1; k < k_count; ++k) {
    const double p = mean_power(out.images[k][0]);
    if (!(p > 0)) throw std::invalid_argument("mix: source " + std::to_string(k) + " is silent at microphone 1");
    out.gains[k] = std::sqrt(p_first / (p * std::pow(10.0, target_snr_db / 10.0)));
  }
  for (std::size_t k = 0; k < k_count; ++k) {
    Signal d = dry[k];
    for (auto& v : d) v *= out.gains[k];
    out.dry.push_back(std::move(d));
    for (auto& img : out.images[k])
      for (auto& v : img) v *= out.gains[k];
    out.references.push_back(out.images[k][0]);
  }
  out.mixture.assign(m_count, Signal(n, 0.0));
  for (std::size_t m = 0; m < m_count; ++m)
    for (std::size_t k = 0; k < k_count; ++k)
      for (std::size_t i = 0; i < n; ++i) out.mixture[m][i] += out.images[k][m][i];
  return out;
}

}  // namespace mcsep::spatial
