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

// Image-source room impulse responses.
//
// All six walls share one reflection coefficient beta = sqrt(1 - alpha). Each
// image contributes beta^(reflections) / (4 pi d) at delay d / c, rendered as
// a Hann-windowed sinc so that fractional delays stay band-limited. Taps that
// would fall before time zero are dropped. With T60 = 0 only the direct path
// is rendered.
//
// With all-positive reflection coefficients the late images pile up
// coherently at low frequencies, so reverberant responses pass through a
// second-order Butterworth high-pass (50 Hz by default), as in Allen and
// Berkley's original method. Anechoic responses are left unfiltered.
//
// The default absorption rule starts from Sabine's formula and then corrects
// alpha by bisection until the Schroeder decay of the image-source energy
// envelope matches the requested T60. Plain Sabine or Eyring inversion is
// available as an option.

#include <vector>

#include "mcsep/spatial/geometry.hpp"

namespace mcsep::spatial {

enum class AbsorptionRule { calibrated, sabine, eyring };

/// alpha = 0.161 V / (S T60).
double sabine_absorption(const Vec3& room, double t60);
/// alpha = 1 - exp(-0.161 V / (S T60)).
double eyring_absorption(const Vec3& room, double t60);

struct RirOptions {
  int sample_rate = 8000;
  double sound_speed = 343.0;
  int sinc_half_width = 32;  // taps on each side of the delay
  AbsorptionRule rule = AbsorptionRule::calibrated;
  double highpass_hz = 50.0;  // 0 disables
};

/// Samples needed for a response: max(T60 * fs, direct delay) plus the sinc
/// half-width, and never fewer than T60 * fs.
std::size_t rir_length(const Vec3& source, const Vec3& mic, double t60, const RirOptions& options);

/// Uniform wall absorption for the requested T60 under options.rule. The
/// calibrated rule tunes alpha on the source-microphone path given.
double wall_absorption(const Vec3& room, const Vec3& source, const Vec3& mic, double t60,
                       const RirOptions& options = {});

/// Throws std::invalid_argument when source and microphone coincide or lie
/// outside the room, or when the target T60 needs absorption above 1.
std::vector<double> simulate_rir(const Vec3& room, const Vec3& source, const Vec3& mic, double t60,
                                 const RirOptions& options = {});

/// Same, with the absorption given explicitly (ignored when t60 == 0).
std::vector<double> simulate_rir(const Vec3& room, const Vec3& source, const Vec3& mic, double t60, double alpha,
                                 const RirOptions& options);

/// responses[m][k] is the path from speaker k to microphone m. One absorption
/// value, tuned on speaker 1 to microphone 1, is shared by all paths.
using RirSet = std::vector<std::vector<std::vector<double>>>;
RirSet simulate_rirs(const Scene& scene, const RirOptions& options = {});

/// In-place second-order Butterworth high-pass (bilinear transform).
void highpass(std::vector<double>& x, double cutoff_hz, int sample_rate);

/// Adds amplitude * windowed-sinc centered at `delay` (in samples) to `out`.
void add_fractional_impulse(std::vector<double>& out, double delay, double amplitude, int half_width);

/// Reverberation time from Schroeder backward integration, by a least-squares
/// line fit of the decay curve between -5 and -25 dB extrapolated to -60 dB.
double measure_t60(const std::vector<double>& rir, int sample_rate);

/// Same fit on a per-sample energy envelope.
double measure_t60_energy(const std::vector<double>& energy, int sample_rate);

}  // namespace mcsep::spatial
