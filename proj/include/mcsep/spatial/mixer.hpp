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

// Noise-free multichannel mixing: x_m = sum_k a_{m,k} * s_k.
//
// Every source after the first is rescaled so that the power of its image at
// microphone 1 sits target_snr_db below the first source's image there. The
// mixture is the plain sum of the stored (rescaled) images, in source order.

#include <vector>

#include "mcsep/spatial/geometry.hpp"
#include "mcsep/spatial/rir.hpp"

namespace mcsep::spatial {

using Signal = std::vector<double>;

struct MixtureSample {
  std::vector<Signal> mixture;              // M channels
  std::vector<Signal> references;           // K images at microphone 1
  std::vector<Signal> dry;                  // K rescaled dry sources
  std::vector<std::vector<Signal>> images;  // images[k][m]
  std::vector<double> gains;                // applied to each dry source
  double snr_db = 0;
  double t60 = 0;
  double angle_deg = 0;
};

/// Linear convolution truncated to `length` samples.
Signal convolve(const Signal& x, const Signal& h, std::size_t length);

double mean_power(const Signal& x);

/// All dry sources must share one length; that length is kept. Throws
/// std::invalid_argument for a silent source or mismatched shapes.
MixtureSample mix(const std::vector<Signal>& dry, const Scene& scene, const RirSet& rirs, double target_snr_db);

}  // namespace mcsep::spatial
