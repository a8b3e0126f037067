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

#include <cstdint>
#include <span>
#include <vector>

#include "mcsep/metrics/stft.hpp"
#include "mcsep/train/loss.hpp"

namespace mcsep::metrics {

using Waveform = std::vector<double>;

struct SiSnri {
  std::vector<double> per_speaker;  // indexed by reference
  double mean = 0;
  std::vector<std::size_t> permutation;  // permutation[k] = estimate for reference k
};

/// SI-SNR of the PIT-aligned estimates minus SI-SNR of the unprocessed
/// reference-channel mixture, per reference.
SiSnri si_snri(std::span<const double> mixture, const std::vector<Waveform>& estimates,
               const std::vector<Waveform>& references, const train::SiSnrOptions& options = {});

/// masks[k][frame * bins + bin] is 1 where reference k has the largest
/// magnitude; ties go to the lowest index.
std::vector<std::vector<std::uint8_t>> ibm_masks(const std::vector<Spectrogram>& references);

/// Ideal binary mask oracle applied to the reference-channel mixture.
std::vector<Waveform> ibm_separate(std::span<const double> mixture, const std::vector<Waveform>& references,
                                   const StftOptions& options = {});

}  // namespace mcsep::metrics
