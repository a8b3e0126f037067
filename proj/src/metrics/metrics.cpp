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

#include "mcsep/metrics/metrics.hpp"

#include <stdexcept>

namespace mcsep::metrics {

SiSnri si_snri(std::span<const double> mixture, const std::vector<Waveform>& estimates,
               const std::vector<Waveform>& references, const train::SiSnrOptions& options) {
  if (estimates.size() != references.size())
    throw std::invalid_argument("si_snri: " + std::to_string(estimates.size()) + " estimates for " +
                                std::to_string(references.size()) + " references");
  const auto pit = train::pit_loss<double>(estimates, references, options);
  SiSnri out;
  out.permutation = pit.permutation;
  for (std::size_t k = 0; k < references.size(); ++k) {
    const std::span<const double> ref(references[k]);
    const double separated = train::si_snr<double>(estimates[pit.permutation[k]], ref, options);
    const double unprocessed = train::si_snr<double>(mixture, ref, options);
    out.per_speaker.push_back(separated - unprocessed);
    out.mean += out.per_speaker.back() / double(references.size());
  }
  return out;
}

std::vector<std::vector<std::uint8_t>> ibm_masks(const std::vector<Spectrogram>& refs) {
  if (refs.empty()) return {};
  const std::size_t cells = refs.front().data.size();
  for (const auto& r : refs)
    if (r.data.size() != cells) throw std::invalid_argument("ibm_masks: spectrogram sizes differ");
  std::vector<std::vector<std::uint8_t>> masks(refs.size(), std::vector<std::uint8_t>(cells, 0));
  for (std::size_t i = 0; i < cells; ++i) {
    std::size_t best = 0;
    double best_mag = std::norm(refs[0].data[i]);
    for (std::size_t k = 1; k < refs.size(); ++k) {
      const double mag = std::norm(refs[k].data[i]);
      if (mag > best_mag) {
        best = k;
        best_mag = mag;
      }
    }
    masks[best][i] = 1;
  }
  return masks;
}

std::vector<Waveform> ibm_separate(std::span<const double> mixture, const std::vector<Waveform>& references,
                                   const StftOptions& options) {
  for (const auto& r : references)
    if (r.size() != mixture.size()) throw std::invalid_argument("ibm_separate: reference length differs from mixture");
  std::vector<Spectrogram> specs;
  for (const auto& r : references) specs.push_back(stft(r, options));
  const auto masks = ibm_masks(specs);
  const auto mix = stft(mixture, options);
  std::vector<Waveform> out;
  for (const auto& mask : masks) {
    Spectrogram masked = mix;
    for (std::size_t i = 0; i < masked.data.size(); ++i)
      if (!mask[i]) masked.data[i] = 0.0;
    out.push_back(istft(masked, mixture.size(), options));
  }
  return out;
}

}  // namespace mcsep::metrics
