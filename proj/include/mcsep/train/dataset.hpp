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

#include <string>
#include <vector>

#include "mcsep/io/manifest.hpp"
#include "mcsep/util/random.hpp"

namespace mcsep::train {

struct Sample {
  std::string id;
  std::vector<std::vector<float>> mixture;     // M channels
  std::vector<std::vector<float>> references;  // K sources at the reference microphone
  double angle_deg = 0;
};

/// Reads one manifest row, keeping the first `mics` mixture channels. Throws
/// std::invalid_argument when the file has fewer channels or the lengths
/// disagree.
Sample load_sample(const io::ManifestRow& row, std::size_t mics);

std::vector<Sample> load_samples(const std::vector<io::ManifestRow>& rows, std::size_t mics);

/// Uniformly placed window of `length` samples, identical across all mixture
/// channels and references; shorter samples are zero padded at the end.
Sample compute_crop(const Sample& sample, std::size_t length, util::Rng& rng);

}  // namespace mcsep::train
