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

#include "mcsep/train/dataset.hpp"

#include <stdexcept>

#include "mcsep/io/wav.hpp"

namespace mcsep::train {

Sample load_sample(const io::ManifestRow& row, std::size_t mics) {
  Sample s;
  s.id = row.id();
  s.angle_deg = row.angle_deg;
  auto mixture = io::read_wav(row.mixture);
  if (mixture.channels.size() < mics)
    throw std::invalid_argument(row.mixture.string() + " has " + std::to_string(mixture.channels.size()) +
                                " channels, the model needs M = " + std::to_string(mics));
  mixture.channels.resize(mics);
  s.mixture = std::move(mixture.channels);
  for (const auto& path : row.references) {
    auto ref = io::read_wav(path);
    if (ref.channels.size() != 1) throw std::invalid_argument(path.string() + " is not a mono reference");
    if (ref.frames() != s.mixture.front().size())
      throw std::invalid_argument(path.string() + " length differs from its mixture");
    s.references.push_back(std::move(ref.channels.front()));
  }
  if (s.references.size() < 2) throw std::invalid_argument(row.mixture.string() + ": fewer than two references");
  return s;
}

std::vector<Sample> load_samples(const std::vector<io::ManifestRow>& rows, std::size_t mics) {
  std::vector<Sample> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(load_sample(row, mics));
  return out;
}

Sample compute_crop(const Sample& sample, std::size_t length, util::Rng& rng) {
  if (sample.mixture.empty() || sample.mixture.front().empty())
    throw std::invalid_argument("compute_crop: empty sample");
  if (length == 0) throw std::invalid_argument("compute_crop: zero crop length");
  const std::size_t n = sample.mixture.front().size();
  const std::size_t start = n > length ? util::uniform_index(rng, n - length + 1) : 0;
  auto cut = [&](const std::vector<float>& x) {
    std::vector<float> out(length, 0.0f);
    const std::size_t avail = std::min(length, x.size() - start);
    std::copy_n(x.begin() + static_cast<std::ptrdiff_t>(start), avail, out.begin());
    return out;
  };
  Sample out;
  out.id = sample.id;
  out.angle_deg = sample.angle_deg;
  for (const auto& ch : sample.mixture) out.mixture.push_back(cut(ch));
  for (const auto& r : sample.references) out.references.push_back(cut(r));
  return out;
}

}  // namespace mcsep::train
