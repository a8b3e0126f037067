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

#include "mcsep/spatial/sources.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include "mcsep/io/wav.hpp"

namespace mcsep::spatial {

namespace {

struct Vowel {
  double f1, f2, f3;
};

// Rough adult formant frequencies for a handful of vowels.
constexpr Vowel kVowels[] = {
    {730, 1090, 2440}, {270, 2290, 3010}, {530, 1840, 2480}, {660, 1720, 2410},
    {570, 840, 2410},  {300, 870, 2240},  {440, 1020, 2240}, {490, 1350, 1690},
};

double resonance(double f, double center, double bandwidth) {
  const double x = (f - center) / bandwidth;
  return 1.0 / (1.0 + x * x);
}

void normalize_rms(std::vector<double>& x, double target) {
  double acc = 0;
  for (double v : x) acc += v * v;
  const double rms = std::sqrt(acc / double(std::max<std::size_t>(x.size(), 1)));
  if (rms > 0)
    for (auto& v : x) v *= target / rms;
}

}  // namespace

SyntheticSpeech::SyntheticSpeech(std::string pool, std::size_t speaker_count, int sample_rate)
    : sample_rate_(sample_rate) {
  if (speaker_count < 2) throw std::invalid_argument("synthetic speech: need at least two speakers");
  if (sample_rate <= 0) throw std::invalid_argument("synthetic speech: bad sample rate");
  for (std::size_t i = 0; i < speaker_count; ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "-spk%03zu", i);
    const std::string id = pool + buf;
    auto rng = util::make_rng(util::fnv1a(id), "voice");
    Voice v;
    v.f0 = util::uniform(rng, 85.0, 250.0);
    v.formant_scale = util::uniform(rng, 0.85, 1.2);
    v.syllable_rate = util::uniform(rng, 3.0, 6.0);
    v.tilt = util::uniform(rng, 0.8, 1.6);
    ids_.push_back(id);
    voices_.emplace(id, v);
  }
}

const SyntheticSpeech::Voice& SyntheticSpeech::voice(const std::string& speaker) const {
  auto it = voices_.find(speaker);
  if (it == voices_.end()) throw std::invalid_argument("synthetic speech: unknown speaker " + speaker);
  return it->second;
}

std::vector<double> SyntheticSpeech::utterance(const std::string& speaker, std::size_t length, util::Rng& rng) const {
  const Voice& v = voice(speaker);
  const double fs = sample_rate_;
  const double nyquist_guard = 0.475 * fs;
  std::vector<double> out(length, 0.0);
  std::vector<double> phase(64, 0.0);
  std::size_t pos = util::uniform_index(rng, static_cast<std::uint64_t>(0.1 * fs) + 1);
  double noise_state = 0;

  while (pos < length) {
    const double dur = util::uniform(rng, 0.6, 1.4) / v.syllable_rate;
    const auto n = static_cast<std::size_t>(dur * fs);
    const Vowel& a = kVowels[util::uniform_index(rng, std::size(kVowels))];
    const Vowel& b = kVowels[util::uniform_index(rng, std::size(kVowels))];
    const double f0_start = v.f0 * util::uniform(rng, 0.85, 1.15);
    const double f0_end = v.f0 * util::uniform(rng, 0.8, 1.2);
    const double loud = util::uniform(rng, 0.5, 1.0);
    const bool fricative = util::uniform(rng, 0.0, 1.0) < 0.3;
    const auto onset = static_cast<std::size_t>(fricative ? util::uniform(rng, 0.03, 0.08) * fs : 0);

    for (std::size_t i = 0; i < n && pos + i < length; ++i) {
      const double t = double(i) / double(n);
      const double env = std::sin(std::numbers::pi * t);
      double sample = 0;
      if (i < onset) {
        // Crude fricative: differenced noise burst before the vowel.
        const double w = util::gaussian(rng);
        sample = 0.3 * (w - noise_state) * std::sin(std::numbers::pi * double(i) / double(onset));
        noise_state = w;
      } else {
        const double f0 = f0_start + (f0_end - f0_start) * t;
        const double f1 = v.formant_scale * (a.f1 + (b.f1 - a.f1) * t);
        const double f2 = v.formant_scale * (a.f2 + (b.f2 - a.f2) * t);
        const double f3 = v.formant_scale * (a.f3 + (b.f3 - a.f3) * t);
        for (std::size_t h = 1; h < phase.size(); ++h) {
          const double f = f0 * double(h);
          if (f >= nyquist_guard) break;
          const double amp = (resonance(f, f1, 90) + 0.7 * resonance(f, f2, 120) + 0.4 * resonance(f, f3, 170)) /
                             std::pow(double(h), 0.5 * v.tilt);
          phase[h] += 2.0 * std::numbers::pi * f / fs;
          if (phase[h] > 2.0 * std::numbers::pi) phase[h] -= 2.0 * std::numbers::pi;
          sample += amp * std::sin(phase[h]);
        }
        sample *= env;
      }
      out[pos + i] += loud * sample;
    }
    pos += n + static_cast<std::size_t>(util::uniform(rng, 0.0, 0.08) * fs);
  }
  normalize_rms(out, 0.1);
  return out;
}

WavFolder::WavFolder(const std::filesystem::path& dir, int sample_rate) : sample_rate_(sample_rate) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw std::invalid_argument("source folder " + dir.string() + " does not exist");
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".wav") continue;
    const auto rel = entry.path().lexically_relative(dir);
    std::string speaker;
    if (std::distance(rel.begin(), rel.end()) > 1) {
      speaker = rel.begin()->string();
    } else {
      const auto stem = entry.path().stem().string();
      speaker = stem.substr(0, stem.find('_'));
    }
    files_[speaker].push_back(entry.path());
  }
  for (auto& [speaker, paths] : files_) {
    std::sort(paths.begin(), paths.end());
    ids_.push_back(speaker);
  }
  if (ids_.size() < 2) throw std::invalid_argument("source folder " + dir.string() + " holds fewer than two speakers");
}

std::vector<double> WavFolder::utterance(const std::string& speaker, std::size_t length, util::Rng& rng) const {
  auto it = files_.find(speaker);
  if (it == files_.end()) throw std::invalid_argument("unknown speaker " + speaker);
  const auto& path = it->second[util::uniform_index(rng, it->second.size())];
  const auto audio = io::read_wav(path);
  if (audio.sample_rate != sample_rate_)
    throw std::invalid_argument(path.string() + " is sampled at " + std::to_string(audio.sample_rate) +
                                " Hz, expected " + std::to_string(sample_rate_));
  if (audio.channels.size() != 1) throw std::invalid_argument(path.string() + " is not mono");
  const auto& x = audio.channels.front();
  std::vector<double> out(length, 0.0);
  const std::size_t start = x.size() > length ? util::uniform_index(rng, x.size() - length + 1) : 0;
  for (std::size_t i = 0; i < length && start + i < x.size(); ++i) out[i] = x[start + i];
  normalize_rms(out, 0.1);
  return out;
}

}  // namespace mcsep::spatial
