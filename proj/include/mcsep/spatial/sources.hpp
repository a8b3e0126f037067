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

// Dry single-speaker sources for corpus generation.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "mcsep/util/random.hpp"

namespace mcsep::spatial {

/// Implementations must be safe to call concurrently.
class SourceProvider {
 public:
  virtual ~SourceProvider() = default;
  virtual const std::vector<std::string>& speakers() const = 0;
  /// `length` samples of speech from `speaker`, drawn with `rng`.
  virtual std::vector<double> utterance(const std::string& speaker, std::size_t length, util::Rng& rng) const = 0;
  virtual int sample_rate() const = 0;
};

/// Harmonic, formant-filtered, syllable-modulated signals with per-speaker
/// pitch, vocal-tract scale and speaking rate. Speaker ids embed the pool
/// name, so pools with different names never share a speaker.
class SyntheticSpeech : public SourceProvider {
 public:
  SyntheticSpeech(std::string pool, std::size_t speaker_count, int sample_rate = 8000);

  const std::vector<std::string>& speakers() const override { return ids_; }
  std::vector<double> utterance(const std::string& speaker, std::size_t length, util::Rng& rng) const override;
  int sample_rate() const override { return sample_rate_; }

  struct Voice {
    double f0 = 120;          // Hz
    double formant_scale = 1;
    double syllable_rate = 4;  // per second
    double tilt = 1;           // spectral roll-off exponent
  };
  const Voice& voice(const std::string& speaker) const;

 private:
  int sample_rate_;
  std::vector<std::string> ids_;
  std::map<std::string, Voice> voices_;
};

/// Mono WAV files grouped by speaker: either <dir>/<speaker>/*.wav or
/// <dir>/<speaker>_<anything>.wav. Files must use the requested sample rate.
class WavFolder : public SourceProvider {
 public:
  WavFolder(const std::filesystem::path& dir, int sample_rate = 8000);

  const std::vector<std::string>& speakers() const override { return ids_; }
  std::vector<double> utterance(const std::string& speaker, std::size_t length, util::Rng& rng) const override;
  int sample_rate() const override { return sample_rate_; }

 private:
  int sample_rate_;
  std::vector<std::string> ids_;
  std::map<std::string, std::vector<std::filesystem::path>> files_;
};

}  // namespace mcsep::spatial
