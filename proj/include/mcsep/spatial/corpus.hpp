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

// Corpus generation: sampled scenes, simulated responses, SNR-controlled
// mixing, WAV output and a manifest.
//
// Layout under the output directory:
//   mix/<split>_<index>.wav          M-channel mixture
//   ref/<split>_<index>_s<k>.wav     reverberant image of source k at mic 1
//   manifest.tsv
//
// Sample i draws everything from the child seed (seed, "sample", i), so the
// corpus is the same whatever the thread count. Mixture and references of
// one sample share a gain that keeps the peak at or below `peak`.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "mcsep/io/keyvalue.hpp"
#include "mcsep/io/manifest.hpp"
#include "mcsep/spatial/geometry.hpp"
#include "mcsep/spatial/mixer.hpp"
#include "mcsep/spatial/rir.hpp"
#include "mcsep/spatial/sources.hpp"

namespace mcsep::spatial {

struct CorpusConfig {
  std::size_t count = 10;
  std::size_t mics = 2;
  std::size_t speakers = 2;
  double seconds = 4.0;
  bool reverberant = true;
  double t60_min = 0.2;
  double t60_max = 0.6;
  double snr_min = -5.0;
  double snr_max = 5.0;
  std::uint64_t seed = 0;
  std::string split = "train";
  std::string source = "synthetic";  // synthetic | folder
  std::filesystem::path source_dir;
  std::size_t speaker_pool = 16;
  std::size_t threads = 1;
  double peak = 0.9;
  int sample_rate = 8000;

  void validate() const;
};

/// Keys: count, mics, speakers, seconds, reverberant, t60_min, t60_max,
/// snr_min, snr_max, seed, split, source, source_dir, speaker_pool, threads.
/// Unknown keys are rejected.
CorpusConfig corpus_config_from(const io::KeyValues& kv, const CorpusConfig& defaults = {});
std::string serialize(const CorpusConfig& config);

std::unique_ptr<SourceProvider> make_provider(const CorpusConfig& config);

struct GeneratedSample {
  Scene scene;
  MixtureSample mixture;
  std::vector<std::string> speakers;
  std::uint64_t seed = 0;
};

GeneratedSample generate_sample(const CorpusConfig& config, const SourceProvider& provider, std::size_t index);

/// Writes the corpus and returns its manifest rows (also written to
/// <out_dir>/manifest.tsv). Creates out_dir when missing.
std::vector<io::ManifestRow> generate_corpus(const CorpusConfig& config, const SourceProvider& provider,
                                             const std::filesystem::path& out_dir);

}  // namespace mcsep::spatial
