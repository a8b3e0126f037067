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

// Corpus manifest: one tab-separated row per mixture.
//
//   mixture  references  snr_db  t60_s  angle_deg  seed  speakers
//
// references and speakers are comma-separated lists (one entry per source).
// Paths are stored relative to the manifest's directory when they lie below
// it. Lines starting with '#' are comments.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace mcsep::io {

struct ManifestRow {
  std::filesystem::path mixture;
  std::vector<std::filesystem::path> references;
  double snr_db = 0;
  double t60_s = 0;
  double angle_deg = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> speakers;

  /// Utterance id: the mixture file name without extension.
  std::string id() const { return mixture.stem().string(); }
};

/// Paths in the result are resolved against the manifest's directory.
std::vector<ManifestRow> read_manifest(const std::filesystem::path& path);

void write_manifest(const std::filesystem::path& path, const std::vector<ManifestRow>& rows);

}  // namespace mcsep::io
