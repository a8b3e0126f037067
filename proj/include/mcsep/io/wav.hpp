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

// RIFF/WAVE reading and writing.
//
// Files are written as 16-bit little-endian PCM, channels interleaved. A
// sample x is stored as round(clamp(x, -1, 1) * 32767) and read back as
// v / 32767, so reading a file and writing it again reproduces it byte for
// byte. Reading also accepts 32-bit IEEE float files.

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <vector>

namespace mcsep::io {

class WavError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Audio {
  int sample_rate = 8000;
  std::vector<std::vector<float>> channels;  // equal lengths

  std::size_t frames() const { return channels.empty() ? 0 : channels.front().size(); }
};

Audio read_wav(const std::filesystem::path& path);

/// Writes through a temporary sibling that is renamed into place.
void write_wav(const std::filesystem::path& path, const Audio& audio);

std::int16_t quantize_pcm16(double x);

}  // namespace mcsep::io
