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

#include "mcsep/io/wav.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

namespace mcsep::io {

namespace {

static_assert(std::endian::native == std::endian::little, "WAV I/O assumes a little-endian host");

constexpr std::uint16_t kPcm = 1;
constexpr std::uint16_t kFloat = 3;
constexpr std::uint16_t kExtensible = 0xFFFE;

template <typename U>
U read_le(const unsigned char* p) {
  U v;
  std::memcpy(&v, p, sizeof v);
  return v;
}

template <typename U>
void append_le(std::string& out, U v) {
  out.append(reinterpret_cast<const char*>(&v), sizeof v);
}

}  // namespace

std::int16_t quantize_pcm16(double x) {
  return static_cast<std::int16_t>(std::lround(std::clamp(x, -1.0, 1.0) * 32767.0));
}

Audio read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw WavError("cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  auto fail = [&](const std::string& what) { return WavError(path.string() + ": " + what); };
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 || std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw fail("not a RIFF/WAVE file");

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const unsigned char* data = nullptr;
  std::size_t data_size = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    const auto size = read_le<std::uint32_t>(chunk + 4);
    if (pos + 8 + size > bytes.size()) throw fail("truncated chunk");
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16) throw fail("short fmt chunk");
      format = read_le<std::uint16_t>(chunk + 8);
      channels = read_le<std::uint16_t>(chunk + 10);
      rate = read_le<std::uint32_t>(chunk + 12);
      bits = read_le<std::uint16_t>(chunk + 22);
      if (format == kExtensible && size >= 40) format = read_le<std::uint16_t>(chunk + 32);
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = chunk + 8;
      data_size = size;
    }
    pos += 8 + size + (size & 1);
  }
  if (channels == 0) throw fail("missing fmt chunk");
  if (!data) throw fail("missing data chunk");
  const bool pcm16 = format == kPcm && bits == 16;
  const bool float32 = format == kFloat && bits == 32;
  if (!pcm16 && !float32)
    throw fail("unsupported encoding (format " + std::to_string(format) + ", " + std::to_string(bits) +
               " bits); expected 16-bit PCM or 32-bit float");

  const std::size_t width = bits / 8;
  const std::size_t frames = data_size / (width * channels);
  Audio audio;
  audio.sample_rate = static_cast<int>(rate);
  audio.channels.assign(channels, std::vector<float>(frames));
  for (std::size_t f = 0; f < frames; ++f)
    for (std::size_t c = 0; c < channels; ++c) {
      const unsigned char* p = data + (f * channels + c) * width;
      audio.channels[c][f] =
          pcm16 ? static_cast<float>(read_le<std::int16_t>(p) / 32767.0) : read_le<float>(p);
    }
  return audio;
}

void write_wav(const std::filesystem::path& path, const Audio& audio) {
  const std::size_t channels = audio.channels.size();
  if (channels == 0 || channels > 65535) throw WavError(path.string() + ": bad channel count");
  const std::size_t frames = audio.frames();
  for (const auto& ch : audio.channels)
    if (ch.size() != frames) throw WavError(path.string() + ": channels have different lengths");
  if (audio.sample_rate <= 0) throw WavError(path.string() + ": bad sample rate");

  const std::uint32_t data_size = static_cast<std::uint32_t>(frames * channels * 2);
  std::string out;
  out.reserve(44 + data_size);
  out.append("RIFF");
  append_le<std::uint32_t>(out, 36 + data_size);
  out.append("WAVEfmt ");
  append_le<std::uint32_t>(out, 16);
  append_le<std::uint16_t>(out, kPcm);
  append_le<std::uint16_t>(out, static_cast<std::uint16_t>(channels));
  append_le<std::uint32_t>(out, static_cast<std::uint32_t>(audio.sample_rate));
  append_le<std::uint32_t>(out, static_cast<std::uint32_t>(audio.sample_rate * channels * 2));
  append_le<std::uint16_t>(out, static_cast<std::uint16_t>(channels * 2));
  append_le<std::uint16_t>(out, 16);
  out.append("data");
  append_le<std::uint32_t>(out, data_size);
  for (std::size_t f = 0; f < frames; ++f)
    for (std::size_t c = 0; c < channels; ++c) append_le<std::int16_t>(out, quantize_pcm16(audio.channels[c][f]));

  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream file(tmp, std::ios::binary | std::ios::trunc);
    if (!file) throw WavError("cannot open " + tmp.string() + " for writing");
    file.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!file) throw WavError("write to " + tmp.string() + " failed");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace mcsep::io
