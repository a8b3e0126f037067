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

#include "mcsep/model/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "mcsep/io/keyvalue.hpp"

namespace mcsep::model {

namespace {

constexpr char kMagic[] = "MCSEP1";
constexpr std::size_t kMagicSize = 6;
constexpr std::uint8_t kFloat32 = 1;

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

template <typename U>
void put(std::ofstream& out, U value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof value);
}

template <typename U>
U take(std::ifstream& in, const std::filesystem::path& path) {
  U value{};
  if (!in.read(reinterpret_cast<char*>(&value), sizeof value))
    throw CheckpointError("checkpoint " + path.string() + " is truncated");
  return value;
}

std::string take_string(std::ifstream& in, std::size_t n, const std::filesystem::path& path) {
  if (n > (1u << 24)) throw CheckpointError("checkpoint " + path.string() + " has an implausible string length");
  std::string s(n, '\0');
  if (n && !in.read(s.data(), static_cast<std::streamsize>(n)))
    throw CheckpointError("checkpoint " + path.string() + " is truncated");
  return s;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const ModelConfig& config,
                     const ParameterSet<float>& params) {
  params.check_layout(config);
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw CheckpointError("cannot open " + tmp.string() + " for writing");
    out.write(kMagic, kMagicSize);
    const std::string text = serialize(config);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(text.size()));
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(params.size()));
    for (const auto& [name, t] : params.entries()) {
      put<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
      out.write(name.data(), static_cast<std::streamsize>(name.size()));
      put<std::uint8_t>(out, kFloat32);
      put<std::uint32_t>(out, static_cast<std::uint32_t>(t.rank()));
      for (auto d : t.shape()) put<std::uint64_t>(out, d);
    }
    for (const auto& [name, t] : params.entries())
      out.write(reinterpret_cast<const char*>(t.data().data()),
                static_cast<std::streamsize>(t.numel() * sizeof(float)));
    if (!out) throw CheckpointError("write to " + tmp.string() + " failed");
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint " + path.string());
  char magic[kMagicSize];
  if (!in.read(magic, kMagicSize) || std::memcmp(magic, kMagic, kMagicSize) != 0)
    throw CheckpointError(path.string() + " is not an mcsep checkpoint");

  Checkpoint ck;
  const auto text = take_string(in, take<std::uint32_t>(in, path), path);
  try {
    ck.config = model_config_from(io::KeyValues::parse(text));
    ck.config.validate();
  } catch (const std::exception& e) {
    throw CheckpointError("checkpoint " + path.string() + " has a bad configuration: " + e.what());
  }

  const auto layout = parameter_layout(ck.config);
  const auto count = take<std::uint32_t>(in, path);
  if (count != layout.size())
    throw CheckpointError("checkpoint " + path.string() + " holds " + std::to_string(count) +
                          " tensors, configuration needs " + std::to_string(layout.size()));
  for (std::size_t i = 0; i < count; ++i) {
    const auto name = take_string(in, take<std::uint32_t>(in, path), path);
    const auto dtype = take<std::uint8_t>(in, path);
    const auto rank = take<std::uint32_t>(in, path);
    if (rank > 8) throw CheckpointError("checkpoint " + path.string() + ": bad rank for " + name);
    core::Shape shape(rank);
    for (auto& d : shape) d = static_cast<std::size_t>(take<std::uint64_t>(in, path));
    if (dtype != kFloat32 || name != layout[i].name || shape != layout[i].shape)
      throw CheckpointError("checkpoint " + path.string() + ": tensor " + std::to_string(i) + " is " + name + " " +
                            core::shape_string(shape) + ", expected " + layout[i].name + " " +
                            core::shape_string(layout[i].shape));
  }
  for (const auto& spec : layout) {
    std::vector<float> values(core::shape_numel(spec.shape));
    if (!in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(float))))
      throw CheckpointError("checkpoint " + path.string() + " is truncated in " + spec.name);
    ck.params.add(spec.name, core::Tensor<float>(spec.shape, std::move(values)));
  }
  if (in.peek() != std::ifstream::traits_type::eof())
    throw CheckpointError("checkpoint " + path.string() + " has trailing bytes");
  return ck;
}

}  // namespace mcsep::model
