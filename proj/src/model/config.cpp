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

#include "mcsep/model/config.hpp"

#include <sstream>
#include <stdexcept>

namespace mcsep::model {

std::string to_string(Variant v) {
  switch (v) {
    case Variant::single: return "single";
    case Variant::early_fusion: return "early_fusion";
    case Variant::late_fusion: return "late_fusion";
  }
  return "unknown";
}

Variant parse_variant(const std::string& s) {
  if (s == "single") return Variant::single;
  if (s == "ef" || s == "early_fusion") return Variant::early_fusion;
  if (s == "lf" || s == "late_fusion") return Variant::late_fusion;
  throw std::invalid_argument("unknown variant '" + s + "' (expected single, ef or lf)");
}

void ModelConfig::validate() const {
  auto positive = [](std::size_t v, const char* name) {
    if (v == 0) throw std::invalid_argument(std::string("model config: ") + name + " must be positive");
  };
  positive(mics, "M");
  positive(bases, "N");
  positive(bottleneck, "B");
  positive(hidden, "H");
  positive(kernel, "P");
  positive(blocks, "X");
  positive(repeats, "R");
  positive(skip, "Sc");
  if (speakers < 2) throw std::invalid_argument("model config: K must be at least 2");
  if (window < 2) throw std::invalid_argument("model config: L must be at least 2");
  if (kernel % 2 == 0) throw std::invalid_argument("model config: P must be odd");
  if (variant == Variant::single && mics != 1)
    throw std::invalid_argument("model config: the single-channel variant requires M = 1");
}

std::size_t ModelConfig::bottleneck_inputs() const {
  return variant == Variant::early_fusion ? mics * bases : bases;
}

std::size_t ModelConfig::mask_inputs() const {
  return variant == Variant::late_fusion ? mics * skip : skip;
}

ModelConfig ModelConfig::desk(Variant v, std::size_t mics) {
  ModelConfig c;
  c.variant = v;
  c.mics = mics;
  return c;
}

ModelConfig ModelConfig::full_scale(Variant v, std::size_t mics) {
  ModelConfig c;
  c.variant = v;
  c.mics = mics;
  c.window = 16;
  c.bases = 512;
  c.bottleneck = 128;
  c.hidden = 512;
  c.kernel = 3;
  c.blocks = 8;
  c.repeats = 3;
  c.skip = 128;
  return c;
}

std::string serialize(const ModelConfig& c) {
  std::ostringstream os;
  os << "variant = " << to_string(c.variant) << '\n'
     << "M = " << c.mics << '\n'
     << "K = " << c.speakers << '\n'
     << "L = " << c.window << '\n'
     << "N = " << c.bases << '\n'
     << "B = " << c.bottleneck << '\n'
     << "H = " << c.hidden << '\n'
     << "P = " << c.kernel << '\n'
     << "X = " << c.blocks << '\n'
     << "R = " << c.repeats << '\n'
     << "Sc = " << c.skip << '\n';
  return os.str();
}

ModelConfig model_config_from(const io::KeyValues& kv, const ModelConfig& defaults) {
  ModelConfig c = defaults;
  if (auto v = kv.get("variant")) c.variant = parse_variant(*v);
  c.mics = kv.get_size("M", c.mics);
  c.speakers = kv.get_size("K", c.speakers);
  c.window = kv.get_size("L", c.window);
  c.bases = kv.get_size("N", c.bases);
  c.bottleneck = kv.get_size("B", c.bottleneck);
  c.hidden = kv.get_size("H", c.hidden);
  c.kernel = kv.get_size("P", c.kernel);
  c.blocks = kv.get_size("X", c.blocks);
  c.repeats = kv.get_size("R", c.repeats);
  // Skip channels follow B unless given explicitly.
  c.skip = kv.get_size("Sc", kv.contains("B") ? c.bottleneck : c.skip);
  return c;
}

}  // namespace mcsep::model
