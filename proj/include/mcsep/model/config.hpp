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

#include <cstddef>
#include <string>

#include "mcsep/io/keyvalue.hpp"

namespace mcsep::model {

enum class Variant { single, early_fusion, late_fusion };

std::string to_string(Variant v);
/// Accepts "single", "ef"/"early_fusion", "lf"/"late_fusion".
Variant parse_variant(const std::string& s);

/// Architecture hyperparameters of one separator. Field comments give the
/// conventional Conv-TasNet symbol.
struct ModelConfig {
  Variant variant = Variant::single;
  std::size_t mics = 1;         // M
  std::size_t speakers = 2;     // K
  std::size_t window = 16;      // L, encoder window in samples
  std::size_t bases = 64;       // N, encoder basis count
  std::size_t bottleneck = 32;  // B
  std::size_t hidden = 64;      // H, TCN block channels
  std::size_t kernel = 3;       // P, depthwise kernel size (odd)
  std::size_t blocks = 4;       // X, blocks per repeat (dilations 1..2^(X-1))
  std::size_t repeats = 2;      // R
  std::size_t skip = 32;        // Sc, skip-connection channels

  /// Throws std::invalid_argument on an inconsistent configuration.
  void validate() const;

  std::size_t hop() const { return window / 2; }
  /// Rows entering the bottleneck: M*N for early fusion, N otherwise.
  std::size_t bottleneck_inputs() const;
  /// Rows entering each mask estimator: M*Sc for late fusion, Sc otherwise.
  std::size_t mask_inputs() const;

  /// Desk-scale default used by the tools and tests.
  static ModelConfig desk(Variant v = Variant::single, std::size_t mics = 1);
  /// L=16, N=512, B=128 with the H=512, P=3, X=8, R=3 TCN of the original
  /// single-channel network.
  static ModelConfig full_scale(Variant v = Variant::single, std::size_t mics = 1);

  bool operator==(const ModelConfig&) const = default;
};

/// Keys: variant, M, K, L, N, B, H, P, X, R, Sc.
std::string serialize(const ModelConfig& config);
ModelConfig model_config_from(const io::KeyValues& kv, const ModelConfig& defaults = {});

}  // namespace mcsep::model
