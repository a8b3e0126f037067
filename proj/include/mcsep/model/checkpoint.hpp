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

// Binary checkpoint: the model configuration followed by every parameter
// tensor in canonical order.
//
//   "MCSEP1"                      6-byte magic
//   u32 n, n bytes                configuration as key=value lines
//   u32 count                     number of tensors
//   per tensor: u32 name length, name, u8 dtype (1 = float32), u32 rank,
//               rank x u64 dims
//   float32 payloads, little endian, in the same order
//
// Loading validates the tensor table against the layout implied by the
// stored configuration.

#include <filesystem>
#include <stdexcept>

#include "mcsep/model/config.hpp"
#include "mcsep/model/parameters.hpp"

namespace mcsep::model {

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Checkpoint {
  ModelConfig config;
  ParameterSet<float> params;
};

/// Writes to a temporary sibling and renames it into place.
void save_checkpoint(const std::filesystem::path& path, const ModelConfig& config, const ParameterSet<float>& params);

Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace mcsep::model
