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

// Channel-sequential transfer: initialize an M-channel separator from a
// trained (M-1)-channel one.
//
// Only the fused layer depends on the channel count (the bottleneck for
// early fusion, the mask convolutions for late fusion). Its existing input
// columns are copied, the new channel's columns start at zero (or small
// Gaussian noise on request), and new early-fusion gLN rows start at gain 1,
// bias 0. Every other tensor is copied verbatim. A single-channel source may
// seed either two-channel variant.

#include <cstdint>

#include "mcsep/model/config.hpp"
#include "mcsep/model/parameters.hpp"

namespace mcsep::train {

enum class NewSliceInit { zero, gaussian };

struct CstlOptions {
  NewSliceInit init = NewSliceInit::zero;
  double sigma = 1e-3;
  std::uint64_t seed = 0;
};

/// Throws std::invalid_argument when the configurations differ in anything
/// but M, when target M != source M + 1, or when the variants are
/// incompatible.
model::ParameterSet<float> cstl_expand(const model::ParameterSet<float>& source, const model::ModelConfig& source_config,
                                       const model::ModelConfig& target_config, const CstlOptions& options = {});

}  // namespace mcsep::train
