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

#include "mcsep/train/cstl.hpp"

#include <stdexcept>
#include <string>

#include "mcsep/util/random.hpp"

namespace mcsep::train {

namespace {

using model::ModelConfig;
using model::Variant;

void check_compatible(const ModelConfig& s, const ModelConfig& t) {
  s.validate();
  t.validate();
  if (t.variant == Variant::single)
    throw std::invalid_argument("cstl: the target must be an early- or late-fusion model");
  if (s.variant != t.variant && !(s.variant == Variant::single && s.mics == 1))
    throw std::invalid_argument("cstl: cannot transfer from " + to_string(s.variant) + " to " + to_string(t.variant));
  if (t.mics != s.mics + 1)
    throw std::invalid_argument("cstl: transfer adds exactly one microphone per hop (source M = " +
                                std::to_string(s.mics) + ", target M = " + std::to_string(t.mics) +
                                "); expand sequentially through every intermediate count");
  auto same = [](std::size_t a, std::size_t b, const char* key) {
    if (a != b)
      throw std::invalid_argument(std::string("cstl: ") + key + " differs between source (" + std::to_string(a) +
                                  ") and target (" + std::to_string(b) + ")");
  };
  same(s.speakers, t.speakers, "K");
  same(s.window, t.window, "L");
  same(s.bases, t.bases, "N");
  same(s.bottleneck, t.bottleneck, "B");
  same(s.hidden, t.hidden, "H");
  same(s.kernel, t.kernel, "P");
  same(s.blocks, t.blocks, "X");
  same(s.repeats, t.repeats, "R");
  same(s.skip, t.skip, "Sc");
}

}  // namespace

model::ParameterSet<float> cstl_expand(const model::ParameterSet<float>& source, const ModelConfig& source_config,
                                       const ModelConfig& target_config, const CstlOptions& options) {
  check_compatible(source_config, target_config);
  source.check_layout(source_config);

  model::ParameterSet<float> out;
  for (const auto& spec : model::parameter_layout(target_config)) {
    const auto& src = source.get(spec.name);
    if (src.shape() == spec.shape) {
      out.add(spec.name, src.detach());
      continue;
    }
    const auto values = src.data();
    std::vector<float> widened(core::shape_numel(spec.shape));
    if (spec.name == "bnl.gln.gamma" || spec.name == "bnl.gln.beta") {
      const float fill = spec.name == "bnl.gln.gamma" ? 1.0f : 0.0f;
      std::fill(widened.begin(), widened.end(), fill);
      std::copy(values.begin(), values.end(), widened.begin());
    } else {
      // rows x cols x 1 convolution weight: old columns first, new slice after.
      const std::size_t rows = spec.shape[0], old_cols = src.shape()[1], new_cols = spec.shape[1];
      auto rng = util::make_rng(options.seed, "cstl:" + spec.name, target_config.mics);
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < old_cols; ++c) widened[r * new_cols + c] = values[r * old_cols + c];
        for (std::size_t c = old_cols; c < new_cols; ++c)
          widened[r * new_cols + c] =
              options.init == NewSliceInit::gaussian ? static_cast<float>(options.sigma * util::gaussian(rng)) : 0.0f;
      }
    }
    out.add(spec.name, core::Tensor<float>(spec.shape, std::move(widened)));
  }
  return out;
}

}  // namespace mcsep::train
