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

#include "mcsep/model/separator.hpp"

#include <stdexcept>
#include <string>

#include "mcsep/core/ops.hpp"

namespace mcsep::model {

namespace {

using core::Tensor;

template <typename T>
Tensor<T> bottleneck(const Tensor<T>& w, const ParameterSet<T>& params, std::size_t norm_groups) {
  auto h = core::global_layer_norm(w, params.get("bnl.gln.gamma"), params.get("bnl.gln.beta"), T(kNormEps),
                                   norm_groups);
  return core::conv1d(h, params.get("bnl.conv.weight"), params.get("bnl.conv.bias"), 1, 1);
}

// Returns the accumulated skip-connection output.
template <typename T>
Tensor<T> tcn(const Tensor<T>& input, const ParameterSet<T>& params, const ModelConfig& c) {
  Tensor<T> x = input;
  Tensor<T> skip_sum;
  for (std::size_t r = 0; r < c.repeats; ++r) {
    std::size_t dilation = 1;
    for (std::size_t b = 0; b < c.blocks; ++b, dilation *= 2) {
      const std::string p = "tcn." + std::to_string(r) + "." + std::to_string(b) + ".";
      auto h = core::conv1d(x, params.get(p + "in_conv.weight"), params.get(p + "in_conv.bias"), 1, 1);
      h = core::prelu(h, params.get(p + "prelu1"));
      h = core::global_layer_norm(h, params.get(p + "gln1.gamma"), params.get(p + "gln1.beta"), T(kNormEps));
      h = core::conv1d(h, params.get(p + "dconv.weight"), params.get(p + "dconv.bias"), dilation, c.hidden);
      h = core::prelu(h, params.get(p + "prelu2"));
      h = core::global_layer_norm(h, params.get(p + "gln2.gamma"), params.get(p + "gln2.beta"), T(kNormEps));
      auto res = core::conv1d(h, params.get(p + "res_conv.weight"), params.get(p + "res_conv.bias"), 1, 1);
      auto skip = core::conv1d(h, params.get(p + "skip_conv.weight"), params.get(p + "skip_conv.bias"), 1, 1);
      x = core::add(x, res);
      skip_sum = skip_sum.defined() ? core::add(skip_sum, skip) : skip;
    }
  }
  return skip_sum;
}

template <typename T>
Tensor<T> mask(const Tensor<T>& y, const ParameterSet<T>& params, std::size_t k) {
  const std::string p = "me." + std::to_string(k) + ".";
  auto h = core::prelu(y, params.get(p + "prelu"));
  return core::sigmoid(core::conv1d(h, params.get(p + "conv.weight"), params.get(p + "conv.bias"), 1, 1));
}

template <typename T>
void check_channels(const std::vector<Waveform<T>>& channels, const ModelConfig& c, Variant expected) {
  if (c.variant != expected)
    throw std::invalid_argument("separator expects variant " + to_string(expected) + ", config has " +
                                to_string(c.variant));
  if (channels.size() != c.mics)
    throw std::invalid_argument("separator: got " + std::to_string(channels.size()) + " channels, model expects M = " +
                                std::to_string(c.mics));
  for (const auto& ch : channels)
    if (ch.rank() != 1 || ch.numel() != channels.front().numel())
      throw std::invalid_argument("separator: channels must be 1-D waveforms of equal length");
}

template <typename T>
SeparationOutput<T> masks_to_output(std::vector<Tensor<T>> masks, const Tensor<T>& reference_encoding,
                                    const ParameterSet<T>& params, const ModelConfig& c, std::size_t length) {
  SeparationOutput<T> out;
  for (auto& m : masks) out.estimates.push_back(decode(core::mul(m, reference_encoding), params, c, length));
  out.masks = std::move(masks);
  return out;
}

template <typename T>
SeparationOutput<T> run(const std::vector<Waveform<T>>& channels, const ParameterSet<T>& params,
                        const ModelConfig& c) {
  check_channels(channels, c, c.variant);
  const std::size_t length = channels.front().numel();
  std::vector<Tensor<T>> encodings;
  for (const auto& ch : channels) encodings.push_back(encode(ch, params, c));

  std::vector<Tensor<T>> masks;
  switch (c.variant) {
    case Variant::single: {
      auto y = tcn(bottleneck(encodings[0], params, 1), params, c);
      for (std::size_t k = 0; k < c.speakers; ++k) masks.push_back(mask(y, params, k));
      break;
    }
    case Variant::early_fusion: {
      auto fused = c.mics == 1 ? encodings[0] : core::concat_channels(encodings);
      auto y = tcn(bottleneck(fused, params, c.mics), params, c);
      for (std::size_t k = 0; k < c.speakers; ++k) masks.push_back(mask(y, params, k));
      break;
    }
    case Variant::late_fusion: {
      std::vector<Tensor<T>> per_mic;
      for (const auto& w : encodings) per_mic.push_back(tcn(bottleneck(w, params, 1), params, c));
      auto fused = c.mics == 1 ? per_mic[0] : core::concat_channels(per_mic);
      for (std::size_t k = 0; k < c.speakers; ++k) masks.push_back(mask(fused, params, k));
      break;
    }
  }
  return masks_to_output(std::move(masks), encodings[0], params, c, length);
}

}  // namespace

template <typename T>
core::Tensor<T> encode(const Waveform<T>& x, const ParameterSet<T>& params, const ModelConfig& config) {
  if (x.rank() != 1) throw std::invalid_argument("encode: waveform must be 1-D");
  if (x.numel() < config.window)
    throw std::invalid_argument("encode: waveform of " + std::to_string(x.numel()) +
                                " samples is shorter than the window L = " + std::to_string(config.window));
  auto frames = core::segment(x, config.window, config.hop());
  return core::matmul(params.get("encoder.U"), frames.data);
}

template <typename T>
Waveform<T> decode(const core::Tensor<T>& z, const ParameterSet<T>& params, const ModelConfig& config,
                   std::size_t length) {
  core::SegmentMatrix<T> frames{core::matmul(params.get("decoder.V"), z), config.window, config.hop(), length};
  return core::overlap_add(frames);
}

template <typename T>
std::vector<Waveform<T>> separate_single(const Waveform<T>& x, const ParameterSet<T>& params,
                                         const ModelConfig& config) {
  if (config.variant != Variant::single)
    throw std::invalid_argument("separate_single: config variant is " + to_string(config.variant));
  return run<T>({x}, params, config).estimates;
}

template <typename T>
std::vector<Waveform<T>> separate_ef(const std::vector<Waveform<T>>& channels, const ParameterSet<T>& params,
                                     const ModelConfig& config) {
  check_channels(channels, config, Variant::early_fusion);
  return run(channels, params, config).estimates;
}

template <typename T>
std::vector<Waveform<T>> separate_lf(const std::vector<Waveform<T>>& channels, const ParameterSet<T>& params,
                                     const ModelConfig& config) {
  check_channels(channels, config, Variant::late_fusion);
  return run(channels, params, config).estimates;
}

template <typename T>
SeparationOutput<T> forward(const std::vector<Waveform<T>>& channels, const ParameterSet<T>& params,
                            const ModelConfig& config) {
  return run(channels, params, config);
}

std::vector<std::vector<float>> separate(const std::vector<std::vector<float>>& channels,
                                         const ParameterSet<float>& params, const ModelConfig& config) {
  if (channels.size() != config.mics)
    throw std::invalid_argument("input has " + std::to_string(channels.size()) + " channels, model expects M = " +
                                std::to_string(config.mics));
  std::vector<Waveform<float>> inputs;
  for (const auto& ch : channels) {
    if (ch.empty()) throw std::invalid_argument("separate: empty channel");
    inputs.emplace_back(core::Shape{ch.size()}, ch);
  }
  auto out = forward(inputs, params, config);
  std::vector<std::vector<float>> result;
  for (const auto& e : out.estimates) result.emplace_back(e.data().begin(), e.data().end());
  return result;
}

#define MCSEP_INSTANTIATE_SEPARATOR(T)                                                                             \
  template core::Tensor<T> encode(const Waveform<T>&, const ParameterSet<T>&, const ModelConfig&);                 \
  template Waveform<T> decode(const core::Tensor<T>&, const ParameterSet<T>&, const ModelConfig&, std::size_t);    \
  template std::vector<Waveform<T>> separate_single(const Waveform<T>&, const ParameterSet<T>&,                    \
                                                    const ModelConfig&);                                           \
  template std::vector<Waveform<T>> separate_ef(const std::vector<Waveform<T>>&, const ParameterSet<T>&,           \
                                                const ModelConfig&);                                               \
  template std::vector<Waveform<T>> separate_lf(const std::vector<Waveform<T>>&, const ParameterSet<T>&,           \
                                                const ModelConfig&);                                               \
  template SeparationOutput<T> forward(const std::vector<Waveform<T>>&, const ParameterSet<T>&, const ModelConfig&);

MCSEP_INSTANTIATE_SEPARATOR(float)
MCSEP_INSTANTIATE_SEPARATOR(double)

}  // namespace mcsep::model
