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

#include "mcsep/model/parameters.hpp"

#include <cmath>
#include <stdexcept>

#include "mcsep/util/random.hpp"

namespace mcsep::model {

namespace {

std::string block_prefix(std::size_t r, std::size_t x) {
  return "tcn." + std::to_string(r) + "." + std::to_string(x) + ".";
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

std::vector<ParameterSpec> parameter_layout(const ModelConfig& c) {
  c.validate();
  const std::size_t bnl_in = c.bottleneck_inputs();
  const std::size_t me_in = c.mask_inputs();
  std::vector<ParameterSpec> specs{
      {"encoder.U", {c.bases, c.window}},
      {"decoder.V", {c.window, c.bases}},
      {"bnl.gln.gamma", {bnl_in, 1}},
      {"bnl.gln.beta", {bnl_in, 1}},
      {"bnl.conv.weight", {c.bottleneck, bnl_in, 1}},
      {"bnl.conv.bias", {c.bottleneck}},
  };
  for (std::size_t r = 0; r < c.repeats; ++r)
    for (std::size_t x = 0; x < c.blocks; ++x) {
      const std::string p = block_prefix(r, x);
      specs.push_back({p + "in_conv.weight", {c.hidden, c.bottleneck, 1}});
      specs.push_back({p + "in_conv.bias", {c.hidden}});
      specs.push_back({p + "prelu1", {1}});
      specs.push_back({p + "gln1.gamma", {c.hidden, 1}});
      specs.push_back({p + "gln1.beta", {c.hidden, 1}});
      specs.push_back({p + "dconv.weight", {c.hidden, 1, c.kernel}});
      specs.push_back({p + "dconv.bias", {c.hidden}});
      specs.push_back({p + "prelu2", {1}});
      specs.push_back({p + "gln2.gamma", {c.hidden, 1}});
      specs.push_back({p + "gln2.beta", {c.hidden, 1}});
      specs.push_back({p + "res_conv.weight", {c.bottleneck, c.hidden, 1}});
      specs.push_back({p + "res_conv.bias", {c.bottleneck}});
      specs.push_back({p + "skip_conv.weight", {c.skip, c.hidden, 1}});
      specs.push_back({p + "skip_conv.bias", {c.skip}});
    }
  for (std::size_t k = 0; k < c.speakers; ++k) {
    const std::string p = "me." + std::to_string(k) + ".";
    specs.push_back({p + "prelu", {1}});
    specs.push_back({p + "conv.weight", {c.bases, me_in, 1}});
    specs.push_back({p + "conv.bias", {c.bases}});
  }
  return specs;
}

std::size_t count_parameters(const ModelConfig& c) {
  c.validate();
  const std::size_t n = c.bases, l = c.window, b = c.bottleneck, h = c.hidden, p = c.kernel, sc = c.skip;
  const std::size_t bnl_in = c.bottleneck_inputs();
  const std::size_t codec = 2 * n * l;
  const std::size_t bnl = 2 * bnl_in + b * bnl_in + b;
  const std::size_t block = (h * b + h) + 1 + 2 * h + (h * p + h) + 1 + 2 * h + (b * h + b) + (sc * h + sc);
  const std::size_t masks = c.speakers * (1 + n * c.mask_inputs() + n);
  return codec + bnl + c.repeats * c.blocks * block + masks;
}

template <typename T>
void ParameterSet<T>::add(std::string name, core::Tensor<T> tensor) {
  if (index_.count(name)) throw std::invalid_argument("duplicate parameter name: " + name);
  index_.emplace(name, entries_.size());
  entries_.emplace_back(std::move(name), std::move(tensor));
}

template <typename T>
const core::Tensor<T>& ParameterSet<T>::get(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::out_of_range("no parameter named " + name);
  return entries_[it->second].second;
}

template <typename T>
core::Tensor<T>& ParameterSet<T>::get(const std::string& name) {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::out_of_range("no parameter named " + name);
  return entries_[it->second].second;
}

template <typename T>
std::size_t ParameterSet<T>::total_elements() const {
  std::size_t n = 0;
  for (const auto& e : entries_) n += e.second.numel();
  return n;
}

template <typename T>
ParameterSet<T> ParameterSet<T>::clone() const {
  ParameterSet out;
  for (const auto& [name, t] : entries_) out.add(name, t.clone());
  return out;
}

template <typename T>
void ParameterSet<T>::set_requires_grad(bool flag) {
  for (auto& e : entries_) e.second.set_requires_grad(flag);
}

template <typename T>
void ParameterSet<T>::zero_grad() {
  for (auto& e : entries_) e.second.zero_grad();
}

template <typename T>
void ParameterSet<T>::check_layout(const ModelConfig& config) const {
  const auto specs = parameter_layout(config);
  if (specs.size() != entries_.size())
    throw std::invalid_argument("parameter set has " + std::to_string(entries_.size()) + " tensors, config expects " +
                                std::to_string(specs.size()));
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (entries_[i].first != specs[i].name)
      throw std::invalid_argument("parameter " + std::to_string(i) + " is " + entries_[i].first + ", expected " +
                                  specs[i].name);
    if (entries_[i].second.shape() != specs[i].shape)
      throw std::invalid_argument("parameter " + specs[i].name + " has shape " +
                                  core::shape_string(entries_[i].second.shape()) + ", expected " +
                                  core::shape_string(specs[i].shape));
  }
}

template <typename T>
ParameterSet<T> init_parameters(const ModelConfig& config, std::uint64_t seed) {
  ParameterSet<T> out;
  const auto specs = parameter_layout(config);
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto& spec = specs[i];
    core::Tensor<T> t(spec.shape, T(0), true);
    auto v = t.data();
    if (ends_with(spec.name, "gamma")) {
      for (auto& x : v) x = T(1);
    } else if (ends_with(spec.name, "beta")) {
      // zeros
    } else if (ends_with(spec.name, "prelu") || ends_with(spec.name, "prelu1") || ends_with(spec.name, "prelu2")) {
      v[0] = T(0.25);
    } else {
      // Weights fan in over everything but the output dimension; biases share
      // the bound of their weight.
      std::size_t fan_in = 1;
      if (ends_with(spec.name, ".bias")) {
        const auto& w = specs[i - 1];
        for (std::size_t d = 1; d < w.shape.size(); ++d) fan_in *= w.shape[d];
      } else {
        for (std::size_t d = 1; d < spec.shape.size(); ++d) fan_in *= spec.shape[d];
      }
      const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
      auto rng = util::make_rng(seed, "init:" + spec.name);
      for (auto& x : v) x = static_cast<T>(util::uniform(rng, -bound, bound));
    }
    out.add(spec.name, std::move(t));
  }
  return out;
}

template class ParameterSet<float>;
template class ParameterSet<double>;
template ParameterSet<float> init_parameters<float>(const ModelConfig&, std::uint64_t);
template ParameterSet<double> init_parameters<double>(const ModelConfig&, std::uint64_t);

}  // namespace mcsep::model
