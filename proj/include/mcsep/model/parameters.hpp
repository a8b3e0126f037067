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

// Named trainable tensors of one separator, in a fixed canonical order.
//
// Naming scheme (k counts speakers, r repeats, x blocks, all from 0):
//   encoder.U                       N x L
//   decoder.V                       L x N
//   bnl.gln.gamma / bnl.gln.beta    C x 1   (C = M*N for early fusion, else N)
//   bnl.conv.weight / .bias         B x C x 1 / B
//   tcn.<r>.<x>.in_conv.weight      H x B x 1   (+ .bias H)
//   tcn.<r>.<x>.prelu1 / prelu2     1
//   tcn.<r>.<x>.gln1.gamma|beta     H x 1   (gln2 likewise)
//   tcn.<r>.<x>.dconv.weight        H x 1 x P   (+ .bias H)
//   tcn.<r>.<x>.res_conv.weight     B x H x 1   (+ .bias B)
//   tcn.<r>.<x>.skip_conv.weight    Sc x H x 1  (+ .bias Sc)
//   me.<k>.prelu                    1
//   me.<k>.conv.weight / .bias      N x S x 1 / N   (S = M*Sc for late fusion, else Sc)

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mcsep/core/tensor.hpp"
#include "mcsep/model/config.hpp"

namespace mcsep::model {

struct ParameterSpec {
  std::string name;
  core::Shape shape;
};

/// Canonical names and shapes for `config`.
std::vector<ParameterSpec> parameter_layout(const ModelConfig& config);

/// Closed-form trainable-parameter count.
std::size_t count_parameters(const ModelConfig& config);

template <typename T>
class ParameterSet {
 public:
  using Entry = std::pair<std::string, core::Tensor<T>>;

  void add(std::string name, core::Tensor<T> tensor);
  bool contains(const std::string& name) const { return index_.count(name) != 0; }
  const core::Tensor<T>& get(const std::string& name) const;
  core::Tensor<T>& get(const std::string& name);

  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  std::size_t total_elements() const;

  /// Deep copy; gradient flags preserved, gradients dropped.
  ParameterSet clone() const;
  template <typename U>
  ParameterSet<U> cast() const;

  void set_requires_grad(bool flag);
  void zero_grad();

  /// Throws std::invalid_argument unless names and shapes equal the layout.
  void check_layout(const ModelConfig& config) const;

 private:
  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Fresh parameters: uniform(+-1/sqrt(fan_in)) weights and biases, unit gLN
/// gains, zero gLN biases, PReLU slopes 0.25.
template <typename T>
ParameterSet<T> init_parameters(const ModelConfig& config, std::uint64_t seed);

template <typename T>
template <typename U>
ParameterSet<U> ParameterSet<T>::cast() const {
  ParameterSet<U> out;
  for (const auto& [name, t] : entries_) {
    std::vector<U> values(t.data().begin(), t.data().end());
    out.add(name, core::Tensor<U>(t.shape(), std::move(values), t.requires_grad()));
  }
  return out;
}

}  // namespace mcsep::model
