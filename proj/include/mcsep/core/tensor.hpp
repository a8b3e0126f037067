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

// Dense real tensors with a reverse-mode gradient tape.
//
// A Tensor is a shared handle to a graph node: copying the handle aliases the
// same storage. Operations in ops.hpp produce new nodes; when any input
// requires a gradient, the result records its inputs and a backward closure,
// otherwise it is a plain constant and no graph is retained.
//
// Gradient semantics of backward(): gradients of leaf tensors accumulate
// across calls until zero_grad() is called (this is what lets a training step
// sum per-utterance gradients). Intermediate gradients are recomputed from
// scratch on every call, so calling backward twice on the same root doubles
// the leaf gradients and nothing else.

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcsep::core {

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape& shape);
std::string shape_string(const Shape& shape);

/// Raised by the finite-value checks when an op produces NaN or Inf.
class NonFiniteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Finite checks run after every op. Enabled by default in debug builds.
void set_finite_checks(bool enabled);
bool finite_checks_enabled();

template <typename T>
class Tensor;

namespace detail {

template <typename T>
struct Node {
  Shape shape;
  std::vector<T> data;
  std::vector<T> grad;
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  // Reads this node's grad and accumulates into the parents' grads.
  std::function<void(Node&)> backward;

  bool is_leaf() const { return !backward; }
  std::vector<T>& ensure_grad() {
    if (grad.size() != data.size()) grad.assign(data.size(), T(0));
    return grad;
  }
};

}  // namespace detail

template <typename T>
class Tensor {
 public:
  using value_type = T;
  using BackwardFn = std::function<void(detail::Node<T>&)>;

  /// Undefined handle; most accessors throw until assigned.
  Tensor() = default;
  explicit Tensor(Shape shape, T fill = T(0), bool requires_grad = false);
  Tensor(Shape shape, std::vector<T> values, bool requires_grad = false);

  static Tensor scalar(T value, bool requires_grad = false) {
    return Tensor(Shape{1}, std::vector<T>{value}, requires_grad);
  }

  bool defined() const { return static_cast<bool>(node_); }
  const Shape& shape() const { return node().shape; }
  std::size_t rank() const { return node().shape.size(); }
  std::size_t dim(std::size_t i) const;
  std::size_t numel() const { return node().data.size(); }

  std::span<T> data() { return node().data; }
  std::span<const T> data() const { return node().data; }
  T& at(std::size_t r, std::size_t c) { return node().data[r * dim(1) + c]; }
  T at(std::size_t r, std::size_t c) const { return node().data[r * dim(1) + c]; }
  /// Value of a one-element tensor.
  T item() const;

  bool requires_grad() const { return node().requires_grad; }
  /// Only leaves can change their gradient flag.
  void set_requires_grad(bool flag);
  bool is_leaf() const { return node().is_leaf(); }

  bool has_grad() const { return node().grad.size() == node().data.size(); }
  std::span<const T> grad() const;
  std::span<T> mutable_grad() { return node().ensure_grad(); }
  void zero_grad();

  /// New leaf sharing nothing with this tensor; gradient flag cleared.
  Tensor detach() const;
  /// New leaf with copied values and the same gradient flag.
  Tensor clone() const;

  /// Builds an op result. `inputs` are the operands the closure reads; the
  /// closure is dropped (and the result is a constant) when none of them
  /// requires a gradient. `op` names the operation in finite-check errors.
  static Tensor make_result(const char* op, Shape shape, std::vector<T> values,
                            const std::vector<Tensor>& inputs,
                            BackwardFn backward);

  detail::Node<T>& node() const;
  bool same_node(const Tensor& other) const { return node_ == other.node_; }

 private:
  explicit Tensor(std::shared_ptr<detail::Node<T>> node) : node_(std::move(node)) {}
  std::shared_ptr<detail::Node<T>> node_;
};

/// Reverse pass from a one-element root. Throws std::invalid_argument for a
/// root with more than one element.
template <typename T>
void backward(const Tensor<T>& root);

/// Adds `values` into the gradient of `t` when it tracks one.
template <typename T>
inline void accumulate_grad(detail::Node<T>& t, std::span<const T> values) {
  if (!t.requires_grad) return;
  auto& g = t.ensure_grad();
  for (std::size_t i = 0; i < g.size(); ++i) g[i] += values[i];
}

}  // namespace mcsep::core
