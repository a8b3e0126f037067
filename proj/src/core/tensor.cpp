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

#include "mcsep/core/tensor.hpp"

#include <atomic>
#include <cmath>
#include <sstream>
#include <unordered_set>

namespace mcsep::core {

std::size_t shape_numel(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

std::string shape_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "x" : "") << shape[i];
  os << ']';
  return os.str();
}

namespace {
#ifdef NDEBUG
std::atomic<bool> g_finite_checks{false};
#else
std::atomic<bool> g_finite_checks{true};
#endif

void validate_shape(const Shape& shape) {
  if (shape.empty()) throw std::invalid_argument("tensor shape must have at least one dimension");
  for (std::size_t d : shape)
    if (d == 0) throw std::invalid_argument("tensor dimensions must be positive: " + shape_string(shape));
}
}  // namespace

void set_finite_checks(bool enabled) { g_finite_checks.store(enabled); }
bool finite_checks_enabled() { return g_finite_checks.load(); }

template <typename T>
Tensor<T>::Tensor(Shape shape, T fill, bool requires_grad) {
  validate_shape(shape);
  node_ = std::make_shared<detail::Node<T>>();
  node_->data.assign(shape_numel(shape), fill);
  node_->shape = std::move(shape);
  node_->requires_grad = requires_grad;
}

template <typename T>
Tensor<T>::Tensor(Shape shape, std::vector<T> values, bool requires_grad) {
  validate_shape(shape);
  if (values.size() != shape_numel(shape))
    throw std::invalid_argument("tensor: " + std::to_string(values.size()) +
                                " values do not fill shape " + shape_string(shape));
  node_ = std::make_shared<detail::Node<T>>();
  node_->shape = std::move(shape);
  node_->data = std::move(values);
  node_->requires_grad = requires_grad;
}

template <typename T>
detail::Node<T>& Tensor<T>::node() const {
  if (!node_) throw std::logic_error("use of an undefined tensor");
  return *node_;
}

template <typename T>
std::size_t Tensor<T>::dim(std::size_t i) const {
  const Shape& s = node().shape;
  if (i >= s.size())
    throw std::out_of_range("dim " + std::to_string(i) + " of shape " + shape_string(s));
  return s[i];
}

template <typename T>
T Tensor<T>::item() const {
  if (numel() != 1)
    throw std::invalid_argument("item() on tensor of shape " + shape_string(shape()));
  return node().data[0];
}

template <typename T>
void Tensor<T>::set_requires_grad(bool flag) {
  if (!is_leaf()) throw std::logic_error("set_requires_grad on a non-leaf tensor");
  node().requires_grad = flag;
}

template <typename T>
std::span<const T> Tensor<T>::grad() const {
  if (!has_grad()) throw std::logic_error("tensor has no gradient");
  return node().grad;
}

template <typename T>
void Tensor<T>::zero_grad() {
  auto& n = node();
  if (!n.grad.empty()) std::fill(n.grad.begin(), n.grad.end(), T(0));
}

template <typename T>
Tensor<T> Tensor<T>::detach() const {
  return Tensor(shape(), node().data, false);
}

template <typename T>
Tensor<T> Tensor<T>::clone() const {
  return Tensor(shape(), node().data, requires_grad());
}

template <typename T>
Tensor<T> Tensor<T>::make_result(const char* op, Shape shape, std::vector<T> values,
                                 const std::vector<Tensor>& inputs, BackwardFn backward) {
  auto n = std::make_shared<detail::Node<T>>();
  if (values.size() != shape_numel(shape))
    throw std::logic_error(std::string(op) + ": result size does not match shape");
  n->shape = std::move(shape);
  n->data = std::move(values);
  if (finite_checks_enabled()) {
    for (T v : n->data)
      if (!std::isfinite(v)) throw NonFiniteError(std::string(op) + ": non-finite value in result");
  }
  bool tracked = false;
  for (const auto& in : inputs) tracked = tracked || in.requires_grad();
  if (tracked) {
    n->requires_grad = true;
    n->parents.reserve(inputs.size());
    for (const auto& in : inputs) n->parents.push_back(in.node_);
    n->backward = std::move(backward);
  }
  return Tensor(std::move(n));
}

template <typename T>
void backward(const Tensor<T>& root) {
  if (root.numel() != 1)
    throw std::invalid_argument("backward: root must be a scalar, got shape " +
                                shape_string(root.shape()));
  using NodeT = detail::Node<T>;
  NodeT* top = &root.node();
  if (!top->requires_grad) return;

  // Iterative post-order DFS gives a topological order (inputs first).
  std::vector<NodeT*> order;
  std::unordered_set<NodeT*> visited;
  std::vector<std::pair<NodeT*, std::size_t>> stack{{top, 0}};
  visited.insert(top);
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      NodeT* parent = node->parents[next++].get();
      if (parent->requires_grad && visited.insert(parent).second) stack.push_back({parent, 0});
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  for (NodeT* n : order)
    if (!n->is_leaf()) n->grad.assign(n->data.size(), T(0));
  top->ensure_grad()[0] += T(1);
  for (auto it = order.rbegin(); it != order.rend(); ++it)
    if (!(*it)->is_leaf()) (*it)->backward(**it);
}

template class Tensor<float>;
template class Tensor<double>;
template void backward<float>(const Tensor<float>&);
template void backward<double>(const Tensor<double>&);

}  // namespace mcsep::core
