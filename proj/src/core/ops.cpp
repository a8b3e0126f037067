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

#include "mcsep/core/ops.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mcsep/simd/kernels.hpp"

namespace mcsep::core {

namespace {

using detail::Node;

template <typename T>
void require_rank(const Tensor<T>& t, std::size_t rank, const char* op, const char* what) {
  if (t.rank() != rank)
    throw std::invalid_argument(std::string(op) + ": " + what + " must have rank " +
                                std::to_string(rank) + ", got " + shape_string(t.shape()));
}

// Valid output frames for a tap at frame offset `off`: t in [lo, hi) keeps
// t + off inside [0, frames).
struct TapRange {
  std::size_t lo = 0;
  std::size_t hi = 0;
};

TapRange tap_range(std::ptrdiff_t off, std::size_t frames) {
  const auto n = static_cast<std::ptrdiff_t>(frames);
  const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, -off);
  const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n, n - off);
  if (hi <= lo) return {};
  return {static_cast<std::size_t>(lo), static_cast<std::size_t>(hi)};
}

}  // namespace

template <typename T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b) {
  require_rank(a, 2, "matmul", "left operand");
  require_rank(b, 2, "matmul", "right operand");
  const std::size_t p = a.dim(0), q = a.dim(1), r = b.dim(1);
  if (b.dim(0) != q)
    throw std::invalid_argument("matmul: inner dimensions differ: " + shape_string(a.shape()) +
                                " x " + shape_string(b.shape()));
  const auto& k = simd::kernels<T>();
  std::vector<T> out(p * r, T(0));
  k.gemm(p, q, r, a.data().data(), q, 1, b.data().data(), r, out.data(), r);

  Node<T>* na = &a.node();
  Node<T>* nb = &b.node();
  return Tensor<T>::make_result("matmul", {p, r}, std::move(out), {a, b}, [na, nb, p, q, r](Node<T>& self) {
    const auto& k = simd::kernels<T>();
    const T* g = self.grad.data();
    if (na->requires_grad)  // dA += dC * B^T
      k.gemm_nt(p, q, r, g, r, nb->data.data(), r, na->ensure_grad().data(), q);
    if (nb->requires_grad)  // dB += A^T * dC
      k.gemm(q, p, r, na->data.data(), 1, q, g, r, nb->ensure_grad().data(), r);
  });
}

template <typename T>
Tensor<T> conv1d(const Tensor<T>& input, const Tensor<T>& kernel, const Tensor<T>& bias,
                 std::size_t dilation, std::size_t groups) {
  require_rank(input, 2, "conv1d", "input");
  require_rank(kernel, 3, "conv1d", "kernel");
  const std::size_t c_in = input.dim(0), frames = input.dim(1);
  const std::size_t c_out = kernel.dim(0), c_group = kernel.dim(1), taps = kernel.dim(2);
  if (groups == 0 || dilation == 0) throw std::invalid_argument("conv1d: groups and dilation must be positive");
  if (taps % 2 == 0)
    throw std::invalid_argument("conv1d: kernel size must be odd for same padding, got " + std::to_string(taps));
  if (c_in % groups != 0 || c_out % groups != 0)
    throw std::invalid_argument("conv1d: channels (" + std::to_string(c_in) + " in, " + std::to_string(c_out) +
                                " out) not divisible by groups " + std::to_string(groups));
  if (c_group != c_in / groups)
    throw std::invalid_argument("conv1d: kernel " + shape_string(kernel.shape()) + " does not match " +
                                std::to_string(c_in) + " input channels in " + std::to_string(groups) + " groups");
  const bool has_bias = bias.defined();
  if (has_bias && bias.numel() != c_out)
    throw std::invalid_argument("conv1d: bias must have " + std::to_string(c_out) + " elements");

  const auto& k = simd::kernels<T>();
  const bool pointwise = taps == 1 && groups == 1;
  const std::size_t out_per_group = c_out / groups;
  const auto half = static_cast<std::ptrdiff_t>((taps - 1) / 2);
  const T* x = input.data().data();
  const T* w = kernel.data().data();

  std::vector<T> out(c_out * frames, T(0));
  if (pointwise) {
    k.gemm(c_out, c_in, frames, w, c_in, 1, x, frames, out.data(), frames);
  } else {
    for (std::size_t o = 0; o < c_out; ++o) {
      const std::size_t first_in = (o / out_per_group) * c_group;
      for (std::size_t ci = 0; ci < c_group; ++ci) {
        const T* xrow = x + (first_in + ci) * frames;
        for (std::size_t p = 0; p < taps; ++p) {
          const std::ptrdiff_t off = (static_cast<std::ptrdiff_t>(p) - half) * static_cast<std::ptrdiff_t>(dilation);
          const TapRange tr = tap_range(off, frames);
          if (tr.hi == tr.lo) continue;
          k.axpy(w[(o * c_group + ci) * taps + p], xrow + tr.lo + off, out.data() + o * frames + tr.lo, tr.hi - tr.lo);
        }
      }
    }
  }
  if (has_bias) {
    const T* b = bias.data().data();
    for (std::size_t o = 0; o < c_out; ++o)
      for (std::size_t t = 0; t < frames; ++t) out[o * frames + t] += b[o];
  }

  Node<T>* nx = &input.node();
  Node<T>* nw = &kernel.node();
  Node<T>* nb = has_bias ? &bias.node() : nullptr;
  std::vector<Tensor<T>> inputs{input, kernel};
  if (has_bias) inputs.push_back(bias);
  return Tensor<T>::make_result(
      "conv1d", {c_out, frames}, std::move(out), inputs,
      [=](Node<T>& self) {
        const auto& k = simd::kernels<T>();
        const T* g = self.grad.data();
        if (pointwise) {
          if (nx->requires_grad)  // dX += W^T dY
            k.gemm(c_in, c_out, frames, nw->data.data(), 1, c_in, g, frames, nx->ensure_grad().data(), frames);
          if (nw->requires_grad)  // dW += dY X^T
            k.gemm_nt(c_out, c_in, frames, g, frames, nx->data.data(), frames, nw->ensure_grad().data(), c_in);
        } else {
          T* dx = nx->requires_grad ? nx->ensure_grad().data() : nullptr;
          T* dw = nw->requires_grad ? nw->ensure_grad().data() : nullptr;
          for (std::size_t o = 0; o < c_out; ++o) {
            const std::size_t first_in = (o / out_per_group) * c_group;
            const T* grow = g + o * frames;
            for (std::size_t ci = 0; ci < c_group; ++ci) {
              const std::size_t row = (first_in + ci) * frames;
              for (std::size_t p = 0; p < taps; ++p) {
                const std::ptrdiff_t off =
                    (static_cast<std::ptrdiff_t>(p) - half) * static_cast<std::ptrdiff_t>(dilation);
                const TapRange tr = tap_range(off, frames);
                if (tr.hi == tr.lo) continue;
                const std::size_t widx = (o * c_group + ci) * taps + p;
                if (dx) k.axpy(nw->data[widx], grow + tr.lo, dx + row + tr.lo + off, tr.hi - tr.lo);
                if (dw) dw[widx] += k.dot(grow + tr.lo, nx->data.data() + row + tr.lo + off, tr.hi - tr.lo);
              }
            }
          }
        }
        if (nb && nb->requires_grad) {
          auto& db = nb->ensure_grad();
          for (std::size_t o = 0; o < c_out; ++o) {
            T acc = 0;
            for (std::size_t t = 0; t < frames; ++t) acc += g[o * frames + t];
            db[o] += acc;
          }
        }
      });
}

template <typename T>
Tensor<T> global_layer_norm(const Tensor<T>& input, const Tensor<T>& gamma, const Tensor<T>& beta, T eps,
                            std::size_t groups) {
  require_rank(input, 2, "global_layer_norm", "input");
  const std::size_t channels = input.dim(0), frames = input.dim(1);
  if (!(eps > T(0))) throw std::invalid_argument("global_layer_norm: eps must be positive");
  if (gamma.numel() != channels || beta.numel() != channels)
    throw std::invalid_argument("global_layer_norm: gain and bias need " + std::to_string(channels) + " elements");
  if (groups == 0 || channels % groups != 0)
    throw std::invalid_argument("global_layer_norm: " + std::to_string(channels) +
                                " channels not divisible into " + std::to_string(groups) + " groups");
  const std::size_t block = (channels / groups) * frames;
  const T* x = input.data().data();
  const T* gm = gamma.data().data();
  const T* bt = beta.data().data();

  std::vector<T> xhat(channels * frames);
  std::vector<T> inv_std(groups);
  std::vector<T> out(channels * frames);
  for (std::size_t gi = 0; gi < groups; ++gi) {
    const T* xs = x + gi * block;
    double mean = 0;
    for (std::size_t i = 0; i < block; ++i) mean += xs[i];
    mean /= static_cast<double>(block);
    double var = 0;
    for (std::size_t i = 0; i < block; ++i) {
      const double d = xs[i] - mean;
      var += d * d;
    }
    var /= static_cast<double>(block);
    const double inv = 1.0 / std::sqrt(var + static_cast<double>(eps));
    inv_std[gi] = static_cast<T>(inv);
    for (std::size_t i = 0; i < block; ++i)
      xhat[gi * block + i] = static_cast<T>((xs[i] - mean) * inv);
  }
  for (std::size_t c = 0; c < channels; ++c)
    for (std::size_t t = 0; t < frames; ++t)
      out[c * frames + t] = gm[c] * xhat[c * frames + t] + bt[c];

  Node<T>* nx = &input.node();
  Node<T>* ng = &gamma.node();
  Node<T>* nbt = &beta.node();
  return Tensor<T>::make_result(
      "global_layer_norm", {channels, frames}, std::move(out), {input, gamma, beta},
      [=, xhat = std::move(xhat), inv_std = std::move(inv_std)](Node<T>& self) {
        const T* g = self.grad.data();
        if (ng->requires_grad || nbt->requires_grad) {
          T* dg = ng->requires_grad ? ng->ensure_grad().data() : nullptr;
          T* db = nbt->requires_grad ? nbt->ensure_grad().data() : nullptr;
          for (std::size_t c = 0; c < channels; ++c) {
            double sg = 0, sb = 0;
            for (std::size_t t = 0; t < frames; ++t) {
              sg += static_cast<double>(g[c * frames + t]) * xhat[c * frames + t];
              sb += g[c * frames + t];
            }
            if (dg) dg[c] += static_cast<T>(sg);
            if (db) db[c] += static_cast<T>(sb);
          }
        }
        if (!nx->requires_grad) return;
        auto& dx = nx->ensure_grad();
        const std::size_t rows = channels / groups;
        for (std::size_t gi = 0; gi < groups; ++gi) {
          double mean_g = 0, mean_gx = 0;
          for (std::size_t r = 0; r < rows; ++r) {
            const std::size_t c = gi * rows + r;
            for (std::size_t t = 0; t < frames; ++t) {
              const double gh = static_cast<double>(g[c * frames + t]) * gm[c];
              mean_g += gh;
              mean_gx += gh * xhat[c * frames + t];
            }
          }
          mean_g /= static_cast<double>(block);
          mean_gx /= static_cast<double>(block);
          const double inv = inv_std[gi];
          for (std::size_t r = 0; r < rows; ++r) {
            const std::size_t c = gi * rows + r;
            for (std::size_t t = 0; t < frames; ++t) {
              const std::size_t i = c * frames + t;
              const double gh = static_cast<double>(g[i]) * gm[c];
              dx[i] += static_cast<T>(inv * (gh - mean_g - xhat[i] * mean_gx));
            }
          }
        }
      });
}

template <typename T>
Tensor<T> prelu(const Tensor<T>& input, const Tensor<T>& slope) {
  if (slope.numel() != 1) throw std::invalid_argument("prelu: slope must be a single value");
  const T a = slope.item();
  const auto x = input.data();
  std::vector<T> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] >= T(0) ? x[i] : a * x[i];
  Node<T>* nx = &input.node();
  Node<T>* ns = &slope.node();
  return Tensor<T>::make_result("prelu", input.shape(), std::move(out), {input, slope}, [nx, ns](Node<T>& self) {
    const T a = ns->data[0];
    const auto& x = nx->data;
    if (nx->requires_grad) {
      auto& dx = nx->ensure_grad();
      for (std::size_t i = 0; i < x.size(); ++i) dx[i] += x[i] >= T(0) ? self.grad[i] : a * self.grad[i];
    }
    if (ns->requires_grad) {
      double acc = 0;
      for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] < T(0)) acc += static_cast<double>(self.grad[i]) * x[i];
      ns->ensure_grad()[0] += static_cast<T>(acc);
    }
  });
}

template <typename T>
Tensor<T> sigmoid(const Tensor<T>& input) {
  const auto x = input.data();
  std::vector<T> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] >= T(0)) {
      out[i] = T(1) / (T(1) + std::exp(-x[i]));
    } else {
      const T e = std::exp(x[i]);
      out[i] = e / (T(1) + e);
    }
  }
  Node<T>* nx = &input.node();
  return Tensor<T>::make_result("sigmoid", input.shape(), std::move(out), {input}, [nx](Node<T>& self) {
    auto& dx = nx->ensure_grad();
    for (std::size_t i = 0; i < dx.size(); ++i) {
      const T y = self.data[i];
      dx[i] += self.grad[i] * y * (T(1) - y);
    }
  });
}

template <typename T>
Tensor<T> concat_channels(const std::vector<Tensor<T>>& inputs) {
  if (inputs.empty()) throw std::invalid_argument("concat_channels: no inputs");
  const std::size_t frames = inputs.front().dim(1);
  std::size_t rows = 0;
  for (const auto& in : inputs) {
    require_rank(in, 2, "concat_channels", "input");
    if (in.dim(1) != frames)
      throw std::invalid_argument("concat_channels: frame counts differ (" + std::to_string(frames) + " vs " +
                                  std::to_string(in.dim(1)) + ")");
    rows += in.dim(0);
  }
  std::vector<T> out;
  out.reserve(rows * frames);
  std::vector<Node<T>*> nodes;
  for (const auto& in : inputs) {
    out.insert(out.end(), in.data().begin(), in.data().end());
    nodes.push_back(&in.node());
  }
  return Tensor<T>::make_result("concat_channels", {rows, frames}, std::move(out), inputs,
                                [nodes](Node<T>& self) {
                                  std::size_t offset = 0;
                                  for (Node<T>* n : nodes) {
                                    const std::size_t count = n->data.size();
                                    if (n->requires_grad)
                                      accumulate_grad<T>(*n, std::span<const T>(self.grad).subspan(offset, count));
                                    offset += count;
                                  }
                                });
}

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
  if (a.shape() != b.shape())
    throw std::invalid_argument("add: shapes differ: " + shape_string(a.shape()) + " vs " + shape_string(b.shape()));
  std::vector<T> out(a.data().begin(), a.data().end());
  const auto bv = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += bv[i];
  Node<T>* na = &a.node();
  Node<T>* nb = &b.node();
  return Tensor<T>::make_result("add", a.shape(), std::move(out), {a, b}, [na, nb](Node<T>& self) {
    accumulate_grad<T>(*na, self.grad);
    accumulate_grad<T>(*nb, self.grad);
  });
}

template <typename T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b) {
  if (a.shape() != b.shape())
    throw std::invalid_argument("mul: shapes differ: " + shape_string(a.shape()) + " vs " + shape_string(b.shape()));
  const auto av = a.data();
  const auto bv = b.data();
  std::vector<T> out(av.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
  Node<T>* na = &a.node();
  Node<T>* nb = &b.node();
  return Tensor<T>::make_result("mul", a.shape(), std::move(out), {a, b}, [na, nb](Node<T>& self) {
    if (na->requires_grad) {
      auto& da = na->ensure_grad();
      for (std::size_t i = 0; i < da.size(); ++i) da[i] += self.grad[i] * nb->data[i];
    }
    if (nb->requires_grad) {
      auto& db = nb->ensure_grad();
      for (std::size_t i = 0; i < db.size(); ++i) db[i] += self.grad[i] * na->data[i];
    }
  });
}

template <typename T>
Tensor<T> scale(const Tensor<T>& a, T factor) {
  std::vector<T> out(a.data().begin(), a.data().end());
  for (auto& v : out) v *= factor;
  Node<T>* na = &a.node();
  return Tensor<T>::make_result("scale", a.shape(), std::move(out), {a}, [na, factor](Node<T>& self) {
    auto& da = na->ensure_grad();
    for (std::size_t i = 0; i < da.size(); ++i) da[i] += self.grad[i] * factor;
  });
}

template <typename T>
Tensor<T> sum(const Tensor<T>& a) {
  double acc = 0;
  for (T v : a.data()) acc += v;
  Node<T>* na = &a.node();
  return Tensor<T>::make_result("sum", {1}, {static_cast<T>(acc)}, {a}, [na](Node<T>& self) {
    auto& da = na->ensure_grad();
    for (auto& d : da) d += self.grad[0];
  });
}

template <typename T>
Tensor<T> add_scalars(const std::vector<Tensor<T>>& terms) {
  if (terms.empty()) throw std::invalid_argument("add_scalars: no terms");
  T acc = 0;
  std::vector<Node<T>*> nodes;
  for (const auto& t : terms) {
    acc += t.item();
    nodes.push_back(&t.node());
  }
  return Tensor<T>::make_result("add_scalars", {1}, {acc}, terms, [nodes](Node<T>& self) {
    for (Node<T>* n : nodes)
      if (n->requires_grad) n->ensure_grad()[0] += self.grad[0];
  });
}

template <typename T>
Tensor<T> slice_rows(const Tensor<T>& input, std::size_t first, std::size_t count) {
  require_rank(input, 2, "slice_rows", "input");
  const std::size_t frames = input.dim(1);
  if (count == 0 || first + count > input.dim(0))
    throw std::invalid_argument("slice_rows: rows [" + std::to_string(first) + ", " + std::to_string(first + count) +
                                ") outside " + shape_string(input.shape()));
  const auto src = input.data().subspan(first * frames, count * frames);
  Node<T>* nx = &input.node();
  return Tensor<T>::make_result("slice_rows", {count, frames}, std::vector<T>(src.begin(), src.end()), {input},
                                [nx, first, frames](Node<T>& self) {
                                  auto& dx = nx->ensure_grad();
                                  for (std::size_t i = 0; i < self.grad.size(); ++i)
                                    dx[first * frames + i] += self.grad[i];
                                });
}

template <typename T>
Tensor<T> weighted_sum(const Tensor<T>& a, std::span<const T> weights) {
  if (weights.size() != a.numel()) throw std::invalid_argument("weighted_sum: weight count mismatch");
  double acc = 0;
  const auto av = a.data();
  for (std::size_t i = 0; i < av.size(); ++i) acc += static_cast<double>(av[i]) * weights[i];
  Node<T>* na = &a.node();
  std::vector<T> w(weights.begin(), weights.end());
  return Tensor<T>::make_result("weighted_sum", {1}, {static_cast<T>(acc)}, {a},
                                [na, w = std::move(w)](Node<T>& self) {
                                  auto& da = na->ensure_grad();
                                  for (std::size_t i = 0; i < da.size(); ++i) da[i] += self.grad[0] * w[i];
                                });
}

#define MCSEP_INSTANTIATE_OPS(T)                                                                          \
  template Tensor<T> matmul(const Tensor<T>&, const Tensor<T>&);                                         \
  template Tensor<T> conv1d(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, std::size_t,           \
                            std::size_t);                                                                \
  template Tensor<T> global_layer_norm(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&, T,          \
                                       std::size_t);                                                     \
  template Tensor<T> prelu(const Tensor<T>&, const Tensor<T>&);                                          \
  template Tensor<T> sigmoid(const Tensor<T>&);                                                          \
  template Tensor<T> concat_channels(const std::vector<Tensor<T>>&);                                     \
  template Tensor<T> add(const Tensor<T>&, const Tensor<T>&);                                            \
  template Tensor<T> mul(const Tensor<T>&, const Tensor<T>&);                                            \
  template Tensor<T> scale(const Tensor<T>&, T);                                                         \
  template Tensor<T> sum(const Tensor<T>&);                                                              \
  template Tensor<T> add_scalars(const std::vector<Tensor<T>>&);                                         \
  template Tensor<T> slice_rows(const Tensor<T>&, std::size_t, std::size_t);                             \
  template Tensor<T> weighted_sum(const Tensor<T>&, std::span<const T>);

MCSEP_INSTANTIATE_OPS(float)
MCSEP_INSTANTIATE_OPS(double)

}  // namespace mcsep::core
