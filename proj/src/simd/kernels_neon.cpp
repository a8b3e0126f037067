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

// NEON variants for AArch64, where Advanced SIMD is always present.

#include <arm_neon.h>

#include "mcsep/simd/kernels.hpp"

namespace mcsep::simd::detail {
namespace {

struct F32 {
  using T = float;
  using V = float32x4_t;
  static constexpr std::size_t kLanes = 4;
  static V zero() { return vdupq_n_f32(0.0f); }
  static V load(const T* p) { return vld1q_f32(p); }
  static void store(T* p, V v) { vst1q_f32(p, v); }
  static V broadcast(T x) { return vdupq_n_f32(x); }
  static V fma(V a, V b, V c) { return vfmaq_f32(c, a, b); }
  static V add(V a, V b) { return vaddq_f32(a, b); }
  static T hsum(V v) { return vaddvq_f32(v); }
};

struct F64 {
  using T = double;
  using V = float64x2_t;
  static constexpr std::size_t kLanes = 2;
  static V zero() { return vdupq_n_f64(0.0); }
  static V load(const T* p) { return vld1q_f64(p); }
  static void store(T* p, V v) { vst1q_f64(p, v); }
  static V broadcast(T x) { return vdupq_n_f64(x); }
  static V fma(V a, V b, V c) { return vfmaq_f64(c, a, b); }
  static V add(V a, V b) { return vaddq_f64(a, b); }
  static T hsum(V v) { return vaddvq_f64(v); }
};

template <typename S>
typename S::T dot_neon(const typename S::T* x, const typename S::T* y,
                       std::size_t n) {
  constexpr std::size_t W = S::kLanes;
  typename S::V a0 = S::zero(), a1 = S::zero();
  std::size_t i = 0;
  for (; i + 2 * W <= n; i += 2 * W) {
    a0 = S::fma(S::load(x + i), S::load(y + i), a0);
    a1 = S::fma(S::load(x + i + W), S::load(y + i + W), a1);
  }
  for (; i + W <= n; i += W) a0 = S::fma(S::load(x + i), S::load(y + i), a0);
  typename S::T acc = S::hsum(S::add(a0, a1));
  for (; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

template <typename S>
void axpy_neon(typename S::T a, const typename S::T* x, typename S::T* y,
               std::size_t n) {
  constexpr std::size_t W = S::kLanes;
  const typename S::V va = S::broadcast(a);
  std::size_t i = 0;
  for (; i + W <= n; i += W) S::store(y + i, S::fma(va, S::load(x + i), S::load(y + i)));
  for (; i < n; ++i) y[i] += a * x[i];
}

template <typename S>
void gemm_neon(std::size_t p, std::size_t q, std::size_t r,
               const typename S::T* a, std::size_t a_rs, std::size_t a_cs,
               const typename S::T* b, std::size_t ldb, typename S::T* c,
               std::size_t ldc) {
  constexpr std::size_t W = S::kLanes;
  for (std::size_t i = 0; i < p; ++i) {
    typename S::T* crow = c + i * ldc;
    std::size_t j = 0;
    for (; j + 2 * W <= r; j += 2 * W) {
      typename S::V c0 = S::load(crow + j), c1 = S::load(crow + j + W);
      for (std::size_t k = 0; k < q; ++k) {
        const typename S::V av = S::broadcast(a[i * a_rs + k * a_cs]);
        c0 = S::fma(av, S::load(b + k * ldb + j), c0);
        c1 = S::fma(av, S::load(b + k * ldb + j + W), c1);
      }
      S::store(crow + j, c0);
      S::store(crow + j + W, c1);
    }
    for (; j < r; ++j) {
      typename S::T acc = crow[j];
      for (std::size_t k = 0; k < q; ++k) acc += a[i * a_rs + k * a_cs] * b[k * ldb + j];
      crow[j] = acc;
    }
  }
}

template <typename S>
void gemm_nt_neon(std::size_t p, std::size_t q, std::size_t r,
                  const typename S::T* a, std::size_t lda,
                  const typename S::T* b, std::size_t ldb, typename S::T* c,
                  std::size_t ldc) {
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t k = 0; k < q; ++k)
      c[i * ldc + k] += dot_neon<S>(a + i * lda, b + k * ldb, r);
}

}  // namespace

const Kernels<float>& neon_f32() {
  static const Kernels<float> table{Isa::neon, &dot_neon<F32>, &axpy_neon<F32>,
                                    &gemm_neon<F32>, &gemm_nt_neon<F32>};
  return table;
}

const Kernels<double>& neon_f64() {
  static const Kernels<double> table{Isa::neon, &dot_neon<F64>, &axpy_neon<F64>,
                                     &gemm_neon<F64>, &gemm_nt_neon<F64>};
  return table;
}

}  // namespace mcsep::simd::detail
