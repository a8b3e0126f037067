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

// AVX2 + FMA variants. This TU is compiled with -mavx2 -mfma and must only be
// entered after the dispatcher has confirmed CPU support. It deliberately
// avoids standard-library templates so no AVX-encoded copy of a shared inline
// function can leak into the rest of the program.

#include <immintrin.h>

#include "mcsep/simd/kernels.hpp"

namespace mcsep::simd::detail {
namespace {

struct F32 {
  using T = float;
  using V = __m256;
  static constexpr std::size_t kLanes = 8;
  static V zero() { return _mm256_setzero_ps(); }
  static V load(const T* p) { return _mm256_loadu_ps(p); }
  static void store(T* p, V v) { _mm256_storeu_ps(p, v); }
  static V broadcast(T x) { return _mm256_set1_ps(x); }
  static V fma(V a, V b, V c) { return _mm256_fmadd_ps(a, b, c); }
  static V add(V a, V b) { return _mm256_add_ps(a, b); }
  static T hsum(V v) {
    __m128 lo = _mm256_castps256_ps128(v);
    __m128 hi = _mm256_extractf128_ps(v, 1);
    lo = _mm_add_ps(lo, hi);
    __m128 shuf = _mm_movehdup_ps(lo);
    __m128 sums = _mm_add_ps(lo, shuf);
    shuf = _mm_movehl_ps(shuf, sums);
    sums = _mm_add_ss(sums, shuf);
    return _mm_cvtss_f32(sums);
  }
};

struct F64 {
  using T = double;
  using V = __m256d;
  static constexpr std::size_t kLanes = 4;
  static V zero() { return _mm256_setzero_pd(); }
  static V load(const T* p) { return _mm256_loadu_pd(p); }
  static void store(T* p, V v) { _mm256_storeu_pd(p, v); }
  static V broadcast(T x) { return _mm256_set1_pd(x); }
  static V fma(V a, V b, V c) { return _mm256_fmadd_pd(a, b, c); }
  static V add(V a, V b) { return _mm256_add_pd(a, b); }
  static T hsum(V v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d high64 = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, high64));
  }
};

template <typename S>
typename S::T dot_avx2(const typename S::T* x, const typename S::T* y,
                       std::size_t n) {
  constexpr std::size_t W = S::kLanes;
  typename S::V a0 = S::zero(), a1 = S::zero(), a2 = S::zero(), a3 = S::zero();
  std::size_t i = 0;
  for (; i + 4 * W <= n; i += 4 * W) {
    a0 = S::fma(S::load(x + i), S::load(y + i), a0);
    a1 = S::fma(S::load(x + i + W), S::load(y + i + W), a1);
    a2 = S::fma(S::load(x + i + 2 * W), S::load(y + i + 2 * W), a2);
    a3 = S::fma(S::load(x + i + 3 * W), S::load(y + i + 3 * W), a3);
  }
  for (; i + W <= n; i += W) a0 = S::fma(S::load(x + i), S::load(y + i), a0);
  typename S::T acc = S::hsum(S::add(S::add(a0, a1), S::add(a2, a3)));
  for (; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

template <typename S>
void axpy_avx2(typename S::T a, const typename S::T* x, typename S::T* y,
               std::size_t n) {
  constexpr std::size_t W = S::kLanes;
  const typename S::V va = S::broadcast(a);
  std::size_t i = 0;
  for (; i + 2 * W <= n; i += 2 * W) {
    S::store(y + i, S::fma(va, S::load(x + i), S::load(y + i)));
    S::store(y + i + W, S::fma(va, S::load(x + i + W), S::load(y + i + W)));
  }
  for (; i + W <= n; i += W) S::store(y + i, S::fma(va, S::load(x + i), S::load(y + i)));
  for (; i < n; ++i) y[i] += a * x[i];
}

// Register tile of ROWS x (2 vectors). B rows are loaded once per k and reused
// across the tile rows.
template <typename S, std::size_t ROWS>
void gemm_tile(std::size_t q, const typename S::T* a, std::size_t a_rs,
               std::size_t a_cs, const typename S::T* b, std::size_t ldb,
               typename S::T* c, std::size_t ldc) {
  constexpr std::size_t W = S::kLanes;
  typename S::V acc[ROWS][2];
  for (std::size_t r = 0; r < ROWS; ++r) {
    acc[r][0] = S::load(c + r * ldc);
    acc[r][1] = S::load(c + r * ldc + W);
  }
  for (std::size_t k = 0; k < q; ++k) {
    const typename S::V b0 = S::load(b + k * ldb);
    const typename S::V b1 = S::load(b + k * ldb + W);
    for (std::size_t r = 0; r < ROWS; ++r) {
      const typename S::V av = S::broadcast(a[r * a_rs + k * a_cs]);
      acc[r][0] = S::fma(av, b0, acc[r][0]);
      acc[r][1] = S::fma(av, b1, acc[r][1]);
    }
  }
  for (std::size_t r = 0; r < ROWS; ++r) {
    S::store(c + r * ldc, acc[r][0]);
    S::store(c + r * ldc + W, acc[r][1]);
  }
}

template <typename S, std::size_t ROWS>
void gemm_tile_narrow(std::size_t q, const typename S::T* a, std::size_t a_rs,
                      std::size_t a_cs, const typename S::T* b,
                      std::size_t ldb, typename S::T* c, std::size_t ldc) {
  typename S::V acc[ROWS];
  for (std::size_t r = 0; r < ROWS; ++r) acc[r] = S::load(c + r * ldc);
  for (std::size_t k = 0; k < q; ++k) {
    const typename S::V b0 = S::load(b + k * ldb);
    for (std::size_t r = 0; r < ROWS; ++r)
      acc[r] = S::fma(S::broadcast(a[r * a_rs + k * a_cs]), b0, acc[r]);
  }
  for (std::size_t r = 0; r < ROWS; ++r) S::store(c + r * ldc, acc[r]);
}

template <typename S, std::size_t ROWS>
void gemm_rows(std::size_t q, std::size_t r, const typename S::T* a,
               std::size_t a_rs, std::size_t a_cs, const typename S::T* b,
               std::size_t ldb, typename S::T* c, std::size_t ldc) {
  constexpr std::size_t W = S::kLanes;
  std::size_t j = 0;
  for (; j + 2 * W <= r; j += 2 * W)
    gemm_tile<S, ROWS>(q, a, a_rs, a_cs, b + j, ldb, c + j, ldc);
  for (; j + W <= r; j += W)
    gemm_tile_narrow<S, ROWS>(q, a, a_rs, a_cs, b + j, ldb, c + j, ldc);
  for (; j < r; ++j) {
    for (std::size_t row = 0; row < ROWS; ++row) {
      typename S::T acc = c[row * ldc + j];
      for (std::size_t k = 0; k < q; ++k)
        acc += a[row * a_rs + k * a_cs] * b[k * ldb + j];
      c[row * ldc + j] = acc;
    }
  }
}

template <typename S>
void gemm_avx2(std::size_t p, std::size_t q, std::size_t r,
               const typename S::T* a, std::size_t a_rs, std::size_t a_cs,
               const typename S::T* b, std::size_t ldb, typename S::T* c,
               std::size_t ldc) {
  std::size_t i = 0;
  for (; i + 4 <= p; i += 4)
    gemm_rows<S, 4>(q, r, a + i * a_rs, a_rs, a_cs, b, ldb, c + i * ldc, ldc);
  for (; i < p; ++i)
    gemm_rows<S, 1>(q, r, a + i * a_rs, a_rs, a_cs, b, ldb, c + i * ldc, ldc);
}

template <typename S>
void gemm_nt_avx2(std::size_t p, std::size_t q, std::size_t r,
                  const typename S::T* a, std::size_t lda,
                  const typename S::T* b, std::size_t ldb, typename S::T* c,
                  std::size_t ldc) {
  constexpr std::size_t W = S::kLanes;
  for (std::size_t i = 0; i < p; ++i) {
    const typename S::T* arow = a + i * lda;
    std::size_t k = 0;
    for (; k + 4 <= q; k += 4) {
      const typename S::T* b0 = b + k * ldb;
      const typename S::T* b1 = b0 + ldb;
      const typename S::T* b2 = b1 + ldb;
      const typename S::T* b3 = b2 + ldb;
      typename S::V s0 = S::zero(), s1 = S::zero(), s2 = S::zero(), s3 = S::zero();
      std::size_t j = 0;
      for (; j + W <= r; j += W) {
        const typename S::V av = S::load(arow + j);
        s0 = S::fma(av, S::load(b0 + j), s0);
        s1 = S::fma(av, S::load(b1 + j), s1);
        s2 = S::fma(av, S::load(b2 + j), s2);
        s3 = S::fma(av, S::load(b3 + j), s3);
      }
      typename S::T t0 = S::hsum(s0), t1 = S::hsum(s1), t2 = S::hsum(s2),
                    t3 = S::hsum(s3);
      for (; j < r; ++j) {
        t0 += arow[j] * b0[j];
        t1 += arow[j] * b1[j];
        t2 += arow[j] * b2[j];
        t3 += arow[j] * b3[j];
      }
      c[i * ldc + k] += t0;
      c[i * ldc + k + 1] += t1;
      c[i * ldc + k + 2] += t2;
      c[i * ldc + k + 3] += t3;
    }
    for (; k < q; ++k) c[i * ldc + k] += dot_avx2<S>(arow, b + k * ldb, r);
  }
}

}  // namespace

const Kernels<float>& avx2_f32() {
  static const Kernels<float> table{Isa::avx2, &dot_avx2<F32>, &axpy_avx2<F32>,
                                    &gemm_avx2<F32>, &gemm_nt_avx2<F32>};
  return table;
}

const Kernels<double>& avx2_f64() {
  static const Kernels<double> table{Isa::avx2, &dot_avx2<F64>, &axpy_avx2<F64>,
                                     &gemm_avx2<F64>, &gemm_nt_avx2<F64>};
  return table;
}

}  // namespace mcsep::simd::detail
