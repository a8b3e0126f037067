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

#include "mcsep/simd/kernels.hpp"

namespace mcsep::simd::detail {
namespace {

template <typename T>
T dot_scalar(const T* x, const T* y, std::size_t n) {
  T acc = 0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

template <typename T>
void axpy_scalar(T a, const T* x, T* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

// Each C element sums over k in ascending order, same as the vector variants.
template <typename T>
void gemm_scalar(std::size_t p, std::size_t q, std::size_t r, const T* a,
                 std::size_t a_rs, std::size_t a_cs, const T* b,
                 std::size_t ldb, T* c, std::size_t ldc) {
  for (std::size_t i = 0; i < p; ++i) {
    T* crow = c + i * ldc;
    for (std::size_t k = 0; k < q; ++k) {
      const T aik = a[i * a_rs + k * a_cs];
      const T* brow = b + k * ldb;
      for (std::size_t j = 0; j < r; ++j) crow[j] += aik * brow[j];
    }
  }
}

template <typename T>
void gemm_nt_scalar(std::size_t p, std::size_t q, std::size_t r, const T* a,
                    std::size_t lda, const T* b, std::size_t ldb, T* c,
                    std::size_t ldc) {
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t k = 0; k < q; ++k)
      c[i * ldc + k] += dot_scalar(a + i * lda, b + k * ldb, r);
}

}  // namespace

const Kernels<float>& scalar_f32() {
  static const Kernels<float> table{Isa::scalar, &dot_scalar<float>,
                                    &axpy_scalar<float>, &gemm_scalar<float>,
                                    &gemm_nt_scalar<float>};
  return table;
}

const Kernels<double>& scalar_f64() {
  static const Kernels<double> table{Isa::scalar, &dot_scalar<double>,
                                     &axpy_scalar<double>, &gemm_scalar<double>,
                                     &gemm_nt_scalar<double>};
  return table;
}

}  // namespace mcsep::simd::detail
