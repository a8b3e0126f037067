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

// Dense inner-loop kernels used by the tensor ops. Every kernel exists as a
// portable scalar reference and, where the target supports it, an intrinsics
// variant. The active table is chosen once per process from CPUID (or the
// MCSEP_ISA environment variable: "scalar", "avx2", "neon").
//
// All matrices are row-major with explicit leading dimensions. The gemm
// kernels accumulate into C; callers zero C first when they want a plain
// product. For a fixed ISA every kernel is deterministic: the summation order
// of each output element depends only on the problem shape.

#include <cstddef>
#include <string_view>

namespace mcsep::simd {

enum class Isa { scalar, avx2, neon };

std::string_view isa_name(Isa isa);

template <typename T>
struct Kernels {
  Isa isa;
  // sum_i x[i] * y[i]
  T (*dot)(const T* x, const T* y, std::size_t n);
  // y[i] += a * x[i]
  void (*axpy)(T a, const T* x, T* y, std::size_t n);
  // C[p x r] += A[p x q] * B[q x r], A addressed as A[i * a_rs + k * a_cs].
  // Passing (lda, 1) multiplies by A; passing (1, lda) multiplies by A^T.
  void (*gemm)(std::size_t p, std::size_t q, std::size_t r,
               const T* a, std::size_t a_rs, std::size_t a_cs,
               const T* b, std::size_t ldb,
               T* c, std::size_t ldc);
  // C[p x q] += A[p x r] * B[q x r]^T
  void (*gemm_nt)(std::size_t p, std::size_t q, std::size_t r,
                  const T* a, std::size_t lda,
                  const T* b, std::size_t ldb,
                  T* c, std::size_t ldc);
};

/// The table selected for this process.
template <typename T>
const Kernels<T>& kernels();

/// True when `isa` was compiled in and the running CPU supports it.
bool isa_available(Isa isa);

/// A specific table, for equivalence testing. Throws std::invalid_argument
/// when the ISA is unavailable.
template <typename T>
const Kernels<T>& kernels_for(Isa isa);

Isa active_isa();

namespace detail {
// Per-ISA tables; only the ones compiled for this target are defined.
const Kernels<float>& scalar_f32();
const Kernels<double>& scalar_f64();
const Kernels<float>& avx2_f32();
const Kernels<double>& avx2_f64();
const Kernels<float>& neon_f32();
const Kernels<double>& neon_f64();
}  // namespace detail

}  // namespace mcsep::simd
