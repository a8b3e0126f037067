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

#include <cstdlib>
#include <stdexcept>
#include <string>

#include "mcsep/simd/kernels.hpp"

namespace mcsep::simd {

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::neon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

namespace {

Isa select_isa() {
  if (const char* env = std::getenv("MCSEP_ISA")) {
    const std::string wanted(env);
    for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon}) {
      if (wanted == isa_name(isa) && isa_available(isa)) return isa;
    }
  }
  if (isa_available(Isa::avx2)) return Isa::avx2;
  if (isa_available(Isa::neon)) return Isa::neon;
  return Isa::scalar;
}

template <typename T>
const Kernels<T>& table_for(Isa isa);

template <>
const Kernels<float>& table_for<float>(Isa isa) {
  switch (isa) {
#if defined(__x86_64__) || defined(_M_X64)
    case Isa::avx2: return detail::avx2_f32();
#endif
#if defined(__aarch64__)
    case Isa::neon: return detail::neon_f32();
#endif
    default: return detail::scalar_f32();
  }
}

template <>
const Kernels<double>& table_for<double>(Isa isa) {
  switch (isa) {
#if defined(__x86_64__) || defined(_M_X64)
    case Isa::avx2: return detail::avx2_f64();
#endif
#if defined(__aarch64__)
    case Isa::neon: return detail::neon_f64();
#endif
    default: return detail::scalar_f64();
  }
}

}  // namespace

Isa active_isa() {
  static const Isa isa = select_isa();
  return isa;
}

template <typename T>
const Kernels<T>& kernels() {
  static const Kernels<T>& table = table_for<T>(active_isa());
  return table;
}

template <typename T>
const Kernels<T>& kernels_for(Isa isa) {
  if (!isa_available(isa))
    throw std::invalid_argument("kernels_for: ISA not available: " + std::string(isa_name(isa)));
  return table_for<T>(isa);
}

template const Kernels<float>& kernels<float>();
template const Kernels<double>& kernels<double>();
template const Kernels<float>& kernels_for<float>(Isa);
template const Kernels<double>& kernels_for<double>(Isa);

}  // namespace mcsep::simd
