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

#include "mcsep/train/loss.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "mcsep/core/ops.hpp"

namespace mcsep::train {

namespace {

constexpr double kDbPerNeper = 10.0 / 2.302585092994045684;  // 10 / ln 10

struct SiSnrTerms {
  double value = 0;
  bool clamped = false;
  double alpha = 0;
  double target_energy = 0;
  double error_energy = 0;
  std::vector<double> s;  // reference, mean-removed when requested
  std::vector<double> e;  // estimate, likewise
};

template <typename T>
std::vector<double> centered(std::span<const T> x, bool zero_mean) {
  std::vector<double> out(x.begin(), x.end());
  if (zero_mean) {
    const double mean = std::accumulate(out.begin(), out.end(), 0.0) / double(out.size());
    for (auto& v : out) v -= mean;
  }
  return out;
}

template <typename T>
SiSnrTerms evaluate(std::span<const T> estimate, std::span<const T> reference, const SiSnrOptions& o) {
  if (estimate.size() != reference.size())
    throw std::invalid_argument("si_snr: estimate has " + std::to_string(estimate.size()) +
                                " samples, reference has " + std::to_string(reference.size()));
  if (reference.empty()) throw std::invalid_argument("si_snr: empty signals");
  SiSnrTerms t;
  t.s = centered(reference, o.zero_mean);
  t.e = centered(estimate, o.zero_mean);
  double ss = 0, se = 0;
  for (std::size_t i = 0; i < t.s.size(); ++i) {
    ss += t.s[i] * t.s[i];
    se += t.s[i] * t.e[i];
  }
  if (!(ss > 0)) throw std::invalid_argument("si_snr: reference has zero energy");
  t.alpha = se / ss;
  t.target_energy = t.alpha * t.alpha * ss;
  double nn = 0;
  for (std::size_t i = 0; i < t.s.size(); ++i) {
    const double n = t.alpha * t.s[i] - t.e[i];
    nn += n * n;
  }
  t.error_energy = nn;
  const double lo = -o.clamp_db, hi = o.clamp_db;
  if (t.target_energy <= 0) {
    t.value = lo;
    t.clamped = true;
  } else if (nn <= 0) {
    t.value = hi;
    t.clamped = true;
  } else {
    const double db = 10.0 * std::log10(t.target_energy / nn);
    t.clamped = db <= lo || db >= hi;
    t.value = std::clamp(db, lo, hi);
  }
  return t;
}

}  // namespace

template <typename T>
double si_snr(std::span<const T> estimate, std::span<const T> reference, const SiSnrOptions& options) {
  return evaluate(estimate, reference, options).value;
}

template <typename T>
core::Tensor<T> si_snr(const core::Tensor<T>& estimate, std::span<const T> reference, const SiSnrOptions& options) {
  if (estimate.rank() != 1) throw std::invalid_argument("si_snr: estimate must be 1-D");
  auto terms = evaluate<T>(estimate.data(), reference, options);
  const T value = static_cast<T>(terms.value);
  core::detail::Node<T>* in = &estimate.node();
  const bool zero_mean = options.zero_mean;
  return core::Tensor<T>::make_result(
      "si_snr", {1}, {value}, {estimate}, [in, zero_mean, terms = std::move(terms)](core::detail::Node<T>& self) {
        auto& grad = in->ensure_grad();
        if (terms.clamped) return;
        const double g = double(self.grad[0]) * kDbPerNeper;
        const std::size_t n = terms.s.size();
        std::vector<double> d(n);
        for (std::size_t i = 0; i < n; ++i) {
          const double target = terms.alpha * terms.s[i];
          d[i] = g * (2.0 * target / terms.target_energy - 2.0 * (terms.e[i] - target) / terms.error_energy);
        }
        if (zero_mean) {
          const double mean = std::accumulate(d.begin(), d.end(), 0.0) / double(n);
          for (auto& v : d) v -= mean;
        }
        for (std::size_t i = 0; i < n; ++i) grad[i] += static_cast<T>(d[i]);
      });
}

namespace {

// Best assignment from a matrix scores[k][j] = SI-SNR(estimate j, reference k).
PitResult best_assignment(const std::vector<std::vector<double>>& scores) {
  const std::size_t k = scores.size();
  std::vector<std::size_t> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  PitResult best;
  bool first = true;
  do {
    double total = 0;
    for (std::size_t r = 0; r < k; ++r) total += scores[r][perm[r]];
    const double loss = -total / double(k);
    if (first || loss < best.loss) {
      best.loss = loss;
      best.permutation = perm;
      first = false;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

void check_counts(std::size_t estimates, std::size_t references) {
  if (references < 2) throw std::invalid_argument("pit_loss: need at least two references");
  if (estimates != references)
    throw std::invalid_argument("pit_loss: " + std::to_string(estimates) + " estimates for " +
                                std::to_string(references) + " references");
}

}  // namespace

template <typename T>
PitResult pit_loss(const std::vector<std::vector<T>>& estimates, const std::vector<std::vector<T>>& references,
                   const SiSnrOptions& options) {
  check_counts(estimates.size(), references.size());
  const std::size_t k = references.size();
  std::vector<std::vector<double>> scores(k, std::vector<double>(k));
  for (std::size_t r = 0; r < k; ++r)
    for (std::size_t j = 0; j < k; ++j)
      scores[r][j] = si_snr<T>(std::span<const T>(estimates[j]), std::span<const T>(references[r]), options);
  return best_assignment(scores);
}

template <typename T>
PitLoss<T> pit_loss(const std::vector<core::Tensor<T>>& estimates, const std::vector<std::vector<T>>& references,
                    const SiSnrOptions& options) {
  check_counts(estimates.size(), references.size());
  const std::size_t k = references.size();
  std::vector<std::vector<double>> scores(k, std::vector<double>(k));
  for (std::size_t r = 0; r < k; ++r)
    for (std::size_t j = 0; j < k; ++j)
      scores[r][j] = si_snr<T>(estimates[j].data(), std::span<const T>(references[r]), options);
  auto best = best_assignment(scores);
  std::vector<core::Tensor<T>> terms;
  for (std::size_t r = 0; r < k; ++r)
    terms.push_back(si_snr(estimates[best.permutation[r]], std::span<const T>(references[r]), options));
  return {core::scale(core::add_scalars(terms), static_cast<T>(-1.0 / double(k))), std::move(best.permutation)};
}

#define MCSEP_INSTANTIATE_LOSS(T)                                                                               \
  template double si_snr(std::span<const T>, std::span<const T>, const SiSnrOptions&);                          \
  template core::Tensor<T> si_snr(const core::Tensor<T>&, std::span<const T>, const SiSnrOptions&);             \
  template PitResult pit_loss(const std::vector<std::vector<T>>&, const std::vector<std::vector<T>>&,           \
                              const SiSnrOptions&);                                                              \
  template PitLoss<T> pit_loss(const std::vector<core::Tensor<T>>&, const std::vector<std::vector<T>>&,         \
                               const SiSnrOptions&);

MCSEP_INSTANTIATE_LOSS(float)
MCSEP_INSTANTIATE_LOSS(double)

}  // namespace mcsep::train
