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

#include "mcsep/spatial/rir.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mcsep::spatial {

namespace {

constexpr double kSabine = 0.161;

double volume(const Vec3& r) { return r.x * r.y * r.z; }
double surface(const Vec3& r) { return 2.0 * (r.x * r.y + r.x * r.z + r.y * r.z); }

void check_t60(double t60) {
  if (!(t60 > 0)) throw std::invalid_argument("absorption: T60 must be positive");
}

void check_positions(const Vec3& room, const Vec3& src, const Vec3& mic) {
  auto within = [&](const Vec3& p) {
    return p.x > 0 && p.y > 0 && p.z > 0 && p.x < room.x && p.y < room.y && p.z < room.z;
  };
  if (!within(src) || !within(mic)) throw std::invalid_argument("simulate_rir: position outside the room");
  if (distance(src, mic) < 1e-6) throw std::invalid_argument("simulate_rir: source coincides with the microphone");
}

// Calls visit(distance, reflections) for every image closer than max_distance.
template <typename Visit>
void for_each_image(const Vec3& room, const Vec3& src, const Vec3& mic, double max_distance, Visit&& visit) {
  const long nx = static_cast<long>(std::ceil(max_distance / (2.0 * room.x))) + 1;
  const long ny = static_cast<long>(std::ceil(max_distance / (2.0 * room.y))) + 1;
  const long nz = static_cast<long>(std::ceil(max_distance / (2.0 * room.z))) + 1;
  const double max_sq = max_distance * max_distance;
  for (long a = -nx; a <= nx; ++a)
    for (int u = 0; u < 2; ++u) {
      const double dx = (1 - 2 * u) * src.x + 2.0 * a * room.x - mic.x;
      const long rx = std::abs(a - u) + std::abs(a);
      for (long b = -ny; b <= ny; ++b)
        for (int v = 0; v < 2; ++v) {
          const double dy = (1 - 2 * v) * src.y + 2.0 * b * room.y - mic.y;
          const long ry = std::abs(b - v) + std::abs(b);
          if (dx * dx + dy * dy >= max_sq) continue;
          for (long c = -nz; c <= nz; ++c)
            for (int w = 0; w < 2; ++w) {
              const double dz = (1 - 2 * w) * src.z + 2.0 * c * room.z - mic.z;
              const double sq = dx * dx + dy * dy + dz * dz;
              if (sq >= max_sq) continue;
              visit(std::sqrt(sq), static_cast<std::size_t>(rx + ry + std::abs(c - w) + std::abs(c)));
            }
        }
    }
}

double render_distance(std::size_t length, const RirOptions& o) {
  return (double(length) + o.sinc_half_width) * o.sound_speed / o.sample_rate;
}

// Image energy 1/(4 pi d)^2 binned by arrival sample and reflection count, so
// the envelope for any beta is sum_n beta^(2n) table[n].
struct EnergyTable {
  std::vector<std::vector<double>> by_order;

  std::vector<double> envelope(double beta) const {
    std::vector<double> e(by_order.empty() ? 0 : by_order.front().size(), 0.0);
    double w = 1.0;
    const double b2 = beta * beta;
    for (const auto& row : by_order) {
      for (std::size_t i = 0; i < e.size(); ++i) e[i] += w * row[i];
      w *= b2;
    }
    return e;
  }
};

EnergyTable energy_table(const Vec3& room, const Vec3& src, const Vec3& mic, std::size_t length,
                         const RirOptions& o) {
  EnergyTable t;
  const double per_metre = o.sample_rate / o.sound_speed;
  for_each_image(room, src, mic, double(length) / per_metre, [&](double d, std::size_t order) {
    const auto bin = static_cast<std::size_t>(std::lround(d * per_metre));
    if (bin >= length) return;
    if (order >= t.by_order.size()) t.by_order.resize(order + 1, std::vector<double>(length, 0.0));
    const double a = 1.0 / (4.0 * std::numbers::pi * d);
    t.by_order[order][bin] += a * a;
  });
  return t;
}

// Schroeder fit; +inf when the curve never reaches -25 dB, 0 when fewer
// than two samples fall inside the fit range.
double schroeder_fit(const std::vector<double>& energy, int sample_rate) {
  std::vector<double> edc(energy.size());
  double acc = 0;
  for (std::size_t i = energy.size(); i-- > 0;) {
    acc += energy[i];
    edc[i] = acc;
  }
  if (!(acc > 0)) throw std::invalid_argument("measure_t60: silent response");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  bool reached = false;
  for (std::size_t i = 0; i < edc.size(); ++i) {
    const double db = 10.0 * std::log10(edc[i] / acc);
    if (db > -5.0) continue;
    if (db < -25.0) {
      reached = true;
      break;
    }
    const double t = double(i) / sample_rate;
    sx += t;
    sy += db;
    sxx += t * t;
    sxy += t * db;
    ++n;
  }
  if (!reached) return std::numeric_limits<double>::infinity();
  if (n < 2) return 0.0;
  const double slope = (double(n) * sxy - sx * sy) / (double(n) * sxx - sx * sx);
  return -60.0 / slope;
}

double calibrated_absorption(const Vec3& room, const Vec3& src, const Vec3& mic, double t60, const RirOptions& o) {
  const auto table = energy_table(room, src, mic, rir_length(src, mic, t60, o), o);
  auto measured = [&](double alpha) { return schroeder_fit(table.envelope(std::sqrt(1.0 - alpha)), o.sample_rate); };
  // Decay time falls as absorption rises; bisect in [lo, hi].
  double lo = 1e-4, hi = 0.9999;
  if (measured(hi) > t60 || measured(lo) < t60)
    throw std::invalid_argument("simulate_rir: T60 " + std::to_string(t60) + " s is not reachable in this room");
  double alpha = std::clamp(sabine_absorption(room, t60), lo, hi);
  for (int it = 0; it < 60; ++it) {
    const double m = measured(alpha);
    if (std::abs(m / t60 - 1.0) < 1e-4) break;
    (m > t60 ? lo : hi) = alpha;
    alpha = 0.5 * (lo + hi);
  }
  return alpha;
}

}  // namespace

double sabine_absorption(const Vec3& room, double t60) {
  check_t60(t60);
  return kSabine * volume(room) / (surface(room) * t60);
}

double eyring_absorption(const Vec3& room, double t60) {
  check_t60(t60);
  return 1.0 - std::exp(-kSabine * volume(room) / (surface(room) * t60));
}

double wall_absorption(const Vec3& room, const Vec3& src, const Vec3& mic, double t60, const RirOptions& o) {
  check_t60(t60);
  check_positions(room, src, mic);
  switch (o.rule) {
    case AbsorptionRule::sabine: return sabine_absorption(room, t60);
    case AbsorptionRule::eyring: return eyring_absorption(room, t60);
    case AbsorptionRule::calibrated: return calibrated_absorption(room, src, mic, t60, o);
  }
  return 0;
}

void highpass(std::vector<double>& x, double cutoff_hz, int sample_rate) {
  if (!(cutoff_hz > 0) || cutoff_hz >= 0.5 * sample_rate)
    throw std::invalid_argument("highpass: cutoff must lie in (0, fs/2)");
  const double k = std::tan(std::numbers::pi * cutoff_hz / sample_rate);
  const double q = std::numbers::sqrt2 / 2.0;
  const double norm = 1.0 / (1.0 + k / q + k * k);
  const double b0 = norm, b1 = -2.0 * norm, b2 = norm;
  const double a1 = 2.0 * (k * k - 1.0) * norm, a2 = (1.0 - k / q + k * k) * norm;
  double x1 = 0, x2 = 0, y1 = 0, y2 = 0;
  for (auto& v : x) {
    const double y = b0 * v + b1 * x1 + b2 * x2 - a1 * y1 - a2 * y2;
    x2 = x1;
    x1 = v;
    y2 = y1;
    y1 = y;
    v = y;
  }
}

void add_fractional_impulse(std::vector<double>& out, double delay, double amplitude, int half_width) {
  const long center = std::lround(delay);
  const long first = std::max(0L, center - half_width);
  const long last = std::min(static_cast<long>(out.size()) - 1, center + half_width);
  const double span = half_width + 1.0;
  for (long n = first; n <= last; ++n) {
    const double x = double(n) - delay;
    if (std::abs(x) >= span) continue;
    const double window = 0.5 * (1.0 + std::cos(std::numbers::pi * x / span));
    const double sinc = x == 0.0 ? 1.0 : std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
    out[static_cast<std::size_t>(n)] += amplitude * window * sinc;
  }
}

std::size_t rir_length(const Vec3& source, const Vec3& mic, double t60, const RirOptions& o) {
  const double direct = distance(source, mic) / o.sound_speed * o.sample_rate;
  const double tail = t60 * o.sample_rate;
  return static_cast<std::size_t>(std::ceil(std::max(tail, direct))) + static_cast<std::size_t>(o.sinc_half_width) + 1;
}

std::vector<double> simulate_rir(const Vec3& room, const Vec3& src, const Vec3& mic, double t60, double alpha,
                                 const RirOptions& o) {
  check_positions(room, src, mic);
  if (t60 < 0) throw std::invalid_argument("simulate_rir: negative T60");
  const std::size_t length = rir_length(src, mic, t60, o);
  std::vector<double> h(length, 0.0);
  const double per_metre = o.sample_rate / o.sound_speed;
  auto render = [&](double d, double gain) {
    add_fractional_impulse(h, d * per_metre, gain / (4.0 * std::numbers::pi * d), o.sinc_half_width);
  };
  if (t60 == 0.0) {
    render(distance(src, mic), 1.0);
    return h;
  }
  if (!(alpha > 0 && alpha <= 1))
    throw std::invalid_argument("simulate_rir: T60 " + std::to_string(t60) + " s needs absorption " +
                                std::to_string(alpha) + " in this room");
  const double beta = std::sqrt(1.0 - alpha);
  std::vector<double> beta_pow(1, 1.0);
  for_each_image(room, src, mic, render_distance(length, o), [&](double d, std::size_t order) {
    while (beta_pow.size() <= order) beta_pow.push_back(beta_pow.back() * beta);
    render(d, beta_pow[order]);
  });
  if (o.highpass_hz > 0) highpass(h, o.highpass_hz, o.sample_rate);
  return h;
}

std::vector<double> simulate_rir(const Vec3& room, const Vec3& src, const Vec3& mic, double t60,
                                 const RirOptions& o) {
  const double alpha = t60 > 0 ? wall_absorption(room, src, mic, t60, o) : 0.0;
  return simulate_rir(room, src, mic, t60, alpha, o);
}

RirSet simulate_rirs(const Scene& scene, const RirOptions& options) {
  if (scene.mics.empty() || scene.speakers.empty()) throw std::invalid_argument("simulate_rirs: empty scene");
  const double alpha =
      scene.t60 > 0 ? wall_absorption(scene.room, scene.speakers[0], scene.mics[0], scene.t60, options) : 0.0;
  RirSet out(scene.mics.size());
  for (std::size_t m = 0; m < scene.mics.size(); ++m)
    for (const auto& spk : scene.speakers)
      out[m].push_back(simulate_rir(scene.room, spk, scene.mics[m], scene.t60, alpha, options));
  return out;
}

double measure_t60_energy(const std::vector<double>& energy, int sample_rate) {
  const double t = schroeder_fit(energy, sample_rate);
  if (std::isinf(t)) throw std::invalid_argument("measure_t60: decay does not reach -25 dB");
  if (t == 0.0) throw std::invalid_argument("measure_t60: too few samples between -5 and -25 dB");
  return t;
}

double measure_t60(const std::vector<double>& rir, int sample_rate) {
  std::vector<double> energy(rir.size());
  for (std::size_t i = 0; i < rir.size(); ++i) energy[i] = rir[i] * rir[i];
  return measure_t60_energy(energy, sample_rate);
}

}  // namespace mcsep::spatial
