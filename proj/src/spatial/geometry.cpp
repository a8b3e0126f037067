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

#include "mcsep/spatial/geometry.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace mcsep::spatial {

namespace {

bool inside(const Vec3& p, const Vec3& room, double margin) {
  return p.x > margin && p.y > margin && p.z > margin && p.x < room.x - margin && p.y < room.y - margin &&
         p.z < room.z - margin;
}

Vec3 uniform_in_box(util::Rng& rng, const Vec3& lo, const Vec3& hi) {
  return {util::uniform(rng, lo.x, hi.x), util::uniform(rng, lo.y, hi.y), util::uniform(rng, lo.z, hi.z)};
}

}  // namespace

double distance(const Vec3& a, const Vec3& b) {
  return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) + (a.z - b.z) * (a.z - b.z));
}

Vec3 array_center(const Scene& scene) {
  Vec3 c;
  for (const auto& m : scene.mics) {
    c.x += m.x;
    c.y += m.y;
    c.z += m.z;
  }
  const double n = double(scene.mics.size());
  return {c.x / n, c.y / n, c.z / n};
}

Scene sample_geometry(util::Rng& rng, std::size_t mics, std::size_t speakers, bool reverberant,
                      const GeometryLimits& lim) {
  if (mics == 0) throw std::invalid_argument("sample_geometry: need at least one microphone");
  if (speakers < 2) throw std::invalid_argument("sample_geometry: need at least two speakers");
  std::size_t tries = 0;
  auto budget = [&] {
    if (++tries > lim.max_tries)
      throw SamplingFailure("sample_geometry: no valid scene after " + std::to_string(lim.max_tries) + " draws");
  };

  Scene s;
  s.room = uniform_in_box(rng, lim.room_min, lim.room_max);
  s.t60 = reverberant ? util::uniform(rng, lim.t60_min, lim.t60_max) : 0.0;

  // The array center keeps a full speaker clearance plus the wall margin
  // from every wall so that speakers can be placed on any side.
  const double clearance = lim.wall_margin + lim.array_radius;
  const Vec3 center = uniform_in_box(rng, {clearance, clearance, clearance},
                                     {s.room.x - clearance, s.room.y - clearance, std::min(2.0, s.room.z - clearance)});
  while (s.mics.size() < mics) {
    budget();
    const double r = lim.array_radius;
    const Vec3 p = uniform_in_box(rng, {-r, -r, -r}, {r, r, r});
    if (p.x * p.x + p.y * p.y + p.z * p.z > r * r) continue;
    const Vec3 mic{center.x + p.x, center.y + p.y, center.z + p.z};
    bool ok = true;
    for (const auto& other : s.mics) {
      const double d = distance(mic, other);
      ok &= d >= lim.min_mic_distance && d <= lim.max_mic_distance;
    }
    if (ok) s.mics.push_back(mic);
  }

  const Vec3 c = array_center(s);
  while (s.speakers.size() < speakers) {
    budget();
    const Vec3 p = uniform_in_box(rng, {lim.wall_margin, lim.wall_margin, lim.wall_margin},
                                  {s.room.x - lim.wall_margin, s.room.y - lim.wall_margin,
                                   s.room.z - lim.wall_margin});
    bool ok = distance(p, c) >= lim.min_array_distance;
    for (const auto& other : s.speakers) ok &= distance(p, other) >= lim.min_speaker_distance;
    if (ok) s.speakers.push_back(p);
  }
  return s;
}

std::vector<std::string> scene_violations(const Scene& s, const GeometryLimits& lim) {
  std::vector<std::string> out;
  auto note = [&](const std::string& what) { out.push_back(what); };
  for (std::size_t i = 0; i < s.mics.size(); ++i) {
    if (!inside(s.mics[i], s.room, 0.0)) note("mic " + std::to_string(i) + " outside the room");
    for (std::size_t j = i + 1; j < s.mics.size(); ++j) {
      const double d = distance(s.mics[i], s.mics[j]);
      if (d < lim.min_mic_distance || d > lim.max_mic_distance)
        note("mics " + std::to_string(i) + "," + std::to_string(j) + " are " + std::to_string(d) + " m apart");
    }
  }
  const Vec3 c = s.mics.empty() ? Vec3{} : array_center(s);
  for (std::size_t i = 0; i < s.speakers.size(); ++i) {
    if (!inside(s.speakers[i], s.room, 0.0)) note("speaker " + std::to_string(i) + " outside the room");
    if (distance(s.speakers[i], c) < lim.min_array_distance)
      note("speaker " + std::to_string(i) + " too close to the array");
    for (std::size_t j = i + 1; j < s.speakers.size(); ++j)
      if (distance(s.speakers[i], s.speakers[j]) < lim.min_speaker_distance)
        note("speakers " + std::to_string(i) + "," + std::to_string(j) + " too close");
  }
  if (s.t60 != 0.0 && (s.t60 < lim.t60_min || s.t60 > lim.t60_max))
    note("T60 " + std::to_string(s.t60) + " s outside the allowed range");
  return out;
}

double azimuth_deg(const Vec3& from, const Vec3& to) {
  double a = std::atan2(to.y - from.y, to.x - from.x) * 180.0 / std::numbers::pi;
  if (a < 0) a += 360.0;
  if (a >= 360.0) a -= 360.0;
  return a;
}

double angle_difference_deg(double a, double b) {
  double d = std::fmod(std::abs(a - b), 360.0);
  if (d > 180.0) d = 360.0 - d;
  return d;
}

double angle_difference(const Scene& scene) {
  if (scene.speakers.size() < 2) throw std::invalid_argument("angle_difference: need two speakers");
  const Vec3 c = array_center(scene);
  return angle_difference_deg(azimuth_deg(c, scene.speakers[0]), azimuth_deg(c, scene.speakers[1]));
}

}  // namespace mcsep::spatial
