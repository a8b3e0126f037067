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

// Room, microphone and speaker geometry.
//
// Rooms are shoebox-shaped with one corner at the origin. Microphones are
// scattered in a ball of radius 0.125 m around a random array center, which
// keeps every pairwise distance at or below 0.25 m; speakers are placed
// anywhere at least 0.5 m from the walls.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "mcsep/util/random.hpp"

namespace mcsep::spatial {

struct Vec3 {
  double x = 0, y = 0, z = 0;
};

double distance(const Vec3& a, const Vec3& b);

struct Scene {
  Vec3 room;  // dimensions in metres
  std::vector<Vec3> mics;
  std::vector<Vec3> speakers;
  double t60 = 0;  // seconds; 0 is anechoic
};

struct GeometryLimits {
  Vec3 room_min{5.0, 5.0, 2.8};
  Vec3 room_max{10.0, 10.0, 4.0};
  double array_radius = 0.125;
  double min_mic_distance = 0.05;
  double max_mic_distance = 0.25;
  double min_speaker_distance = 1.0;
  double min_array_distance = 0.5;
  double wall_margin = 0.5;
  double t60_min = 0.2;
  double t60_max = 0.6;
  std::size_t max_tries = 100000;
};

class SamplingFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rejection-samples a scene; T60 is uniform in [t60_min, t60_max] when
/// reverberant, 0 otherwise. Throws SamplingFailure after max_tries rejected
/// draws.
Scene sample_geometry(util::Rng& rng, std::size_t mics, std::size_t speakers, bool reverberant,
                      const GeometryLimits& limits = {});

/// Empty when every constraint holds, otherwise one message per violation.
std::vector<std::string> scene_violations(const Scene& scene, const GeometryLimits& limits = {});

Vec3 array_center(const Scene& scene);

/// Horizontal azimuth of `to` seen from `from`, degrees in [0, 360).
double azimuth_deg(const Vec3& from, const Vec3& to);

/// |azimuth difference| folded to [0, 180].
double angle_difference_deg(double a, double b);

/// Angle between the first two speakers seen from the array center.
double angle_difference(const Scene& scene);

}  // namespace mcsep::spatial
