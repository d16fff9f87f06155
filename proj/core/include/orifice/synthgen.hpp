// Copyright 2026 The Orifice Authors. All rights reserved.
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

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "orifice/raster.hpp"

namespace orifice::synthgen {

/// Deterministic noise source: std::mt19937_64 (bit-exact by the C++
/// standard) with portable conversions, so fixtures match across standard
/// libraries. std::*_distribution is deliberately not used: its output is
/// implementation-defined.
///
///   uniform() = (next() >> 11) * 2^-53                      in [0, 1)
///   normal()  = sqrt(-2 ln(1 - u1)) * cos(2 pi u2)          one value per call
class NoiseSource {
 public:
  explicit NoiseSource(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();

 private:
  std::mt19937_64 engine_;
};

struct Orifice {
  double row = 0.0;
  double col = 0.0;
  double radius = 0.0;
  double depth_peak = 0.0;

  friend bool operator==(const Orifice&, const Orifice&) = default;
};

struct SceneSpec {
  int width = 128;
  int height = 128;
  std::vector<Orifice> orifices;
  double background_depth = 1.0;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;

  /// Throws InvalidArgument on out-of-bounds centers, radii < 2, a peak not
  /// above the background, negative noise, or overlapping discs.
  void validate() const;

  friend bool operator==(const SceneSpec&, const SceneSpec&) = default;
};

inline constexpr double kDefaultNoiseSigma = 0.02;
inline constexpr double kMinContrast = 0.5;
inline constexpr double kMaxContrast = 1.0;
inline constexpr int kMaxSamplingAttempts = 10000;

struct Scene {
  DepthImage depth;
  InstanceMap truth;  // label i+1 inside the disc of orifice i
};

/// background + sum of cosine bumps (peak at the center, background at the
/// radius) + Gaussian noise. Pixels pushed below zero by noise are invalid.
Scene generate(const SceneSpec& spec);

/// k discs fully inside the frame with radius in [0.05, 0.15] * min(w, h)
/// (never below 2 px), centers at least max(2 * 0.05 * min(w, h), r_i + r_j)
/// apart, peak contrast in [0.5, 1.0] over a background of 1.0.
///
/// Throws InvalidArgument when rejection sampling needs more than 10000 draws.
SceneSpec random_scene(int width, int height, int k, std::uint64_t seed,
                       double noise_sigma = kDefaultNoiseSigma);

std::string scene_to_json(const SceneSpec& spec);
SceneSpec scene_from_json(std::string_view json);

}  // namespace orifice::synthgen
