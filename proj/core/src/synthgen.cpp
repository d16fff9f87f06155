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

#include "orifice/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "json.hpp"

namespace orifice::synthgen {

double NoiseSource::uniform() {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double NoiseSource::normal() {
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

void SceneSpec::validate() const {
  if (width <= 0 || height <= 0) throw InvalidArgument("scene must have positive dimensions");
  if (!(background_depth >= 0.0) || !std::isfinite(background_depth)) {
    throw InvalidArgument("background_depth must be finite and >= 0");
  }
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
    throw InvalidArgument("noise_sigma must be finite and >= 0");
  }
  for (std::size_t i = 0; i < orifices.size(); ++i) {
    const Orifice& o = orifices[i];
    const std::string name = "orifice " + std::to_string(i);
    if (!(o.row >= 0.0 && o.row <= height - 1 && o.col >= 0.0 && o.col <= width - 1)) {
      throw InvalidArgument(name + " center lies outside the image");
    }
    if (!(o.radius >= 2.0)) throw InvalidArgument(name + " radius must be >= 2");
    if (!(o.depth_peak > background_depth) || !std::isfinite(o.depth_peak)) {
      throw InvalidArgument(name + " depth_peak must exceed background_depth");
    }
    for (std::size_t j = 0; j < i; ++j) {
      const Orifice& p = orifices[j];
      if (std::hypot(o.row - p.row, o.col - p.col) < o.radius + p.radius) {
        throw InvalidArgument("orifices " + std::to_string(j) + " and " + std::to_string(i) +
                              " overlap");
      }
    }
  }
}

Scene generate(const SceneSpec& spec) {
  spec.validate();
  const int w = spec.width;
  const int h = spec.height;
  const std::size_t n = static_cast<std::size_t>(w) * h;

  std::vector<double> values(n, spec.background_depth);
  InstanceMap truth(w, h);
  for (std::size_t k = 0; k < spec.orifices.size(); ++k) {
    const Orifice& o = spec.orifices[k];
    const double contrast = o.depth_peak - spec.background_depth;
    const int r0 = std::max(0, static_cast<int>(std::floor(o.row - o.radius)));
    const int r1 = std::min(h - 1, static_cast<int>(std::ceil(o.row + o.radius)));
    const int c0 = std::max(0, static_cast<int>(std::floor(o.col - o.radius)));
    const int c1 = std::min(w - 1, static_cast<int>(std::ceil(o.col + o.radius)));
    for (int r = r0; r <= r1; ++r) {
      for (int c = c0; c <= c1; ++c) {
        const double d = std::hypot(r - o.row, c - o.col);
        if (d >= o.radius) continue;
        const std::size_t i = static_cast<std::size_t>(r) * w + c;
        values[i] += contrast * 0.5 * (1.0 + std::cos(std::numbers::pi * d / o.radius));
        truth[i] = static_cast<std::uint32_t>(k + 1);
      }
    }
  }

  std::vector<std::uint8_t> valid(n, 1);
  if (spec.noise_sigma > 0.0) {
    NoiseSource noise(spec.seed);
    for (std::size_t i = 0; i < n; ++i) {
      values[i] += spec.noise_sigma * noise.normal();
      if (values[i] < 0.0) valid[i] = 0;
    }
  }
  return {DepthImage(w, h, std::move(values), std::move(valid)), std::move(truth)};
}

SceneSpec random_scene(int width, int height, int k, std::uint64_t seed, double noise_sigma) {
  if (width <= 0 || height <= 0) throw InvalidArgument("scene must have positive dimensions");
  if (k < 0) throw InvalidArgument("orifice count must be >= 0");

  SceneSpec spec;
  spec.width = width;
  spec.height = height;
  spec.background_depth = 1.0;
  spec.noise_sigma = noise_sigma;
  spec.seed = seed;

  const double min_dim = std::min(width, height);
  const double r_lo = std::max(2.0, 0.05 * min_dim);
  const double r_hi = std::max(2.0, 0.15 * min_dim);
  const double min_separation = 2.0 * 0.05 * min_dim;

  NoiseSource rng(seed);
  int attempts = 0;
  while (static_cast<int>(spec.orifices.size()) < k) {
    if (++attempts > kMaxSamplingAttempts) {
      throw InvalidArgument("cannot place " + std::to_string(k) + " orifices in " +
                            std::to_string(width) + "x" + std::to_string(height) + " after " +
                            std::to_string(kMaxSamplingAttempts) + " attempts");
    }
    Orifice o;
    o.radius = rng.uniform(r_lo, r_hi);
    const double u_row = rng.uniform();
    const double u_col = rng.uniform();
    o.depth_peak = spec.background_depth + rng.uniform(kMinContrast, kMaxContrast);
    if (2.0 * o.radius > height - 1 || 2.0 * o.radius > width - 1) continue;
    o.row = o.radius + u_row * (height - 1 - 2.0 * o.radius);
    o.col = o.radius + u_col * (width - 1 - 2.0 * o.radius);
    const bool separated = std::all_of(spec.orifices.begin(), spec.orifices.end(),
                                       [&](const Orifice& p) {
      const double d = std::hypot(o.row - p.row, o.col - p.col);
      return d >= std::max(min_separation, o.radius + p.radius);
    });
    if (separated) spec.orifices.push_back(o);
  }
  return spec;
}

std::string scene_to_json(const SceneSpec& spec) {
  nlohmann::ordered_json j;
  j["width"] = spec.width;
  j["height"] = spec.height;
  j["background_depth"] = spec.background_depth;
  j["noise_sigma"] = spec.noise_sigma;
  j["seed"] = spec.seed;
  j["orifices"] = nlohmann::ordered_json::array();
  for (const auto& o : spec.orifices) {
    j["orifices"].push_back(
        {{"row", o.row}, {"col", o.col}, {"radius", o.radius}, {"depth_peak", o.depth_peak}});
  }
  return j.dump(2);
}

SceneSpec scene_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    SceneSpec spec;
    spec.width = j.at("width").get<int>();
    spec.height = j.at("height").get<int>();
    spec.background_depth = j.at("background_depth").get<double>();
    spec.noise_sigma = j.at("noise_sigma").get<double>();
    spec.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& o : j.at("orifices")) {
      spec.orifices.push_back({o.at("row").get<double>(), o.at("col").get<double>(),
                               o.at("radius").get<double>(), o.at("depth_peak").get<double>()});
    }
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed scene JSON: ") + e.what());
  }
}

}  // namespace orifice::synthgen
