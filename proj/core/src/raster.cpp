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

#include "orifice/raster.hpp"

#include <algorithm>
#include <cmath>

namespace orifice {

std::uint32_t InstanceMap::instance_count() const noexcept {
  const auto px = pixels();
  return px.empty() ? 0u : *std::max_element(px.begin(), px.end());
}

std::vector<std::size_t> InstanceMap::areas() const {
  std::vector<std::size_t> counts(static_cast<std::size_t>(instance_count()) + 1, 0);
  for (const auto label : pixels()) ++counts[label];
  return counts;
}

bool InstanceMap::is_compact() const {
  const auto counts = areas();
  return std::all_of(counts.begin() + 1, counts.end(), [](std::size_t n) { return n > 0; });
}

BinaryMask InstanceMap::to_mask() const {
  BinaryMask mask(width(), height());
  for (std::size_t i = 0; i < size(); ++i) mask[i] = (*this)[i] != 0 ? 1 : 0;
  return mask;
}

RgbImage::RgbImage(int width, int height, std::vector<std::uint8_t> data)
    : width_(width), height_(height), data_(std::move(data)) {
  if (width < 0 || height < 0 ||
      data_.size() != static_cast<std::size_t>(width) * height * 3) {
    throw InvalidArgument("rgb data length does not match " + std::to_string(width) + "x" +
                          std::to_string(height) + "x3");
  }
}

RgbImage::RgbImage(int width, int height)
    : RgbImage(width, height,
               std::vector<std::uint8_t>(static_cast<std::size_t>(std::max(width, 0)) *
                                         std::max(height, 0) * 3)) {}

DepthImage::DepthImage(int width, int height, std::vector<double> values)
    : DepthImage(width, height, std::move(values),
                 std::vector<std::uint8_t>(static_cast<std::size_t>(std::max(width, 0)) *
                                           std::max(height, 0), 1)) {}

DepthImage::DepthImage(int width, int height, std::vector<double> values,
                       std::vector<std::uint8_t> valid)
    : values_(width, height, std::move(values)), valid_(width, height, std::move(valid)) {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (valid_[i] == 0) {
      values_[i] = 0.0;
      continue;
    }
    valid_[i] = 1;
    const double v = values_[i];
    if (!std::isfinite(v) || v < 0.0) {
      throw InvalidArgument("valid depth at index " + std::to_string(i) +
                            " is not finite and non-negative");
    }
  }
}

std::size_t DepthImage::valid_count() const noexcept {
  const auto px = valid_.pixels();
  return static_cast<std::size_t>(std::count(px.begin(), px.end(), std::uint8_t{1}));
}

InstanceMap compact_labels(const Raster<std::uint32_t>& labels, const std::vector<bool>& keep) {
  std::uint32_t max_label = 0;
  for (const auto l : labels.pixels()) max_label = std::max(max_label, l);

  std::vector<std::uint8_t> present(static_cast<std::size_t>(max_label) + 1, 0);
  for (const auto l : labels.pixels()) present[l] = 1;

  std::vector<std::uint32_t> remap(present.size(), 0);
  std::uint32_t next = 1;
  for (std::uint32_t l = 1; l <= max_label; ++l) {
    const bool kept = keep.empty() || (l < keep.size() && keep[l]);
    if (present[l] && kept) remap[l] = next++;
  }

  InstanceMap out(labels.width(), labels.height());
  for (std::size_t i = 0; i < labels.size(); ++i) out[i] = remap[labels[i]];
  return out;
}

}  // namespace orifice
