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

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "orifice/errors.hpp"

namespace orifice {

/// Dense row-major 2-D grid. Value type; copies are deep.
template <typename T>
class Raster {
 public:
  using value_type = T;

  Raster() = default;
  Raster(int width, int height, T fill = T{})
      : width_(checked_dim(width)), height_(checked_dim(height)),
        data_(static_cast<std::size_t>(width_) * height_, fill) {}
  Raster(int width, int height, std::vector<T> data)
      : width_(checked_dim(width)), height_(checked_dim(height)), data_(std::move(data)) {
    if (data_.size() != static_cast<std::size_t>(width_) * height_) {
      throw InvalidArgument("raster data length " + std::to_string(data_.size()) +
                            " does not match " + std::to_string(width_) + "x" +
                            std::to_string(height_));
    }
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  bool in_bounds(int row, int col) const noexcept {
    return row >= 0 && col >= 0 && row < height_ && col < width_;
  }
  std::size_t index(int row, int col) const noexcept {
    return static_cast<std::size_t>(row) * width_ + col;
  }

  T& operator()(int row, int col) noexcept { return data_[index(row, col)]; }
  const T& operator()(int row, int col) const noexcept { return data_[index(row, col)]; }
  T& operator[](std::size_t i) noexcept { return data_[i]; }
  const T& operator[](std::size_t i) const noexcept { return data_[i]; }

  std::span<T> pixels() noexcept { return data_; }
  std::span<const T> pixels() const noexcept { return data_; }
  const std::vector<T>& vector() const noexcept { return data_; }

  bool same_shape(const auto& other) const noexcept {
    return width_ == other.width() && height_ == other.height();
  }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  static int checked_dim(int d) {
    if (d < 0) throw InvalidArgument("negative raster dimension");
    return d;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

/// Binary airway mask; each byte is 0 or 1.
using BinaryMask = Raster<std::uint8_t>;

/// Instance labels, 0 = background, 1..K = instances.
class InstanceMap : public Raster<std::uint32_t> {
 public:
  using Raster::Raster;
  explicit InstanceMap(Raster<std::uint32_t> r) : Raster(std::move(r)) {}

  /// Largest label present (K).
  std::uint32_t instance_count() const noexcept;

  /// Pixel count per label; index 0 is the background.
  std::vector<std::size_t> areas() const;

  /// True when labels form {0..K} with every nonzero label populated.
  bool is_compact() const;

  /// Binary mask of all nonzero labels.
  BinaryMask to_mask() const;
};

/// 8-bit interleaved RGB.
class RgbImage {
 public:
  RgbImage() = default;
  RgbImage(int width, int height, std::vector<std::uint8_t> data);
  RgbImage(int width, int height);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::span<const std::uint8_t> data() const noexcept { return data_; }
  std::uint8_t* pixel(int row, int col) noexcept {
    return &data_[(static_cast<std::size_t>(row) * width_ + col) * 3];
  }
  const std::uint8_t* pixel(int row, int col) const noexcept {
    return &data_[(static_cast<std::size_t>(row) * width_ + col) * 3];
  }

  friend bool operator==(const RgbImage&, const RgbImage&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

/// Scalar depth (larger = farther) with a per-pixel validity mask.
///
/// Valid values are finite and non-negative; the value stored under an
/// invalid pixel is unspecified and never read by the library.
class DepthImage {
 public:
  DepthImage() = default;
  /// All pixels valid.
  DepthImage(int width, int height, std::vector<double> values);
  DepthImage(int width, int height, std::vector<double> values, std::vector<std::uint8_t> valid);

  int width() const noexcept { return values_.width(); }
  int height() const noexcept { return values_.height(); }
  std::size_t size() const noexcept { return values_.size(); }

  double operator()(int row, int col) const noexcept { return values_(row, col); }
  double value(std::size_t i) const noexcept { return values_[i]; }
  bool valid(std::size_t i) const noexcept { return valid_[i] != 0; }
  bool valid(int row, int col) const noexcept { return valid_(row, col) != 0; }

  const Raster<double>& values() const noexcept { return values_; }
  const BinaryMask& valid_mask() const noexcept { return valid_; }

  std::size_t valid_count() const noexcept;

  friend bool operator==(const DepthImage&, const DepthImage&) = default;

 private:
  Raster<double> values_;
  BinaryMask valid_;
};

/// Relabels so that the surviving nonzero labels become {1..K'} in their
/// original order. Labels with `keep[label] == false` are cleared first.
InstanceMap compact_labels(const Raster<std::uint32_t>& labels, const std::vector<bool>& keep = {});

}  // namespace orifice
