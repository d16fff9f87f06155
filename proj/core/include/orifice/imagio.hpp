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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "orifice/raster.hpp"

namespace orifice::imagio {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Raw PNG access
// ---------------------------------------------------------------------------

/// Decoded PNG samples, one std::uint16_t per channel sample regardless of
/// the stored bit depth (8-bit files hold values in [0, 255]).
struct PngData {
  int width = 0;
  int height = 0;
  int channels = 1;   // 1 (gray), 3 (RGB) or 4 (RGBA)
  int bit_depth = 8;  // 8 or 16; 1/2/4-bit gray is expanded to 8
  std::vector<std::uint16_t> samples;
};

PngData read_png(const fs::path& path);

/// Writes without ancillary chunks, so identical input yields identical bytes.
void write_png(const fs::path& path, const PngData& png);

// ---------------------------------------------------------------------------
// Depth
// ---------------------------------------------------------------------------

/// Loads a 16-bit single-channel PNG (value x scale, 0 = invalid) or a PFM
/// (non-finite or negative = invalid). The format is sniffed from the file
/// magic, not the extension.
DepthImage load_depth(const fs::path& path, double scale = 1.0);

DepthImage load_depth_png(const fs::path& path, double scale);
DepthImage load_depth_pfm(const fs::path& path);

/// Little-endian grayscale PFM, bottom row first. Invalid pixels are NaN.
void save_depth_pfm(const DepthImage& depth, const fs::path& path);

/// 16-bit PNG storing round(value / scale). Throws if a valid value would
/// round outside [1, 65535].
void save_depth_png(const DepthImage& depth, const fs::path& path, double scale);

// ---------------------------------------------------------------------------
// Masks, instance maps, RGB
// ---------------------------------------------------------------------------

/// 8-bit gray PNG with values {0, 255}.
void save_mask(const BinaryMask& mask, const fs::path& path);
/// Rejects any 8-bit value other than 0 and 255 and any 16-bit file.
BinaryMask load_mask(const fs::path& path);
/// Accepts either a {0,255} mask or a 16-bit label image (nonzero = true).
BinaryMask load_mask_any(const fs::path& path);

constexpr std::uint32_t kMaxStoredLabel = 65535;

/// 16-bit gray PNG, pixel value = label id. Throws if K > 65535.
void save_instance_map(const InstanceMap& map, const fs::path& path);
/// Throws FormatError unless the labels form a contiguous {0..K}.
InstanceMap load_instance_map(const fs::path& path);

/// 8-bit RGB; gray inputs are replicated, alpha is dropped.
RgbImage load_rgb(const fs::path& path);
void save_rgb(const RgbImage& image, const fs::path& path);

// ---------------------------------------------------------------------------
// Manifests
// ---------------------------------------------------------------------------

struct ManifestEntry {
  std::string id;
  std::optional<fs::path> rgb;
  std::optional<fs::path> depth;
  std::optional<fs::path> gt;
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;

  const ManifestEntry* find(const std::string& id) const;
};

/// JSON-lines, one object per sample with keys id/rgb/depth/gt. Relative
/// paths are resolved against the manifest's directory. Blank lines are
/// skipped; every other problem is reported with its 1-based line number.
DatasetManifest load_manifest(const fs::path& path);

/// Paths are written verbatim; pass relative paths to get a relocatable file.
void save_manifest(const DatasetManifest& manifest, const fs::path& path);

}  // namespace orifice::imagio
