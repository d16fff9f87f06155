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
#include <string>
#include <vector>

#include "orifice/raster.hpp"

namespace orifice::depthseg {

/// Tunables of the depth-to-instance pipeline.
struct PipelineConfig {
  int smoothing_passes = 3;
  int smoothing_kernel = 3;              // odd, >= 1
  double peak_spacing_fraction = 0.05;   // of min(width, height), in (0, 1)
  double compactness = 1.0;              // >= 0, on [0,1]-normalized depth
  double area_threshold = 0.5;           // fraction of image area, 1.0 disables
  int connectivity = 4;                  // 4 or 8

  /// Throws InvalidArgument naming the first offending field.
  void validate() const;

  /// ceil(peak_spacing_fraction * min(width, height)), at least 1.
  int min_peak_distance(int width, int height) const;

  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

struct Peak {
  int row = 0;
  int col = 0;
  double value = 0.0;

  friend bool operator==(const Peak&, const Peak&) = default;
};

struct KMeansResult {
  BinaryMask mask;      // true where valid depth >= threshold
  double threshold = 0.0;
  double low_centroid = 0.0;
  double high_centroid = 0.0;
  int iterations = 0;
};

/// Two-cluster Lloyd iteration over the valid depth values, initialized at
/// (min, max), then checked against every split of the sorted values so the
/// result is the global minimum-WCSS partition. The far (larger-mean) cluster
/// is the airway.
///
/// Throws DegenerateInput when there are no valid pixels or fewer than two
/// distinct valid values.
KMeansResult kmeans2_depth(const DepthImage& depth);

/// `passes` stride-1 mean filters of size kernel x kernel, clamp-to-edge.
/// Invalid pixels do not contribute to any window and stay invalid.
DepthImage smooth_depth(const DepthImage& depth, const PipelineConfig& config);
DepthImage box_filter(const DepthImage& depth, int kernel, int passes);

/// Local maxima (>= all valid 8-neighbors) inside `mask`, thinned by greedy
/// non-maximum suppression: value descending then row-major, keeping a
/// candidate only if it is at least `min_distance` (Euclidean) from every
/// accepted peak. Returned in acceptance order.
std::vector<Peak> detect_peaks(const DepthImage& smoothed, const BinaryMask& mask,
                               int min_distance);
std::vector<Peak> detect_peaks(const DepthImage& smoothed, const BinaryMask& mask,
                               const PipelineConfig& config);

/// Compact marker-based watershed on an (already inverted) relief.
///
/// The relief is normalized internally to [0,1] with its own valid min/max.
/// Marker i gets label i+1. Pixels are flooded lowest-priority-first with
/// FIFO order among equal priorities; a neighbor pushed from region r has
/// priority  relief(n) + compactness * |n - seed_r| / max(width, height).
/// Invalid pixels, and valid pixels not connected to any marker, stay 0.
///
/// Throws InvalidArgument on zero markers or a marker outside the valid domain.
InstanceMap compact_watershed(const DepthImage& inverted, const std::vector<Peak>& markers,
                              double compactness, int connectivity = 4);
InstanceMap compact_watershed(const DepthImage& inverted, const std::vector<Peak>& markers,
                              const PipelineConfig& config);

/// Clears pixels outside `mask`, then re-compacts the surviving labels.
InstanceMap compose(const InstanceMap& instances, const BinaryMask& mask);

/// Removes instances larger than area_threshold * width * height.
InstanceMap area_filter(const InstanceMap& instances, double area_threshold);
InstanceMap area_filter(const InstanceMap& instances, const PipelineConfig& config);

/// max_valid - depth for valid pixels; invalid pixels stay invalid.
DepthImage invert_depth(const DepthImage& depth);

struct PipelineResult {
  InstanceMap instances;
  BinaryMask mask;
  std::vector<Peak> peaks;
  double threshold = 0.0;
  bool flagged_empty = false;
  std::string flag_reason;
};

inline constexpr int kMinPipelineDim = 8;

/// k-means -> smoothing -> peaks -> compact watershed -> compose -> area filter.
///
/// Degenerate depth (nothing valid, constant) and frames without peaks give
/// an all-zero map with `flagged_empty` set instead of throwing. Images
/// smaller than 8x8 and invalid configs throw InvalidArgument.
PipelineResult run_pipeline(const DepthImage& depth, const PipelineConfig& config = {});

}  // namespace orifice::depthseg
