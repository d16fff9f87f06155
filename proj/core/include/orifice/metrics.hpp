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

#include <optional>
#include <string>
#include <vector>

#include "orifice/raster.hpp"

namespace orifice::metrics {

struct Centroid {
  double row = 0.0;
  double col = 0.0;

  friend bool operator==(const Centroid&, const Centroid&) = default;
};

/// 2|A n B| / (|A| + |B|). `both_empty` is returned when neither mask has a
/// foreground pixel. Throws InvalidArgument on a dimension mismatch.
double dsc(const BinaryMask& a, const BinaryMask& b, double both_empty = 1.0);

/// First moment (mean row, mean col) of every nonzero label, by label id.
/// Labels without pixels are skipped.
std::vector<Centroid> centroids(const InstanceMap& instances);

/// 8-connected components, labeled in row-major first-encounter order.
InstanceMap binary_to_instances(const BinaryMask& mask);

/// Mean over ground-truth centroids of the distance to the nearest predicted
/// centroid. nullopt when either set is empty. Not symmetric.
std::optional<double> amcd(const std::vector<Centroid>& gt, const std::vector<Centroid>& pred);

struct EvalResult {
  std::string sample_id;
  double dsc = 0.0;
  std::optional<double> amcd;
  std::size_t n_gt = 0;
  std::size_t n_pred = 0;
};

EvalResult evaluate_sample(const BinaryMask& pred, const BinaryMask& gt,
                           std::string sample_id = {}, double both_empty_dsc = 1.0);

/// Nearest-neighbor resampling (source pixel = floor((dst + 0.5) * src / dst)).
BinaryMask resample_nearest(const BinaryMask& mask, int width, int height);

struct MetricStats {
  double mean = 0.0;
  double std = 0.0;  // population
  std::size_t n_samples = 0;
};

struct DatasetReport {
  MetricStats dsc;
  MetricStats amcd;  // over samples with a defined value only
  std::size_t undefined_amcd_count = 0;
  std::size_t total_samples = 0;

  /// Aligned text table; DSC shown x100, AMCD in pixels, as mean±std.
  std::string to_table() const;
  /// Columns metric,mean,std,n,undefined_count. DSC scaled x100.
  std::string to_csv() const;
};

/// Formats `mean±std` with two decimals.
std::string format_cell(double mean, double std);

/// Throws InvalidArgument on empty input.
DatasetReport aggregate(const std::vector<EvalResult>& results);

}  // namespace orifice::metrics
