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

#include "orifice/depthseg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

namespace orifice::depthseg {

void PipelineConfig::validate() const {
  if (smoothing_passes < 0) throw InvalidArgument("smoothing_passes must be >= 0");
  if (smoothing_kernel < 1 || smoothing_kernel % 2 == 0) {
    throw InvalidArgument("smoothing_kernel must be odd and >= 1");
  }
  if (!(peak_spacing_fraction > 0.0 && peak_spacing_fraction < 1.0)) {
    throw InvalidArgument("peak_spacing_fraction must lie in (0, 1)");
  }
  if (!(compactness >= 0.0) || !std::isfinite(compactness)) {
    throw InvalidArgument("compactness must be finite and >= 0");
  }
  if (!(area_threshold > 0.0 && area_threshold <= 1.0)) {
    throw InvalidArgument("area_threshold must lie in (0, 1]");
  }
  if (connectivity != 4 && connectivity != 8) {
    throw InvalidArgument("connectivity must be 4 or 8");
  }
}

int PipelineConfig::min_peak_distance(int width, int height) const {
  const double d = std::ceil(peak_spacing_fraction * std::min(width, height));
  return std::max(1, static_cast<int>(d));
}

// ---------------------------------------------------------------------------

KMeansResult kmeans2_depth(const DepthImage& depth) {
  std::vector<double> values;
  values.reserve(depth.size());
  for (std::size_t i = 0; i < depth.size(); ++i) {
    if (depth.valid(i)) values.push_back(depth.value(i));
  }
  if (values.empty()) throw DegenerateInput("depth image has no valid pixels");
  const auto [min_it, max_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *min_it;
  const double hi = *max_it;
  if (!(hi > lo)) throw DegenerateInput("depth image is constant; k-means needs two clusters");

  constexpr int kMaxIterations = 100;
  const double tolerance = 1e-9 * (hi - lo);

  KMeansResult result;
  double c_lo = lo;
  double c_hi = hi;
  for (int it = 1; it <= kMaxIterations; ++it) {
    const double t = 0.5 * (c_lo + c_hi);
    double sum_lo = 0.0, sum_hi = 0.0;
    std::size_t n_lo = 0, n_hi = 0;
    for (const double v : values) {
      if (v >= t) {
        sum_hi += v;
        ++n_hi;
      } else {
        sum_lo += v;
        ++n_lo;
      }
    }
    // min < t <= max always holds, so neither cluster can be empty.
    const double next_lo = sum_lo / static_cast<double>(n_lo);
    const double next_hi = sum_hi / static_cast<double>(n_hi);
    const bool converged =
        std::abs(next_lo - c_lo) < tolerance && std::abs(next_hi - c_hi) < tolerance;
    c_lo = next_lo;
    c_hi = next_hi;
    result.iterations = it;
    if (converged) break;
  }

  // Lloyd from (min, max) can settle on a local optimum when the values are
  // spread out. Every global optimum is also a Lloyd fixed point, so finish
  // with an exact search over the sorted split points and keep the better one.
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + (values[i] - lo);
  auto between = [&](std::size_t k, double& m_lo, double& m_hi) {
    m_lo = prefix[k] / static_cast<double>(k);
    m_hi = (prefix[n] - prefix[k]) / static_cast<double>(n - k);
    return static_cast<double>(k) * static_cast<double>(n - k) * (m_hi - m_lo) * (m_hi - m_lo);
  };
  const double lloyd_t = 0.5 * (c_lo + c_hi);
  const std::size_t lloyd_k =
      static_cast<std::size_t>(std::lower_bound(values.begin(), values.end(), lloyd_t) -
                               values.begin());
  double m_lo = 0.0, m_hi = 0.0;
  double best = between(lloyd_k, m_lo, m_hi);
  for (std::size_t k = 1; k < n; ++k) {
    if (values[k] == values[k - 1]) continue;
    double a = 0.0, b = 0.0;
    const double score = between(k, a, b);
    if (score > best) {
      best = score;
      c_lo = lo + a;
      c_hi = lo + b;
    }
  }

  result.low_centroid = c_lo;
  result.high_centroid = c_hi;
  result.threshold = 0.5 * (c_lo + c_hi);
  result.mask = BinaryMask(depth.width(), depth.height());
  for (std::size_t i = 0; i < depth.size(); ++i) {
    result.mask[i] = depth.valid(i) && depth.value(i) >= result.threshold ? 1 : 0;
  }
  return result;
}

// ---------------------------------------------------------------------------

namespace {

// One separable pass of a clamp-to-edge box sum over weighted values.
void box_pass(const std::vector<double>& num_in, const std::vector<double>& cnt_in,
              std::vector<double>& num_out, std::vector<double>& cnt_out, int width, int height,
              int radius, bool horizontal) {
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      double num = 0.0, cnt = 0.0;
      for (int d = -radius; d <= radius; ++d) {
        const int rr = horizontal ? r : std::clamp(r + d, 0, height - 1);
        const int cc = horizontal ? std::clamp(c + d, 0, width - 1) : c;
        const std::size_t j = static_cast<std::size_t>(rr) * width + cc;
        num += num_in[j];
        cnt += cnt_in[j];
      }
      const std::size_t i = static_cast<std::size_t>(r) * width + c;
      num_out[i] = num;
      cnt_out[i] = cnt;
    }
  }
}

}  // namespace

DepthImage box_filter(const DepthImage& depth, int kernel, int passes) {
  if (kernel < 1 || kernel % 2 == 0) throw InvalidArgument("box kernel must be odd and >= 1");
  if (passes < 0) throw InvalidArgument("box filter passes must be >= 0");
  if (passes == 0 || kernel == 1 || depth.size() == 0) return depth;

  const int w = depth.width();
  const int h = depth.height();
  const int radius = kernel / 2;
  const std::size_t n = depth.size();

  std::vector<double> current(n);
  std::vector<double> weight(n);
  for (std::size_t i = 0; i < n; ++i) {
    weight[i] = depth.valid(i) ? 1.0 : 0.0;
    current[i] = depth.valid(i) ? depth.value(i) : 0.0;
  }

  std::vector<double> num_a(n), cnt_a(n), num_b(n), cnt_b(n);
  for (int p = 0; p < passes; ++p) {
    box_pass(current, weight, num_a, cnt_a, w, h, radius, /*horizontal=*/true);
    box_pass(num_a, cnt_a, num_b, cnt_b, w, h, radius, /*horizontal=*/false);
    for (std::size_t i = 0; i < n; ++i) {
      current[i] = weight[i] != 0.0 ? num_b[i] / cnt_b[i] : 0.0;
    }
  }
  return DepthImage(w, h, std::move(current), depth.valid_mask().vector());
}

DepthImage smooth_depth(const DepthImage& depth, const PipelineConfig& config) {
  return box_filter(depth, config.smoothing_kernel, config.smoothing_passes);
}

// ---------------------------------------------------------------------------

std::vector<Peak> detect_peaks(const DepthImage& smoothed, const BinaryMask& mask,
                               int min_distance) {
  if (!mask.same_shape(smoothed)) throw InvalidArgument("mask and image dimensions differ");
  if (min_distance < 0) throw InvalidArgument("min_distance must be >= 0");

  const int w = smoothed.width();
  const int h = smoothed.height();

  struct Candidate {
    double value;
    std::size_t index;
  };
  std::vector<Candidate> candidates;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (!mask(r, c) || !smoothed.valid(r, c)) continue;
      const double v = smoothed(r, c);
      bool is_max = true;
      for (int dr = -1; dr <= 1 && is_max; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          if (dr == 0 && dc == 0) continue;
          const int rr = r + dr, cc = c + dc;
          if (rr < 0 || cc < 0 || rr >= h || cc >= w || !smoothed.valid(rr, cc)) continue;
          if (smoothed(rr, cc) > v) {
            is_max = false;
            break;
          }
        }
      }
      if (is_max) candidates.push_back({v, static_cast<std::size_t>(r) * w + c});
    }
  }

  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.value != b.value) return a.value > b.value;
    return a.index < b.index;
  });

  const long long min_d2 = static_cast<long long>(min_distance) * min_distance;
  std::vector<Peak> accepted;
  for (const auto& cand : candidates) {
    const int r = static_cast<int>(cand.index / w);
    const int c = static_cast<int>(cand.index % w);
    const bool far_enough = std::all_of(accepted.begin(), accepted.end(), [&](const Peak& p) {
      const long long dr = r - p.row, dc = c - p.col;
      return dr * dr + dc * dc >= min_d2;
    });
    if (far_enough) accepted.push_back({r, c, cand.value});
  }
  return accepted;
}

std::vector<Peak> detect_peaks(const DepthImage& smoothed, const BinaryMask& mask,
                               const PipelineConfig& config) {
  return detect_peaks(smoothed, mask,
                      config.min_peak_distance(smoothed.width(), smoothed.height()));
}

// ---------------------------------------------------------------------------

namespace {

struct FloodEntry {
  double priority;
  std::uint64_t seq;
  std::int32_t pixel;
  std::uint32_t label;
};

struct FloodLater {
  bool operator()(const FloodEntry& a, const FloodEntry& b) const noexcept {
    if (a.priority != b.priority) return a.priority > b.priority;
    return a.seq > b.seq;
  }
};

constexpr std::array<std::array<int, 2>, 4> kNeighbors4{{{-1, 0}, {0, 1}, {1, 0}, {0, -1}}};
constexpr std::array<std::array<int, 2>, 8> kNeighbors8{
    {{-1, 0}, {-1, 1}, {0, 1}, {1, 1}, {1, 0}, {1, -1}, {0, -1}, {-1, -1}}};

}  // namespace

InstanceMap compact_watershed(const DepthImage& inverted, const std::vector<Peak>& markers,
                              double compactness, int connectivity) {
  if (markers.empty()) throw InvalidArgument("compact watershed needs at least one marker");
  if (!(compactness >= 0.0) || !std::isfinite(compactness)) {
    throw InvalidArgument("compactness must be finite and >= 0");
  }
  if (connectivity != 4 && connectivity != 8) {
    throw InvalidArgument("connectivity must be 4 or 8");
  }
  if (markers.size() > std::numeric_limits<std::uint32_t>::max() - 1) {
    throw InvalidArgument("too many markers");
  }

  const int w = inverted.width();
  const int h = inverted.height();
  const std::size_t n = inverted.size();

  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    if (!inverted.valid(i)) continue;
    lo = std::min(lo, inverted.value(i));
    hi = std::max(hi, inverted.value(i));
  }
  const double range = hi - lo;
  std::vector<double> relief(n, 0.0);
  if (range > 0.0) {
    for (std::size_t i = 0; i < n; ++i) {
      if (inverted.valid(i)) relief[i] = (inverted.value(i) - lo) / range;
    }
  }

  for (const auto& m : markers) {
    if (m.row < 0 || m.col < 0 || m.row >= h || m.col >= w || !inverted.valid(m.row, m.col)) {
      throw InvalidArgument("marker (" + std::to_string(m.row) + ", " + std::to_string(m.col) +
                            ") is outside the valid image domain");
    }
  }

  const double scale = static_cast<double>(std::max(w, h));
  const std::span<const std::array<int, 2>> offsets =
      connectivity == 8 ? std::span<const std::array<int, 2>>(kNeighbors8)
                        : std::span<const std::array<int, 2>>(kNeighbors4);

  std::vector<FloodEntry> storage;
  storage.reserve(n * 2);
  std::priority_queue<FloodEntry, std::vector<FloodEntry>, FloodLater> queue(FloodLater{},
                                                                             std::move(storage));
  std::uint64_t seq = 0;
  for (std::size_t k = 0; k < markers.size(); ++k) {
    const auto p = static_cast<std::int32_t>(static_cast<std::size_t>(markers[k].row) * w +
                                             markers[k].col);
    queue.push({relief[p], seq++, p, static_cast<std::uint32_t>(k + 1)});
  }

  InstanceMap labels(w, h);
  while (!queue.empty()) {
    const FloodEntry top = queue.top();
    queue.pop();
    if (labels[top.pixel] != 0) continue;
    labels[top.pixel] = top.label;

    const int r = top.pixel / w;
    const int c = top.pixel % w;
    const Peak& seed = markers[top.label - 1];
    for (const auto& off : offsets) {
      const int rr = r + off[0];
      const int cc = c + off[1];
      if (rr < 0 || cc < 0 || rr >= h || cc >= w) continue;
      const std::size_t j = static_cast<std::size_t>(rr) * w + cc;
      if (labels[j] != 0 || !inverted.valid(j)) continue;
      const double dr = rr - seed.row;
      const double dc = cc - seed.col;
      const double priority = relief[j] + compactness * std::sqrt(dr * dr + dc * dc) / scale;
      queue.push({priority, seq++, static_cast<std::int32_t>(j), top.label});
    }
  }
  return labels;
}

InstanceMap compact_watershed(const DepthImage& inverted, const std::vector<Peak>& markers,
                              const PipelineConfig& config) {
  return compact_watershed(inverted, markers, config.compactness, config.connectivity);
}

// ---------------------------------------------------------------------------

InstanceMap compose(const InstanceMap& instances, const BinaryMask& mask) {
  if (!mask.same_shape(instances)) throw InvalidArgument("mask and instance map dimensions differ");
  Raster<std::uint32_t> masked = instances;
  for (std::size_t i = 0; i < masked.size(); ++i) {
    if (!mask[i]) masked[i] = 0;
  }
  return compact_labels(masked);
}

InstanceMap area_filter(const InstanceMap& instances, double area_threshold) {
  const auto areas = instances.areas();
  const double limit =
      area_threshold * static_cast<double>(instances.width()) * instances.height();
  std::vector<bool> keep(areas.size(), true);
  for (std::size_t l = 1; l < areas.size(); ++l) {
    keep[l] = static_cast<double>(areas[l]) <= limit;
  }
  return compact_labels(instances, keep);
}

InstanceMap area_filter(const InstanceMap& instances, const PipelineConfig& config) {
  return area_filter(instances, config.area_threshold);
}

DepthImage invert_depth(const DepthImage& depth) {
  double hi = 0.0;
  for (std::size_t i = 0; i < depth.size(); ++i) {
    if (depth.valid(i)) hi = std::max(hi, depth.value(i));
  }
  std::vector<double> out(depth.size(), 0.0);
  for (std::size_t i = 0; i < depth.size(); ++i) {
    if (depth.valid(i)) out[i] = hi - depth.value(i);
  }
  return DepthImage(depth.width(), depth.height(), std::move(out), depth.valid_mask().vector());
}

// ---------------------------------------------------------------------------

PipelineResult run_pipeline(const DepthImage& depth, const PipelineConfig& config) {
  config.validate();
  if (depth.width() < kMinPipelineDim || depth.height() < kMinPipelineDim) {
    throw InvalidArgument("pipeline needs at least " + std::to_string(kMinPipelineDim) + "x" +
                          std::to_string(kMinPipelineDim) + " pixels, got " +
                          std::to_string(depth.width()) + "x" + std::to_string(depth.height()));
  }

  PipelineResult result;
  result.instances = InstanceMap(depth.width(), depth.height());

  KMeansResult clusters;
  try {
    clusters = kmeans2_depth(depth);
  } catch (const DegenerateInput& e) {
    result.mask = BinaryMask(depth.width(), depth.height());
    result.flagged_empty = true;
    result.flag_reason = e.what();
    return result;
  }
  result.mask = std::move(clusters.mask);
  result.threshold = clusters.threshold;

  const DepthImage smoothed = smooth_depth(depth, config);
  result.peaks = detect_peaks(smoothed, result.mask, config);
  if (result.peaks.empty()) {
    result.flagged_empty = true;
    result.flag_reason = "no peaks inside the airway mask";
    return result;
  }

  const InstanceMap flooded = compact_watershed(invert_depth(depth), result.peaks, config);
  result.instances = area_filter(compose(flooded, result.mask), config);
  return result;
}

}  // namespace orifice::depthseg
