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

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "orifice/depthseg.hpp"
#include "orifice/metrics.hpp"

namespace orifice::cli {

namespace fs = std::filesystem;

enum ExitCode : int {
  kExitSuccess = 0,
  kExitFailure = 1,
  kExitPartial = 2,
};

struct RunSummary {
  std::size_t frames_processed = 0;
  std::size_t flagged_empty = 0;
  std::size_t failures = 0;
  double wall_time_s = 0.0;
  double median_latency_ms = 0.0;
  double p95_latency_ms = 0.0;
  double throughput_hz = 0.0;  // frames_processed / wall_time_s

  /// 1000 / median latency; 0 when nothing was timed.
  double median_hz() const { return median_latency_ms > 0.0 ? 1000.0 / median_latency_ms : 0.0; }
  std::string to_text() const;
};

/// Fills latency statistics (nearest-rank percentiles) and throughput.
RunSummary summarize(std::vector<double> latencies_ms, double wall_time_s);

/// Parses a JSON object whose keys mirror PipelineConfig field names.
/// Unknown keys, wrong types and out-of-range values throw InvalidArgument.
depthseg::PipelineConfig config_from_json(const std::string& text,
                                          depthseg::PipelineConfig base = {});
depthseg::PipelineConfig load_config(const fs::path& path);
std::string config_to_json(const depthseg::PipelineConfig& config);

// -- segment ----------------------------------------------------------------

struct SegmentOptions {
  fs::path manifest;
  fs::path out_dir;
  depthseg::PipelineConfig config;
  int threads = 1;
  double scale = 1.0;
};

struct SegmentOutcome {
  RunSummary summary;
  std::vector<std::string> failed_ids;
  int exit_code = kExitSuccess;
};

/// Per sample writes <id>_instances.png (16-bit labels), <id>_mask.png
/// ({0,255}) and <id>_peaks.json. Failed samples are logged and counted;
/// output bytes do not depend on the thread count.
SegmentOutcome cmd_segment(const SegmentOptions& options, std::ostream& out, std::ostream& err);

// -- eval -------------------------------------------------------------------

struct Resolution {
  int width = 0;
  int height = 0;
};

/// "128" (square) or "160x120".
Resolution parse_resolution(const std::string& text);

struct EvalOptions {
  fs::path pred_dir;
  fs::path manifest;
  std::optional<Resolution> eval_resolution;
  std::optional<fs::path> csv_path;  // default: <pred_dir>/eval_report.csv
  double both_empty_dsc = 1.0;
};

struct EvalOutcome {
  std::vector<metrics::EvalResult> results;
  std::optional<metrics::DatasetReport> report;
  std::vector<std::string> missing_ids;
  std::vector<std::string> failed_ids;
  int exit_code = kExitSuccess;
};

/// Prediction for sample `id` is looked up as <id>.png, <id>_mask.png, then
/// <id>_instances.png inside pred_dir.
EvalOutcome cmd_eval(const EvalOptions& options, std::ostream& out, std::ostream& err);

// -- bench ------------------------------------------------------------------

struct BenchOptions {
  int resolution = 128;
  int frames = 100;
  std::uint64_t seed = 0;
  int orifices = 3;
  double noise_sigma = 0.0;
  depthseg::PipelineConfig config;
};

/// Times run_pipeline alone, single-threaded, over pre-generated scenes.
RunSummary cmd_bench(const BenchOptions& options, std::ostream& out);

// -- synth ------------------------------------------------------------------

struct SynthOptions {
  int orifices = 3;
  int scenes = 1;
  int resolution = 128;
  std::uint64_t seed = 0;
  double noise_sigma = 0.0;
  fs::path out_dir;
};

/// Scene i uses seed + i. Writes <id>_depth.pfm, <id>_gt.png,
/// <id>_scene.json and manifest.jsonl (relative paths).
void cmd_synth(const SynthOptions& options, std::ostream& out);

// -- overlay ----------------------------------------------------------------

/// Draws instance boundaries in a fixed per-label palette over `base`.
RgbImage render_overlay(const RgbImage& base, const InstanceMap& instances);

/// Maps valid depth linearly to gray (near = bright); invalid pixels are black.
RgbImage depth_to_rgb(const DepthImage& depth);

/// Palette color of label l >= 1, stable across runs.
std::array<std::uint8_t, 3> label_color(std::uint32_t label);

struct OverlayOptions {
  fs::path base;       // RGB/gray 8-bit PNG, 16-bit depth PNG or PFM
  fs::path instances;  // 16-bit instance map PNG
  fs::path out;
  double scale = 1.0;
};

void cmd_overlay(const OverlayOptions& options);

}  // namespace orifice::cli
