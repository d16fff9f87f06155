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

#include "orifice/cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "orifice/imagio.hpp"
#include "orifice/synthgen.hpp"

namespace orifice::cli {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

double nearest_rank(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(sorted.size())));
  return sorted[std::clamp<std::size_t>(rank, 1, sorted.size()) - 1];
}

// Runs fn(i) for i in [0, n) on `threads` workers; each index runs once.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (std::size_t t = 0; t < std::min(workers, n); ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw IoError("writing '" + path.string() + "' failed");
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
}

}  // namespace

std::string RunSummary::to_text() const {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "frames_processed: %zu\nflagged_empty: %zu\nfailures: %zu\n"
                "wall_time: %.4f s\nlatency_median: %.3f ms\nlatency_p95: %.3f ms\n"
                "throughput: %.1f Hz\nmedian_rate: %.1f Hz\n",
                frames_processed, flagged_empty, failures, wall_time_s, median_latency_ms,
                p95_latency_ms, throughput_hz, median_hz());
  return buf;
}

RunSummary summarize(std::vector<double> latencies_ms, double wall_time_s) {
  RunSummary s;
  std::sort(latencies_ms.begin(), latencies_ms.end());
  s.frames_processed = latencies_ms.size();
  s.wall_time_s = wall_time_s;
  s.median_latency_ms = nearest_rank(latencies_ms, 0.5);
  s.p95_latency_ms = nearest_rank(latencies_ms, 0.95);
  s.throughput_hz = wall_time_s > 0.0 ? static_cast<double>(s.frames_processed) / wall_time_s : 0.0;
  return s;
}

// ---------------------------------------------------------------------------

depthseg::PipelineConfig config_from_json(const std::string& text,
                                          depthseg::PipelineConfig base) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgument(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw InvalidArgument("config must be a JSON object");

  auto as_int = [](const nlohmann::json& v, const std::string& key) {
    if (!v.is_number_integer()) throw InvalidArgument("config key '" + key + "' must be an integer");
    return v.get<int>();
  };
  auto as_double = [](const nlohmann::json& v, const std::string& key) {
    if (!v.is_number()) throw InvalidArgument("config key '" + key + "' must be a number");
    return v.get<double>();
  };

  for (const auto& [key, value] : j.items()) {
    if (key == "smoothing_passes") {
      base.smoothing_passes = as_int(value, key);
    } else if (key == "smoothing_kernel") {
      base.smoothing_kernel = as_int(value, key);
    } else if (key == "peak_spacing_fraction") {
      base.peak_spacing_fraction = as_double(value, key);
    } else if (key == "compactness") {
      base.compactness = as_double(value, key);
    } else if (key == "area_threshold") {
      base.area_threshold = as_double(value, key);
    } else if (key == "connectivity") {
      base.connectivity = as_int(value, key);
    } else {
      throw InvalidArgument("unknown config key '" + key + "'");
    }
  }
  base.validate();
  return base;
}

depthseg::PipelineConfig load_config(const fs::path& path) {
  return config_from_json(read_text(path));
}

std::string config_to_json(const depthseg::PipelineConfig& c) {
  nlohmann::ordered_json j;
  j["smoothing_passes"] = c.smoothing_passes;
  j["smoothing_kernel"] = c.smoothing_kernel;
  j["peak_spacing_fraction"] = c.peak_spacing_fraction;
  j["compactness"] = c.compactness;
  j["area_threshold"] = c.area_threshold;
  j["connectivity"] = c.connectivity;
  return j.dump(2);
}

// ---------------------------------------------------------------------------

namespace {

struct FrameResult {
  bool ok = false;
  bool flagged = false;
  std::string message;
  double latency_ms = 0.0;
};

std::string peaks_json(const std::string& id, const depthseg::PipelineResult& r) {
  nlohmann::ordered_json j;
  j["id"] = id;
  j["flagged_empty"] = r.flagged_empty;
  if (r.flagged_empty) j["reason"] = r.flag_reason;
  j["threshold"] = r.threshold;
  j["instances"] = r.instances.instance_count();
  j["peaks"] = nlohmann::ordered_json::array();
  for (const auto& p : r.peaks) j["peaks"].push_back({{"row", p.row}, {"col", p.col}, {"value", p.value}});
  return j.dump(2) + "\n";
}

}  // namespace

SegmentOutcome cmd_segment(const SegmentOptions& opt, std::ostream& out, std::ostream& err) {
  SegmentOutcome outcome;
  imagio::DatasetManifest manifest;
  try {
    opt.config.validate();
    manifest = imagio::load_manifest(opt.manifest);
    ensure_dir(opt.out_dir);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    outcome.exit_code = kExitFailure;
    return outcome;
  }

  const auto& entries = manifest.entries;
  std::vector<FrameResult> frames(entries.size());
  const auto wall_start = Clock::now();
  parallel_for(entries.size(), opt.threads, [&](std::size_t i) {
    const auto& entry = entries[i];
    FrameResult& fr = frames[i];
    const auto start = Clock::now();
    try {
      if (!entry.depth) throw InvalidArgument("sample has no depth path");
      const DepthImage depth = imagio::load_depth(*entry.depth, opt.scale);
      const auto result = depthseg::run_pipeline(depth, opt.config);
      imagio::save_instance_map(result.instances, opt.out_dir / (entry.id + "_instances.png"));
      imagio::save_mask(result.mask, opt.out_dir / (entry.id + "_mask.png"));
      write_text(opt.out_dir / (entry.id + "_peaks.json"), peaks_json(entry.id, result));
      fr.ok = true;
      fr.flagged = result.flagged_empty;
      if (fr.flagged) fr.message = result.flag_reason;
    } catch (const std::exception& e) {
      fr.message = e.what();
    }
    fr.latency_ms = ms_since(start);
  });
  const double wall = ms_since(wall_start) / 1000.0;

  std::vector<double> latencies;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const auto& fr = frames[i];
    if (!fr.ok) {
      err << "sample '" << entries[i].id << "' failed: " << fr.message << '\n';
      outcome.failed_ids.push_back(entries[i].id);
      continue;
    }
    if (fr.flagged) err << "sample '" << entries[i].id << "' flagged empty: " << fr.message << '\n';
    latencies.push_back(fr.latency_ms);
  }

  outcome.summary = summarize(std::move(latencies), wall);
  outcome.summary.failures = outcome.failed_ids.size();
  outcome.summary.flagged_empty = static_cast<std::size_t>(
      std::count_if(frames.begin(), frames.end(), [](const FrameResult& f) { return f.ok && f.flagged; }));
  out << outcome.summary.to_text();

  if (!outcome.failed_ids.empty()) {
    outcome.exit_code =
        outcome.failed_ids.size() == entries.size() ? kExitFailure : kExitPartial;
  }
  return outcome;
}

// ---------------------------------------------------------------------------

Resolution parse_resolution(const std::string& text) {
  Resolution res;
  const auto x = text.find('x');
  try {
    std::size_t used = 0;
    if (x == std::string::npos) {
      res.width = res.height = std::stoi(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
    } else {
      const std::string w = text.substr(0, x), h = text.substr(x + 1);
      res.width = std::stoi(w, &used);
      if (used != w.size()) throw std::invalid_argument(text);
      res.height = std::stoi(h, &used);
      if (used != h.size()) throw std::invalid_argument(text);
    }
  } catch (const std::logic_error&) {
    throw InvalidArgument("resolution must look like 128 or 160x120, got '" + text + "'");
  }
  if (res.width <= 0 || res.height <= 0) throw InvalidArgument("resolution must be positive");
  return res;
}

EvalOutcome cmd_eval(const EvalOptions& opt, std::ostream& out, std::ostream& err) {
  EvalOutcome outcome;
  imagio::DatasetManifest manifest;
  try {
    manifest = imagio::load_manifest(opt.manifest);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    outcome.exit_code = kExitFailure;
    return outcome;
  }

  std::size_t with_gt = 0;
  for (const auto& entry : manifest.entries) {
    if (!entry.gt) continue;
    ++with_gt;
    std::optional<fs::path> pred_path;
    for (const char* suffix : {".png", "_mask.png", "_instances.png"}) {
      const fs::path candidate = opt.pred_dir / (entry.id + suffix);
      if (fs::exists(candidate)) {
        pred_path = candidate;
        break;
      }
    }
    if (!pred_path) {
      err << "warning: no prediction for sample '" << entry.id << "', excluded\n";
      outcome.missing_ids.push_back(entry.id);
      continue;
    }
    try {
      BinaryMask gt = imagio::load_mask_any(*entry.gt);
      BinaryMask pred = imagio::load_mask_any(*pred_path);
      if (opt.eval_resolution) {
        gt = metrics::resample_nearest(gt, opt.eval_resolution->width, opt.eval_resolution->height);
        pred = metrics::resample_nearest(pred, opt.eval_resolution->width,
                                         opt.eval_resolution->height);
      }
      outcome.results.push_back(metrics::evaluate_sample(pred, gt, entry.id, opt.both_empty_dsc));
    } catch (const Error& e) {
      err << "sample '" << entry.id << "' failed: " << e.what() << '\n';
      outcome.failed_ids.push_back(entry.id);
    }
  }

  if (with_gt == 0) {
    err << "error: manifest has no ground-truth masks\n";
    outcome.exit_code = kExitFailure;
    return outcome;
  }
  if (outcome.results.empty()) {
    err << "error: no sample could be evaluated\n";
    outcome.exit_code = kExitFailure;
    return outcome;
  }

  outcome.report = metrics::aggregate(outcome.results);
  out << outcome.report->to_table();
  const fs::path csv = opt.csv_path.value_or(opt.pred_dir / "eval_report.csv");
  try {
    write_text(csv, outcome.report->to_csv());
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    outcome.exit_code = kExitFailure;
    return outcome;
  }
  if (!outcome.missing_ids.empty() || !outcome.failed_ids.empty()) outcome.exit_code = kExitPartial;
  return outcome;
}

// ---------------------------------------------------------------------------

RunSummary cmd_bench(const BenchOptions& opt, std::ostream& out) {
  opt.config.validate();
  if (opt.frames <= 0) throw InvalidArgument("bench needs at least one frame");

  std::vector<DepthImage> frames;
  frames.reserve(static_cast<std::size_t>(opt.frames));
  for (int i = 0; i < opt.frames; ++i) {
    const auto spec = synthgen::random_scene(opt.resolution, opt.resolution, opt.orifices,
                                             opt.seed + static_cast<std::uint64_t>(i),
                                             opt.noise_sigma);
    frames.push_back(synthgen::generate(spec).depth);
  }

  std::vector<double> latencies;
  latencies.reserve(frames.size());
  std::size_t flagged = 0;
  std::size_t checksum = 0;
  double total_ms = 0.0;
  for (const auto& depth : frames) {
    const auto start = Clock::now();
    const auto result = depthseg::run_pipeline(depth, opt.config);
    const double ms = ms_since(start);
    total_ms += ms;
    latencies.push_back(ms);
    flagged += result.flagged_empty;
    checksum += result.instances.instance_count();
  }

  RunSummary s = summarize(std::move(latencies), total_ms / 1000.0);
  s.flagged_empty = flagged;
  out << "resolution: " << opt.resolution << "x" << opt.resolution << "\nthreads: 1\n"
      << "instances_total: " << checksum << '\n'
      << s.to_text()
      << "reference: ~130 Hz reported for the original implementation on an i5-7200U laptop "
         "CPU (resolution unstated)\n";
  return s;
}

// ---------------------------------------------------------------------------

void cmd_synth(const SynthOptions& opt, std::ostream& out) {
  if (opt.scenes < 0) throw InvalidArgument("scene count must be >= 0");
  ensure_dir(opt.out_dir);
  imagio::DatasetManifest manifest;
  for (int i = 0; i < opt.scenes; ++i) {
    char id_buf[32];
    std::snprintf(id_buf, sizeof(id_buf), "scene_%04d", i);
    const std::string id = id_buf;
    const auto spec = synthgen::random_scene(opt.resolution, opt.resolution, opt.orifices,
                                             opt.seed + static_cast<std::uint64_t>(i),
                                             opt.noise_sigma);
    const auto scene = synthgen::generate(spec);
    imagio::save_depth_pfm(scene.depth, opt.out_dir / (id + "_depth.pfm"));
    imagio::save_instance_map(scene.truth, opt.out_dir / (id + "_gt.png"));
    write_text(opt.out_dir / (id + "_scene.json"), synthgen::scene_to_json(spec) + "\n");
    manifest.entries.push_back({id, std::nullopt, fs::path(id + "_depth.pfm"), fs::path(id + "_gt.png")});
  }
  imagio::save_manifest(manifest, opt.out_dir / "manifest.jsonl");
  out << "wrote " << opt.scenes << " scene(s) to " << opt.out_dir.string() << '\n';
}

// ---------------------------------------------------------------------------

std::array<std::uint8_t, 3> label_color(std::uint32_t label) {
  // Golden-angle hue walk, full saturation and value.
  const double hue = std::fmod(static_cast<double>(label) * 0.618033988749895, 1.0) * 6.0;
  const int sector = static_cast<int>(hue) % 6;
  const double f = hue - std::floor(hue);
  const auto up = static_cast<std::uint8_t>(std::lround(255.0 * f));
  const auto down = static_cast<std::uint8_t>(255 - up);
  switch (sector) {
    case 0: return {255, up, 0};
    case 1: return {down, 255, 0};
    case 2: return {0, 255, up};
    case 3: return {0, down, 255};
    case 4: return {up, 0, 255};
    default: return {255, 0, down};
  }
}

RgbImage render_overlay(const RgbImage& base, const InstanceMap& instances) {
  if (base.width() != instances.width() || base.height() != instances.height()) {
    throw InvalidArgument("overlay: base image and instance map dimensions differ");
  }
  RgbImage out = base;
  const int w = instances.width();
  const int h = instances.height();
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const auto l = instances(r, c);
      if (l == 0) continue;
      bool boundary = false;
      constexpr int kOffsets[4][2] = {{-1, 0}, {0, 1}, {1, 0}, {0, -1}};
      for (const auto& off : kOffsets) {
        const int rr = r + off[0], cc = c + off[1];
        if (!instances.in_bounds(rr, cc) || instances(rr, cc) != l) {
          boundary = true;
          break;
        }
      }
      if (!boundary) continue;
      const auto color = label_color(l);
      std::copy(color.begin(), color.end(), out.pixel(r, c));
    }
  }
  return out;
}

RgbImage depth_to_rgb(const DepthImage& depth) {
  double lo = 0.0, hi = 0.0;
  bool any = false;
  for (std::size_t i = 0; i < depth.size(); ++i) {
    if (!depth.valid(i)) continue;
    lo = any ? std::min(lo, depth.value(i)) : depth.value(i);
    hi = any ? std::max(hi, depth.value(i)) : depth.value(i);
    any = true;
  }
  RgbImage out(depth.width(), depth.height());
  for (int r = 0; r < depth.height(); ++r) {
    for (int c = 0; c < depth.width(); ++c) {
      std::uint8_t g = 0;
      if (depth.valid(r, c)) {
        const double t = hi > lo ? (hi - depth(r, c)) / (hi - lo) : 1.0;
        g = static_cast<std::uint8_t>(std::lround(255.0 * t));
      }
      std::uint8_t* px = out.pixel(r, c);
      px[0] = px[1] = px[2] = g;
    }
  }
  return out;
}

void cmd_overlay(const OverlayOptions& opt) {
  RgbImage base;
  {
    std::ifstream in(opt.base, std::ios::binary);
    if (!in) throw IoError("cannot open '" + opt.base.string() + "'");
    char magic[2] = {};
    in.read(magic, 2);
    if (magic[0] == 'P' && magic[1] == 'f') {
      base = depth_to_rgb(imagio::load_depth_pfm(opt.base));
    } else {
      const auto png = imagio::read_png(opt.base);
      base = png.bit_depth == 16 ? depth_to_rgb(imagio::load_depth_png(opt.base, opt.scale))
                                 : imagio::load_rgb(opt.base);
    }
  }
  const InstanceMap instances = imagio::load_instance_map(opt.instances);
  imagio::save_rgb(render_overlay(base, instances), opt.out);
}

}  // namespace orifice::cli
