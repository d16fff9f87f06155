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

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <set>
#include <sstream>

#include "orifice/imagio.hpp"
#include "orifice/synthgen.hpp"
#include "test_util.hpp"

namespace orifice::cli {
namespace {

using testutil::TempDir;

int run_cli(const std::string& args) {
  const std::string cmd = std::string(ORIFICE_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::set<std::string> listing(const fs::path& dir) {
  std::set<std::string> names;
  for (const auto& e : fs::directory_iterator(dir)) names.insert(e.path().filename().string());
  return names;
}

void synth_into(const fs::path& dir, int scenes, int k = 3, std::uint64_t seed = 7) {
  std::ostringstream sink;
  cmd_synth({k, scenes, 64, seed, 0.0, dir}, sink);
}

TEST(Config, ParsesEveryKey) {
  const auto c = config_from_json(
      R"({"smoothing_passes":2,"smoothing_kernel":5,"peak_spacing_fraction":0.1,)"
      R"("compactness":0.25,"area_threshold":0.9,"connectivity":8})");
  EXPECT_EQ(c.smoothing_passes, 2);
  EXPECT_EQ(c.smoothing_kernel, 5);
  EXPECT_DOUBLE_EQ(c.peak_spacing_fraction, 0.1);
  EXPECT_DOUBLE_EQ(c.compactness, 0.25);
  EXPECT_DOUBLE_EQ(c.area_threshold, 0.9);
  EXPECT_EQ(c.connectivity, 8);
  EXPECT_EQ(config_from_json(config_to_json(c)), c);
  EXPECT_EQ(config_from_json("{}"), depthseg::PipelineConfig{});
}

TEST(Config, RejectsTyposTypesAndRanges) {
  EXPECT_THROW(config_from_json(R"({"compactnes": 1})"), InvalidArgument);
  EXPECT_THROW(config_from_json(R"({"smoothing_passes": "3"})"), InvalidArgument);
  EXPECT_THROW(config_from_json(R"({"smoothing_passes": 2.5})"), InvalidArgument);
  EXPECT_THROW(config_from_json(R"({"smoothing_kernel": 4})"), InvalidArgument);
  EXPECT_THROW(config_from_json("[1]"), InvalidArgument);
  EXPECT_THROW(config_from_json("{oops"), InvalidArgument);
}

TEST(Summary, ThroughputIsFramesOverWallTime) {
  const auto s = summarize({4.0, 1.0, 3.0, 2.0}, 0.5);
  EXPECT_EQ(s.frames_processed, 4u);
  EXPECT_DOUBLE_EQ(s.median_latency_ms, 2.0);
  EXPECT_DOUBLE_EQ(s.p95_latency_ms, 4.0);
  EXPECT_DOUBLE_EQ(s.throughput_hz, 8.0);
  EXPECT_DOUBLE_EQ(s.median_hz(), 500.0);
}

TEST(Segment, WritesOutputsPerSample) {
  TempDir dir("seg");
  synth_into(dir / "data", 3);
  std::ostringstream out, err;
  const auto res = cmd_segment({dir / "data/manifest.jsonl", dir / "out", {}, 1, 1.0}, out, err);
  EXPECT_EQ(res.exit_code, kExitSuccess) << err.str();
  EXPECT_EQ(res.summary.frames_processed, 3u);
  for (const char* id : {"scene_0000", "scene_0001", "scene_0002"}) {
    const std::string s = id;
    EXPECT_TRUE(fs::exists(dir / ("out/" + s + "_instances.png")));
    EXPECT_TRUE(fs::exists(dir / ("out/" + s + "_mask.png")));
    EXPECT_TRUE(fs::exists(dir / ("out/" + s + "_peaks.json")));
    EXPECT_EQ(imagio::load_instance_map(dir / ("out/" + s + "_instances.png")).instance_count(),
              3u);
  }
  EXPECT_NE(out.str().find("frames_processed: 3"), std::string::npos);
}

TEST(Segment, CorruptSampleIsCountedAndBatchContinues) {
  TempDir dir("seg");
  synth_into(dir / "data", 3);
  testutil::write_bytes(dir / "data/scene_0001_depth.pfm", "Pf\n64 64\n-1.0\nshort");
  std::ostringstream out, err;
  const auto res = cmd_segment({dir / "data/manifest.jsonl", dir / "out", {}, 2, 1.0}, out, err);
  EXPECT_EQ(res.exit_code, kExitPartial);
  EXPECT_EQ(res.summary.frames_processed, 2u);
  EXPECT_EQ(res.summary.failures, 1u);
  ASSERT_EQ(res.failed_ids, std::vector<std::string>{"scene_0001"});
  EXPECT_EQ(listing(dir / "out").size(), 6u);
  EXPECT_NE(err.str().find("scene_0001"), std::string::npos);
}

TEST(Segment, OutputsIndependentOfThreadCount) {
  TempDir dir("seg");
  synth_into(dir / "data", 6, 4, 3);
  std::ostringstream sink;
  cmd_segment({dir / "data/manifest.jsonl", dir / "t1", {}, 1, 1.0}, sink, sink);
  cmd_segment({dir / "data/manifest.jsonl", dir / "t8", {}, 8, 1.0}, sink, sink);
  const auto names = listing(dir / "t1");
  ASSERT_EQ(names, listing(dir / "t8"));
  for (const auto& n : names) {
    EXPECT_EQ(testutil::read_bytes(dir / ("t1/" + n)), testutil::read_bytes(dir / ("t8/" + n)))
        << n;
  }
}

TEST(Segment, SixteenBitDepthUsesScale) {
  TempDir dir("seg");
  const auto scene = synthgen::generate(synthgen::random_scene(32, 32, 1, 5, 0.0));
  imagio::save_depth_png(scene.depth, dir / "d.png", 0.001);
  testutil::write_bytes(dir / "m.jsonl", "{\"id\":\"x\",\"depth\":\"d.png\"}\n");
  std::ostringstream sink;
  const auto res = cmd_segment({dir / "m.jsonl", dir / "out", {}, 1, 0.001}, sink, sink);
  EXPECT_EQ(res.exit_code, kExitSuccess) << sink.str();
  EXPECT_EQ(imagio::load_instance_map(dir / "out/x_instances.png").instance_count(), 1u);
}

void write_row_mask(const fs::path& p, int first, int last) {
  BinaryMask m(10, 1);
  for (int c = first; c <= last; ++c) m(0, c) = 1;
  imagio::save_mask(m, p);
}

TEST(Eval, PerfectPredictions) {
  TempDir dir("eval");
  synth_into(dir / "data", 3);
  fs::create_directories(dir / "pred");
  for (const char* id : {"scene_0000", "scene_0001", "scene_0002"}) {
    const std::string s = id;
    imagio::save_mask(imagio::load_mask_any(dir / ("data/" + s + "_gt.png")),
                      dir / ("pred/" + s + ".png"));
  }
  std::ostringstream out, err;
  const auto res = cmd_eval({dir / "pred", dir / "data/manifest.jsonl", {}, {}}, out, err);
  EXPECT_EQ(res.exit_code, kExitSuccess) << err.str();
  EXPECT_NE(out.str().find("100.00±0.00"), std::string::npos) << out.str();
  EXPECT_NE(out.str().find("0.00±0.00"), std::string::npos) << out.str();
  EXPECT_TRUE(fs::exists(dir / "pred/eval_report.csv"));
}

TEST(Eval, EmptyPredictionGivesZeroDscUndefinedAmcd) {
  TempDir dir("eval");
  synth_into(dir / "data", 1, 2);
  fs::create_directories(dir / "pred");
  imagio::save_mask(BinaryMask(64, 64), dir / "pred/scene_0000.png");
  std::ostringstream out, err;
  const auto res = cmd_eval({dir / "pred", dir / "data/manifest.jsonl", {}, {}}, out, err);
  ASSERT_EQ(res.results.size(), 1u);
  EXPECT_EQ(res.results[0].dsc, 0.0);
  EXPECT_FALSE(res.results[0].amcd);
  EXPECT_EQ(res.report->undefined_amcd_count, 1u);
}

TEST(Eval, TwoSampleReportFixture) {
  TempDir dir("eval");
  write_row_mask(dir / "a_gt.png", 0, 4);
  write_row_mask(dir / "b_gt.png", 0, 4);
  fs::create_directories(dir / "pred");
  write_row_mask(dir / "pred/a.png", 3, 7);  // overlap 2 -> 0.4
  write_row_mask(dir / "pred/b.png", 2, 6);  // overlap 3 -> 0.6
  testutil::write_bytes(dir / "m.jsonl",
                        "{\"id\":\"a\",\"gt\":\"a_gt.png\"}\n{\"id\":\"b\",\"gt\":\"b_gt.png\"}\n");
  std::ostringstream out, err;
  const auto res = cmd_eval({dir / "pred", dir / "m.jsonl", {}, dir / "r.csv"}, out, err);
  EXPECT_EQ(res.exit_code, kExitSuccess);
  EXPECT_NE(out.str().find("50.00±10.00"), std::string::npos) << out.str();
  EXPECT_NE(testutil::read_bytes(dir / "r.csv").find("dsc,50.00,10.00,2,0"), std::string::npos);
}

TEST(Eval, MissingPredictionsArePartialThenFatal) {
  TempDir dir("eval");
  write_row_mask(dir / "a_gt.png", 0, 4);
  write_row_mask(dir / "b_gt.png", 0, 4);
  fs::create_directories(dir / "pred");
  write_row_mask(dir / "pred/a_mask.png", 0, 4);
  testutil::write_bytes(dir / "m.jsonl",
                        "{\"id\":\"a\",\"gt\":\"a_gt.png\"}\n{\"id\":\"b\",\"gt\":\"b_gt.png\"}\n");
  std::ostringstream out, err;
  auto res = cmd_eval({dir / "pred", dir / "m.jsonl", {}, {}}, out, err);
  EXPECT_EQ(res.exit_code, kExitPartial);
  EXPECT_EQ(res.missing_ids, std::vector<std::string>{"b"});
  EXPECT_NE(err.str().find("'b'"), std::string::npos);

  fs::remove(dir / "pred/a_mask.png");
  res = cmd_eval({dir / "pred", dir / "m.jsonl", {}, {}}, out, err);
  EXPECT_EQ(res.exit_code, kExitFailure);
}

TEST(Eval, ResamplesToEvalResolution) {
  TempDir dir("eval");
  BinaryMask gt(64, 64), pred(32, 32);
  for (int r = 8; r < 24; ++r) {
    for (int c = 8; c < 24; ++c) gt(r, c) = 1;
  }
  for (int r = 4; r < 12; ++r) {
    for (int c = 4; c < 12; ++c) pred(r, c) = 1;
  }
  imagio::save_mask(gt, dir / "gt.png");
  fs::create_directories(dir / "pred");
  imagio::save_mask(pred, dir / "pred/s.png");
  testutil::write_bytes(dir / "m.jsonl", "{\"id\":\"s\",\"gt\":\"gt.png\"}\n");
  std::ostringstream out, err;
  auto res = cmd_eval({dir / "pred", dir / "m.jsonl", {}, {}}, out, err);
  EXPECT_EQ(res.exit_code, kExitFailure);  // size mismatch, nothing left to evaluate
  res = cmd_eval({dir / "pred", dir / "m.jsonl", Resolution{32, 32}, {}}, out, err);
  EXPECT_EQ(res.exit_code, kExitSuccess) << err.str();
  EXPECT_EQ(res.results.at(0).dsc, 1.0);

  EXPECT_EQ(parse_resolution("128").width, 128);
  EXPECT_EQ(parse_resolution("160x120").height, 120);
  EXPECT_THROW(parse_resolution("12a"), InvalidArgument);
  EXPECT_THROW(parse_resolution("0"), InvalidArgument);
}

TEST(Bench, SingleFrameAndDeterministicContent) {
  std::ostringstream out;
  const auto s = cmd_bench({64, 1, 3, 2, 0.0, {}}, out);
  EXPECT_EQ(s.frames_processed, 1u);
  EXPECT_NEAR(s.wall_time_s * 1000.0, s.median_latency_ms, 1e-9);
  EXPECT_NEAR(s.throughput_hz, 1.0 / s.wall_time_s, 1e-6);

  std::ostringstream a, b;
  cmd_bench({64, 5, 9, 3, 0.0, {}}, a);
  cmd_bench({64, 5, 9, 3, 0.0, {}}, b);
  auto line = [](const std::string& text) {
    const auto p = text.find("instances_total");
    return text.substr(p, text.find('\n', p) - p);
  };
  EXPECT_EQ(line(a.str()), line(b.str()));
  EXPECT_EQ(line(a.str()), "instances_total: 15");
}

TEST(Synth, DeterministicFilesAndManifest) {
  TempDir dir("synth");
  synth_into(dir / "a", 3, 2, 11);
  synth_into(dir / "b", 3, 2, 11);
  const auto names = listing(dir / "a");
  EXPECT_EQ(names.size(), 10u);
  for (const auto& n : names) {
    EXPECT_EQ(testutil::read_bytes(dir / ("a/" + n)), testutil::read_bytes(dir / ("b/" + n))) << n;
  }
  const auto m = imagio::load_manifest(dir / "a/manifest.jsonl");
  ASSERT_EQ(m.entries.size(), 3u);
  EXPECT_EQ(imagio::load_instance_map(*m.entries[2].gt).instance_count(), 2u);

  std::ostringstream sink;
  EXPECT_THROW(cmd_synth({50, 1, 16, 1, 0.0, dir / "c"}, sink), InvalidArgument);
}

TEST(Overlay, Rendering) {
  const RgbImage base(6, 6, std::vector<std::uint8_t>(108, 40));
  EXPECT_EQ(render_overlay(base, InstanceMap(6, 6)), base);

  InstanceMap two(6, 6);
  for (int r = 0; r < 6; ++r) {
    for (int c = 0; c < 3; ++c) two(r, c) = 1;
    for (int c = 3; c < 6; ++c) two(r, c) = 2;
  }
  const auto img = render_overlay(base, two);
  std::set<std::array<std::uint8_t, 3>> colors;
  for (int r = 0; r < 6; ++r) {
    for (int c = 0; c < 6; ++c) {
      const auto* p = img.pixel(r, c);
      if (p[0] != 40 || p[1] != 40 || p[2] != 40) colors.insert({p[0], p[1], p[2]});
    }
  }
  EXPECT_EQ(colors.size(), 2u);
  EXPECT_NE(label_color(1), label_color(2));
  EXPECT_EQ(render_overlay(base, two), img);
  EXPECT_THROW(render_overlay(base, InstanceMap(5, 6)), InvalidArgument);
}

TEST(Overlay, GtAndIdenticalPredictionGiveSameBytes) {
  TempDir dir("overlay");
  synth_into(dir / "data", 1);
  imagio::save_instance_map(imagio::load_instance_map(dir / "data/scene_0000_gt.png"),
                            dir / "pred.png");
  cmd_overlay({dir / "data/scene_0000_depth.pfm", dir / "data/scene_0000_gt.png", dir / "a.png"});
  cmd_overlay({dir / "data/scene_0000_depth.pfm", dir / "pred.png", dir / "b.png"});
  EXPECT_EQ(testutil::read_bytes(dir / "a.png"), testutil::read_bytes(dir / "b.png"));
  const auto rgb = imagio::load_rgb(dir / "a.png");
  EXPECT_EQ(rgb.width(), 64);
}

TEST(Binary, ExitCodes) {
  TempDir dir("bin");
  const std::string d = dir.path().string();
  EXPECT_EQ(run_cli("--help"), 0);
  EXPECT_EQ(run_cli("synth --k 2 --scenes 3 --resolution 48 --out " + d + "/data"), 0);
  EXPECT_EQ(run_cli("segment --manifest " + d + "/data/manifest.jsonl --out " + d + "/out"), 0);
  EXPECT_EQ(run_cli("eval --manifest " + d + "/data/manifest.jsonl --pred " + d + "/out"), 0);

  testutil::write_bytes(dir / "bad.json", "{\"compactnes\": 2}");
  EXPECT_EQ(run_cli("segment --config " + d + "/bad.json --manifest " + d +
                    "/data/manifest.jsonl --out " + d + "/out2"),
            1);
  testutil::write_bytes(dir / "good.json", "{\"compactness\": 2, \"connectivity\": 8}");
  EXPECT_EQ(run_cli("segment --config " + d + "/good.json --threads 4 --manifest " + d +
                    "/data/manifest.jsonl --out " + d + "/out3"),
            0);

  testutil::write_bytes(dir / "data/scene_0002_depth.pfm", "garbage");
  EXPECT_EQ(run_cli("segment --manifest " + d + "/data/manifest.jsonl --out " + d + "/out4"), 2);
  EXPECT_EQ(run_cli("segment --manifest " + d + "/missing.jsonl --out " + d + "/out5"), 1);
  EXPECT_EQ(run_cli("segment --manifest"), 1);
  EXPECT_EQ(run_cli("bench --resolution 32 --frames 3"), 0);
  EXPECT_EQ(run_cli("synth --k 50 --resolution 16 --out " + d + "/nope"), 1);
  EXPECT_EQ(run_cli("overlay --base " + d + "/data/scene_0000_depth.pfm --instances " + d +
                    "/out/scene_0000_instances.png --out " + d + "/ov.png"),
            0);
}

}  // namespace
}  // namespace orifice::cli
