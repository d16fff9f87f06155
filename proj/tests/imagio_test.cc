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

#include "orifice/imagio.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "test_util.hpp"

namespace orifice::imagio {
namespace {

using testutil::TempDir;

void write_gray16(const fs::path& path, int w, int h, std::vector<std::uint16_t> samples) {
  write_png(path, PngData{w, h, 1, 16, std::move(samples)});
}

TEST(LoadDepth, ScalesSixteenBitPng) {
  TempDir dir("depth");
  write_gray16(dir / "d.png", 4, 3, std::vector<std::uint16_t>(12, 1000));
  const DepthImage d = load_depth(dir / "d.png", 0.001);
  ASSERT_EQ(d.width(), 4);
  ASSERT_EQ(d.height(), 3);
  for (std::size_t i = 0; i < d.size(); ++i) {
    EXPECT_TRUE(d.valid(i));
    EXPECT_DOUBLE_EQ(d.value(i), 1.0);
  }
}

TEST(LoadDepth, ZeroPngPixelIsInvalid) {
  TempDir dir("depth");
  std::vector<std::uint16_t> px(9, 500);
  px[4] = 0;
  write_gray16(dir / "d.png", 3, 3, px);
  const DepthImage d = load_depth(dir / "d.png", 1.0);
  EXPECT_FALSE(d.valid(1, 1));
  EXPECT_EQ(d.valid_count(), 8u);
}

TEST(LoadDepth, PfmNanPixelIsInvalid) {
  TempDir dir("depth");
  std::vector<double> v{1.5, 2.0, 3.25, 4.0};
  std::vector<std::uint8_t> valid{1, 0, 1, 1};
  save_depth_pfm(DepthImage(2, 2, v, valid), dir / "d.pfm");
  const DepthImage d = load_depth(dir / "d.pfm");
  EXPECT_FALSE(d.valid(0, 1));
  EXPECT_DOUBLE_EQ(d(0, 0), 1.5);
  EXPECT_DOUBLE_EQ(d(1, 0), 3.25);
  EXPECT_DOUBLE_EQ(d(1, 1), 4.0);
}

TEST(LoadDepth, PfmIsBottomRowFirstLittleEndian) {
  TempDir dir("depth");
  save_depth_pfm(DepthImage(1, 2, {1.0, 2.0}), dir / "d.pfm");
  const std::string bytes = testutil::read_bytes(dir / "d.pfm");
  const std::string header = "Pf\n1 2\n-1.0\n";
  ASSERT_EQ(bytes.size(), header.size() + 8);
  EXPECT_EQ(bytes.substr(0, header.size()), header);
  // 2.0f = 0x40000000 first (bottom row), then 1.0f = 0x3f800000.
  const std::string payload = bytes.substr(header.size());
  EXPECT_EQ(payload, std::string("\x00\x00\x00\x40\x00\x00\x80\x3f", 8));
}

TEST(LoadDepth, ReadsBigEndianPfm) {
  TempDir dir("depth");
  std::string bytes = "Pf\n2 1\n1.0\n";
  bytes += std::string("\x3f\x80\x00\x00\x7f\xc0\x00\x00", 8);  // 1.0f, NaN
  testutil::write_bytes(dir / "be.pfm", bytes);
  const DepthImage d = load_depth(dir / "be.pfm");
  EXPECT_DOUBLE_EQ(d(0, 0), 1.0);
  EXPECT_FALSE(d.valid(0, 1));
}

TEST(LoadDepth, RejectsEightBitPng) {
  TempDir dir("depth");
  write_png(dir / "d.png", PngData{2, 2, 1, 8, {1, 2, 3, 4}});
  EXPECT_THROW(load_depth(dir / "d.png", 1.0), FormatError);
}

TEST(LoadDepth, RejectsMissingFileAndBadScale) {
  TempDir dir("depth");
  EXPECT_THROW(load_depth(dir / "nope.png", 1.0), IoError);
  write_gray16(dir / "d.png", 2, 2, {1, 2, 3, 4});
  EXPECT_THROW(load_depth(dir / "d.png", 0.0), InvalidArgument);
  EXPECT_THROW(load_depth(dir / "d.png", -1.0), InvalidArgument);
}

TEST(LoadDepth, RejectsZeroAreaAndTruncatedPfm) {
  TempDir dir("depth");
  testutil::write_bytes(dir / "zero.pfm", "Pf\n0 4\n-1.0\n");
  EXPECT_THROW(load_depth(dir / "zero.pfm"), FormatError);
  testutil::write_bytes(dir / "short.pfm", "Pf\n4 4\n-1.0\n" + std::string(10, '\0'));
  EXPECT_THROW(load_depth(dir / "short.pfm"), FormatError);
  testutil::write_bytes(dir / "color.pfm", "PF\n1 1\n-1.0\n" + std::string(12, '\0'));
  EXPECT_THROW(load_depth(dir / "color.pfm"), FormatError);
  testutil::write_bytes(dir / "garbage.png", "this is not an image");
  EXPECT_THROW(load_depth(dir / "garbage.png", 1.0), FormatError);
}

TEST(SaveInstanceMap, RoundTripsSmallLabelSet) {
  TempDir dir("inst");
  InstanceMap m(3, 2, std::vector<std::uint32_t>{0, 1, 2, 2, 1, 0});
  save_instance_map(m, dir / "m.png");
  const PngData raw = read_png(dir / "m.png");
  EXPECT_EQ(raw.bit_depth, 16);
  EXPECT_EQ(raw.channels, 1);
  EXPECT_EQ(raw.samples, (std::vector<std::uint16_t>{0, 1, 2, 2, 1, 0}));
  EXPECT_EQ(load_instance_map(dir / "m.png"), m);
}

TEST(SaveInstanceMap, AllZeroMap) {
  TempDir dir("inst");
  save_instance_map(InstanceMap(5, 5), dir / "z.png");
  const PngData raw = read_png(dir / "z.png");
  for (auto s : raw.samples) EXPECT_EQ(s, 0);
}

TEST(SaveInstanceMap, RejectsLabelOverflow) {
  TempDir dir("inst");
  InstanceMap m(300, 300);
  for (std::uint32_t i = 0; i < 70000; ++i) m[i] = i + 1;
  EXPECT_THROW(save_instance_map(m, dir / "big.png"), InvalidArgument);
}

TEST(LoadInstanceMap, RejectsNonContiguousLabels) {
  TempDir dir("inst");
  write_gray16(dir / "gap.png", 2, 2, {0, 1, 3, 3});
  EXPECT_THROW(load_instance_map(dir / "gap.png"), FormatError);
}

TEST(Masks, StrictZeroOr255) {
  TempDir dir("mask");
  BinaryMask m(3, 1, std::vector<std::uint8_t>{1, 0, 1});
  save_mask(m, dir / "m.png");
  EXPECT_EQ(read_png(dir / "m.png").samples, (std::vector<std::uint16_t>{255, 0, 255}));
  EXPECT_EQ(load_mask(dir / "m.png"), m);

  write_png(dir / "bad.png", PngData{2, 1, 1, 8, {0, 128}});
  EXPECT_THROW(load_mask(dir / "bad.png"), FormatError);

  write_gray16(dir / "labels.png", 2, 1, {0, 7});
  EXPECT_THROW(load_mask(dir / "labels.png"), FormatError);
  EXPECT_EQ(load_mask_any(dir / "labels.png"), BinaryMask(2, 1, std::vector<std::uint8_t>{0, 1}));
}

TEST(Png, IdenticalInputGivesIdenticalBytes) {
  TempDir dir("png");
  InstanceMap m(16, 16);
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = static_cast<std::uint32_t>(i % 5);
  save_instance_map(m, dir / "a.png");
  save_instance_map(m, dir / "b.png");
  EXPECT_EQ(testutil::read_bytes(dir / "a.png"), testutil::read_bytes(dir / "b.png"));
}

TEST(Rgb, RoundTripAndGrayExpansion) {
  TempDir dir("rgb");
  RgbImage img(2, 1, {1, 2, 3, 4, 5, 6});
  save_rgb(img, dir / "c.png");
  EXPECT_EQ(load_rgb(dir / "c.png"), img);
  write_png(dir / "g.png", PngData{1, 1, 1, 8, {9}});
  EXPECT_EQ(load_rgb(dir / "g.png"), RgbImage(1, 1, {9, 9, 9}));
}

// Property: save/load is the identity on random depth (PFM), masks and maps.
TEST(RoundTrip, RandomInstances) {
  TempDir dir("prop");
  std::mt19937 rng(1234);
  std::uniform_int_distribution<int> dim(1, 12);
  std::uniform_real_distribution<float> val(0.0f, 1e4f);
  for (int trial = 0; trial < 1000; ++trial) {
    const int w = dim(rng), h = dim(rng);
    const std::size_t n = static_cast<std::size_t>(w) * h;

    std::vector<double> v(n);
    std::vector<std::uint8_t> valid(n);
    BinaryMask mask(w, h);
    Raster<std::uint32_t> raw_labels(w, h);
    for (std::size_t i = 0; i < n; ++i) {
      v[i] = val(rng);
      valid[i] = rng() % 7 != 0;
      mask[i] = rng() % 2;
      raw_labels[i] = rng() % 6;
    }
    const DepthImage depth(w, h, v, valid);
    const InstanceMap labels = compact_labels(raw_labels);

    save_depth_pfm(depth, dir / "d.pfm");
    save_mask(mask, dir / "m.png");
    save_instance_map(labels, dir / "l.png");
    ASSERT_EQ(load_depth(dir / "d.pfm"), depth) << "trial " << trial;
    ASSERT_EQ(load_mask(dir / "m.png"), mask) << "trial " << trial;
    ASSERT_EQ(load_instance_map(dir / "l.png"), labels) << "trial " << trial;
  }
}

// Property: corrupting a valid file never yields silently different data;
// the loader either throws or the result is in contract.
TEST(RoundTrip, FuzzedFilesNeverLoadOutOfContract) {
  TempDir dir("fuzz");
  std::mt19937 rng(99);
  save_depth_pfm(DepthImage(6, 5, std::vector<double>(30, 2.5)), dir / "seed.pfm");
  write_gray16(dir / "seed.png", 6, 5, std::vector<std::uint16_t>(30, 4000));
  for (const char* name : {"seed.pfm", "seed.png"}) {
    const std::string original = testutil::read_bytes(dir / name);
    for (int trial = 0; trial < 300; ++trial) {
      std::string bytes = original;
      const int flips = 1 + static_cast<int>(rng() % 4);
      for (int f = 0; f < flips; ++f) bytes[rng() % bytes.size()] = static_cast<char>(rng());
      if (rng() % 5 == 0) bytes.resize(rng() % bytes.size());
      testutil::write_bytes(dir / "fuzz.bin", bytes);
      try {
        const DepthImage d = load_depth(dir / "fuzz.bin", 1.0);
        for (std::size_t i = 0; i < d.size(); ++i) {
          if (d.valid(i)) {
            ASSERT_TRUE(std::isfinite(d.value(i)));
            ASSERT_GE(d.value(i), 0.0);
          }
        }
      } catch (const Error&) {
        // rejected: fine
      }
    }
  }
}

TEST(Manifest, LoadsAndResolvesRelativePaths) {
  TempDir dir("manifest");
  testutil::write_bytes(dir / "m.jsonl",
                        "{\"id\":\"a\",\"depth\":\"a.pfm\",\"gt\":\"a_gt.png\"}\n"
                        "\n"
                        "{\"id\":\"b\",\"depth\":\"/abs/b.pfm\",\"rgb\":null}\n");
  const auto m = load_manifest(dir / "m.jsonl");
  ASSERT_EQ(m.entries.size(), 2u);
  EXPECT_EQ(m.entries[0].id, "a");
  EXPECT_EQ(*m.entries[0].depth, dir / "a.pfm");
  EXPECT_EQ(*m.entries[0].gt, dir / "a_gt.png");
  EXPECT_FALSE(m.entries[0].rgb);
  EXPECT_EQ(*m.entries[1].depth, fs::path("/abs/b.pfm"));
  EXPECT_FALSE(m.entries[1].rgb);
  EXPECT_NE(m.find("b"), nullptr);
  EXPECT_EQ(m.find("zzz"), nullptr);
}

TEST(Manifest, GtOnlyEntryIsAccepted) {
  TempDir dir("manifest");
  testutil::write_bytes(dir / "m.jsonl", "{\"id\":\"eval\",\"gt\":\"x.png\"}\n");
  const auto m = load_manifest(dir / "m.jsonl");
  ASSERT_EQ(m.entries.size(), 1u);
  EXPECT_FALSE(m.entries[0].depth);
}

std::string manifest_error(const TempDir& dir, const std::string& text) {
  testutil::write_bytes(dir / "m.jsonl", text);
  try {
    load_manifest(dir / "m.jsonl");
  } catch (const FormatError& e) {
    return e.what();
  }
  return "";
}

TEST(Manifest, Errors) {
  TempDir dir("manifest");
  const auto dup = manifest_error(dir, "{\"id\":\"a\",\"gt\":\"1\"}\n{\"id\":\"a\",\"gt\":\"2\"}\n");
  EXPECT_NE(dup.find("duplicate id \"a\""), std::string::npos) << dup;
  EXPECT_NE(dup.find(":2:"), std::string::npos) << dup;

  const auto bad = manifest_error(dir, "{\"id\":\"a\",\"gt\":\"1\"}\n{\"id\": oops}\n");
  EXPECT_NE(bad.find(":2:"), std::string::npos) << bad;

  const auto nopaths = manifest_error(dir, "{\"id\":\"a\"}\n");
  EXPECT_NE(nopaths.find("no paths"), std::string::npos) << nopaths;

  const auto typo = manifest_error(dir, "{\"id\":\"a\",\"dpeth\":\"x\"}\n");
  EXPECT_NE(typo.find("dpeth"), std::string::npos) << typo;
}

TEST(Manifest, SaveThenLoad) {
  TempDir dir("manifest");
  DatasetManifest m;
  m.entries.push_back({"s0", std::nullopt, fs::path("s0.pfm"), fs::path("s0.png")});
  save_manifest(m, dir / "m.jsonl");
  EXPECT_EQ(testutil::read_bytes(dir / "m.jsonl"),
            "{\"id\":\"s0\",\"depth\":\"s0.pfm\",\"gt\":\"s0.png\"}\n");
  const auto back = load_manifest(dir / "m.jsonl");
  EXPECT_EQ(*back.entries[0].depth, dir / "s0.pfm");
}

}  // namespace
}  // namespace orifice::imagio
