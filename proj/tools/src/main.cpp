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

// orifice: command-line front end for depth-driven orifice segmentation.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "orifice/cli/commands.hpp"

namespace cli = orifice::cli;

int main(int argc, char** argv) {
  CLI::App app{"Depth-driven airway orifice instance segmentation"};
  app.require_subcommand(1);

  std::string config_path;
  auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON file overriding pipeline defaults")
        ->check(CLI::ExistingFile);
  };

  cli::SegmentOptions seg;
  std::string seg_manifest, seg_out;
  auto* segment = app.add_subcommand("segment", "Run the pipeline over a manifest");
  segment->add_option("--manifest", seg_manifest, "JSON-lines manifest")->required();
  segment->add_option("--out", seg_out, "Output directory")->required();
  segment->add_option("--threads", seg.threads, "Frame-level worker threads")
      ->check(CLI::PositiveNumber);
  segment->add_option("--scale", seg.scale, "Multiplier for 16-bit PNG depth values")
      ->check(CLI::PositiveNumber);
  add_config(segment);

  cli::EvalOptions ev;
  std::string ev_manifest, ev_pred, ev_out, ev_res;
  auto* eval = app.add_subcommand("eval", "Score predicted masks against ground truth");
  eval->add_option("--manifest", ev_manifest, "Manifest with gt paths")->required();
  eval->add_option("--pred", ev_pred, "Directory of predicted masks named by sample id")
      ->required();
  eval->add_option("--out", ev_out, "CSV report path (default <pred>/eval_report.csv)");
  eval->add_option("--eval-resolution", ev_res, "Resample masks first, e.g. 128 or 160x120");
  add_config(eval);

  cli::BenchOptions bench_opt;
  auto* bench = app.add_subcommand("bench", "Time the pipeline on synthetic frames");
  bench->add_option("--resolution", bench_opt.resolution, "Square frame size")
      ->check(CLI::Range(8, 16384));
  bench->add_option("--frames", bench_opt.frames, "Number of frames")->check(CLI::PositiveNumber);
  bench->add_option("--seed", bench_opt.seed, "Scene seed");
  bench->add_option("--k", bench_opt.orifices, "Orifices per frame")->check(CLI::NonNegativeNumber);
  bench->add_option("--noise", bench_opt.noise_sigma, "Depth noise sigma")
      ->check(CLI::NonNegativeNumber);
  add_config(bench);

  cli::SynthOptions syn;
  std::string syn_out;
  auto* synth = app.add_subcommand("synth", "Write synthetic depth scenes with ground truth");
  synth->add_option("--k", syn.orifices, "Orifices per scene")->check(CLI::NonNegativeNumber);
  synth->add_option("--scenes", syn.scenes, "Number of scenes")->check(CLI::NonNegativeNumber);
  synth->add_option("--resolution", syn.resolution, "Square frame size")
      ->check(CLI::Range(1, 16384));
  synth->add_option("--seed", syn.seed, "Base seed; scene i uses seed + i");
  synth->add_option("--noise", syn.noise_sigma, "Depth noise sigma")
      ->check(CLI::NonNegativeNumber);
  synth->add_option("--out", syn_out, "Output directory")->required();
  add_config(synth);

  cli::OverlayOptions ov;
  std::string ov_base, ov_inst, ov_out;
  auto* overlay = app.add_subcommand("overlay", "Draw instance contours over an image");
  overlay->add_option("--base", ov_base, "RGB/gray PNG, 16-bit depth PNG or PFM")
      ->required()->check(CLI::ExistingFile);
  overlay->add_option("--instances", ov_inst, "16-bit instance map PNG")
      ->required()->check(CLI::ExistingFile);
  overlay->add_option("--out", ov_out, "Output RGB PNG")->required();
  overlay->add_option("--scale", ov.scale, "Multiplier for 16-bit PNG depth values")
      ->check(CLI::PositiveNumber);
  add_config(overlay);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kExitSuccess : cli::kExitFailure;
  }

  try {
    orifice::depthseg::PipelineConfig config;
    if (!config_path.empty()) config = cli::load_config(config_path);

    if (*segment) {
      seg.manifest = seg_manifest;
      seg.out_dir = seg_out;
      seg.config = config;
      return cli::cmd_segment(seg, std::cout, std::cerr).exit_code;
    }
    if (*eval) {
      ev.manifest = ev_manifest;
      ev.pred_dir = ev_pred;
      if (!ev_out.empty()) ev.csv_path = ev_out;
      if (!ev_res.empty()) ev.eval_resolution = cli::parse_resolution(ev_res);
      return cli::cmd_eval(ev, std::cout, std::cerr).exit_code;
    }
    if (*bench) {
      bench_opt.config = config;
      cli::cmd_bench(bench_opt, std::cout);
      return cli::kExitSuccess;
    }
    if (*synth) {
      syn.out_dir = syn_out;
      cli::cmd_synth(syn, std::cout);
      return cli::kExitSuccess;
    }
    if (*overlay) {
      ov.base = ov_base;
      ov.instances = ov_inst;
      ov.out = ov_out;
      cli::cmd_overlay(ov);
      return cli::kExitSuccess;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kExitFailure;
  }
  return cli::kExitFailure;
}
