// Copyright 2026 The v4r Authors
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
// Command-line front end. Talks to the library only through the C API.

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "v4r/v4r.h"

namespace
{

int report_failure(v4r_status st, const std::string & context)
{
  std::cerr << "v4r " << context << ": " << v4r_status_name(st) << ": " << v4r_last_error() << '\n';
  return 1;
}

std::string take_string(char * s)
{
  std::string out = s ? s : "";
  v4r_string_free(s);
  return out;
}

struct BuildArgs
{
  std::string scenes_dir;
  std::string out_dir;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::string pairing_mode;
  std::string segmenter;
};

int run_build(const BuildArgs & a)
{
  v4r_config * cfg = nullptr;
  v4r_status st = v4r_config_create(&cfg);
  if (st != V4R_OK) return report_failure(st, "build");
  auto config_step = [&](v4r_status s) {
    if (s == V4R_OK) return true;
    report_failure(s, "build (config)");
    return false;
  };
  bool ok = true;
  if (ok && !a.config_path.empty()) ok = config_step(v4r_config_load(cfg, a.config_path.c_str()));
  if (ok && a.seed) ok = config_step(v4r_config_set_seed(cfg, *a.seed));
  if (ok && a.threads) ok = config_step(v4r_config_set_threads(cfg, *a.threads));
  if (ok && !a.pairing_mode.empty()) ok = config_step(v4r_config_set_pairing_mode(cfg, a.pairing_mode.c_str()));
  if (ok && !a.segmenter.empty()) ok = config_step(v4r_config_set_segmenter(cfg, a.segmenter.c_str()));
  if (!ok) {
    v4r_config_free(cfg);
    return 1;
  }

  v4r_build_summary * summary = nullptr;
  st = v4r_build(cfg, a.scenes_dir.c_str(), a.out_dir.c_str(), &summary);
  v4r_config_free(cfg);
  if (st == V4R_ERR_NO_SCENES) {
    std::cerr << "v4r build: " << v4r_last_error() << '\n';
    return 2;
  }
  if (st != V4R_OK) return report_failure(st, "build");

  const std::size_t scenes = v4r_build_summary_scene_count(summary);
  for (std::size_t i = 0; i < scenes; ++i) {
    v4r_scene_counts c{};
    v4r_build_summary_scene(summary, i, &c);
    char * reasons = nullptr;
    v4r_build_summary_reject_reasons(summary, i, &reasons);
    std::cout << "scene " << c.scene_id << ": foreground=" << c.foreground_frames
              << " background=" << c.background_frames << " accepted=" << c.accepted
              << " rejected=" << c.rejected << " reasons=" << take_string(reasons);
    if (*c.error) std::cout << " error=\"" << c.error << '"';
    std::cout << '\n';
  }
  const std::size_t emitted = v4r_build_summary_emitted(summary);
  std::cout << "emitted " << emitted << " triplets -> " << v4r_build_summary_manifest(summary) << '\n';
  v4r_build_summary_free(summary);
  return emitted > 0 ? 0 : 3;
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"v4r: object-removal triplet construction and evaluation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(v4r_version()));

  BuildArgs build;
  auto * cmd_build = app.add_subcommand("build", "Construct triplets from scene frame directories");
  cmd_build->add_option("scenes_dir", build.scenes_dir, "Directory of <scene_id>/frame_NNNNNN.png")->required();
  cmd_build->add_option("out_dir", build.out_dir, "Output dataset root")->required();
  cmd_build->add_option("-c,--config", build.config_path, "JSON run configuration");
  cmd_build->add_option("--seed", build.seed, "Global augmentation seed");
  cmd_build->add_option("--threads", build.threads, "Worker threads (scenes in flight)");
  cmd_build->add_option("--pairing-mode", build.pairing_mode, "min_mse | temporal_closest");
  cmd_build->add_option("--segmenter", build.segmenter, "mog | sidecar base URL");

  std::string pred, gt, masks, embedder = "builtin", report;
  auto * cmd_eval = app.add_subcommand("eval", "Score predictions against ground truth");
  cmd_eval->add_option("--pred", pred, "Predicted images")->required();
  cmd_eval->add_option("--gt", gt, "Ground-truth images (same filenames)")->required();
  cmd_eval->add_option("--masks", masks, "Object masks (same filenames)");
  cmd_eval->add_option("--embedder", embedder, "builtin | sidecar:URL");
  cmd_eval->add_option("--report", report, "Write the metric report JSON here");

  std::string mask_in, mode, mask_out;
  auto * cmd_aug = app.add_subcommand("augment", "Perturb an object mask");
  cmd_aug->add_option("--mask", mask_in, "Input mask PNG")->required();
  cmd_aug->add_option("--mode", mode, "none | box | dilate:R | erode:R | random:SEED")->required();
  cmd_aug->add_option("--out", mask_out, "Output mask PNG")->required();

  std::string manifest;
  auto * cmd_stats = app.add_subcommand("stats", "Summarise a manifest");
  cmd_stats->add_option("--manifest", manifest, "manifest.jsonl")->required();
  auto * cmd_validate = app.add_subcommand("validate", "Re-check every record of a manifest");
  cmd_validate->add_option("--manifest", manifest, "manifest.jsonl")->required();

  std::string images, emb_out;
  auto * cmd_embed = app.add_subcommand("embed", "Write built-in embeddings (EMB1) for a directory");
  cmd_embed->add_option("--images", images, "Image directory")->required();
  cmd_embed->add_option("--out", emb_out, "Output .emb file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  if (cmd_build->parsed()) return run_build(build);

  if (cmd_eval->parsed()) {
    char * json = nullptr;
    const v4r_status st = v4r_evaluate(
      pred.c_str(), gt.c_str(), masks.empty() ? nullptr : masks.c_str(), embedder.c_str(),
      report.empty() ? nullptr : report.c_str(), &json);
    if (st != V4R_OK) return report_failure(st, "eval");
    std::cout << take_string(json) << '\n';
    return 0;
  }

  if (cmd_aug->parsed()) {
    v4r_mask * in = nullptr;
    v4r_status st = v4r_mask_load(mask_in.c_str(), &in);
    if (st != V4R_OK) return report_failure(st, "augment");
    v4r_mask * out = nullptr;
    const char * kind = nullptr;
    int radius = -1;
    st = v4r_mask_augment(in, mode.c_str(), &out, &kind, &radius);
    v4r_mask_free(in);
    if (st != V4R_OK) return report_failure(st, "augment");
    st = v4r_mask_save(out, mask_out.c_str());
    v4r_mask_free(out);
    if (st != V4R_OK) return report_failure(st, "augment");
    std::cout << "kind=" << kind << " radius=" << (radius < 0 ? std::string("none") : std::to_string(radius))
              << '\n';
    return 0;
  }

  if (cmd_stats->parsed()) {
    char * json = nullptr;
    const v4r_status st = v4r_manifest_stats(manifest.c_str(), &json);
    if (st != V4R_OK) return report_failure(st, "stats");
    std::cout << take_string(json) << '\n';
    return 0;
  }

  if (cmd_validate->parsed()) {
    char * failing = nullptr;
    const v4r_status st = v4r_manifest_validate(manifest.c_str(), &failing);
    if (st == V4R_OK) {
      std::cout << "ok\n";
      return 0;
    }
    const std::string id = take_string(failing);
    std::cerr << "v4r validate: " << v4r_last_error() << '\n';
    if (!id.empty()) std::cout << "failed " << id << '\n';
    return 1;
  }

  if (cmd_embed->parsed()) {
    const v4r_status st = v4r_embed_directory(images.c_str(), emb_out.c_str());
    if (st != V4R_OK) return report_failure(st, "embed");
    return 0;
  }
  return 1;
}
