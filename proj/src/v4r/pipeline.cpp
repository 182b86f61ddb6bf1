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
#include "v4r/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <iostream>
#include <memory>
#include <mutex>
#include <thread>
#include <unordered_map>

#include "v4r/scene.hpp"
#include "v4r/sidecar.hpp"

namespace v4r
{

namespace fs = std::filesystem;

LogFn stderr_logger()
{
  auto mutex = std::make_shared<std::mutex>();
  return [mutex](const std::string & line) {
    std::lock_guard lock(*mutex);
    std::cerr << line << '\n';
  };
}

namespace
{

void reject(SceneSummary & s, const std::string & reason)
{
  ++s.rejected;
  ++s.reject_reasons[reason];
}

std::unique_ptr<SidecarClient> make_segmenter(const RunConfig & cfg)
{
  if (!cfg.uses_sidecar()) return nullptr;
  return std::make_unique<SidecarClient>(cfg.segmenter, cfg.sidecar);
}

}  // namespace

std::vector<TripletRecord> build_scene(
  const RunConfig & cfg, const fs::path & scene_dir, TripletStore & store, SceneSummary & summary)
{
  const SceneSequence scene = load_scene(scene_dir);
  summary.scene_id = scene.scene_id;
  const SeparationResult sep = separate_frames(scene, cfg.mog, cfg.delta);
  summary.foreground_frames = sep.foreground.size();
  summary.background_frames = sep.background.size();

  std::unordered_map<long, const SceneFrame *> by_index;
  for (const auto & f : scene.frames) by_index.emplace(f.index, &f);

  std::vector<BackgroundFrame> backgrounds;
  std::unordered_map<long, double> bg_ratio;
  backgrounds.reserve(sep.background.size());
  for (const auto & b : sep.background) {
    backgrounds.push_back({b.index, load_image(by_index.at(b.index)->path)});
    bg_ratio.emplace(b.index, b.fg_ratio);
  }

  const auto segmenter = make_segmenter(cfg);
  if (segmenter) segmenter->ensure_healthy();

  std::vector<TripletRecord> records;
  for (const auto & fg : sep.foreground) {
    const SceneFrame & src = *by_index.at(fg.index);
    const Frame x = load_image(src.path);

    Mask mask;
    if (segmenter) {
      mask = segmenter->segment(src.path, scene.prompt, x.width(), x.height()).mask;
      if (mask.empty_foreground()) {
        reject(summary, "empty_mask");
        continue;
      }
    } else {
      try {
        mask = mog_mask_cleanup(fg.map, cfg.cleanup);
      } catch (const Error & e) {
        if (e.code() != ErrorCode::EmptyMask) throw;
        reject(summary, "empty_mask");
        continue;
      }
    }

    if (backgrounds.empty()) {
      reject(summary, "no_background");
      continue;
    }
    PairedCandidate pair;
    try {
      pair = pair_frames(x, fg.index, backgrounds, cfg.pairing_mode, cfg.pairing_window);
    } catch (const Error & e) {
      if (e.code() != ErrorCode::EmptyCandidates) throw;
      reject(summary, "no_background");
      continue;
    }

    QualityScores scores;
    scores.mask_area_px = mask.count();
    scores.frame_area_px = mask.size();
    if (scores.mask_area_px < 9) {
      reject(summary, to_string(RejectReason::TinyMask));
      continue;
    }
    scores.blur_score = blur_score(to_gray(x), mask);
    if (const auto why = quality_gate(scores, cfg.gate)) {
      reject(summary, to_string(*why));
      continue;
    }

    TripletRecord rec;
    rec.record_id = make_record_id(scene.scene_id, fg.index, pair.bg_index);
    rec.scene_id = scene.scene_id;
    rec.fg_ratio = fg.fg_ratio;
    rec.gt_fg_ratio = bg_ratio.at(pair.bg_index);
    rec.pair_mse = pair.pair_mse;
    rec.temporal_gap = pair.temporal_gap;
    rec.blur_score = scores.blur_score;
    rec.mask_area_px = static_cast<long>(scores.mask_area_px);
    rec.pairing_mode = to_string(cfg.pairing_mode);
    rec.source_fg_index = fg.index;
    rec.source_bg_index = pair.bg_index;

    Mask emitted = mask;
    if (cfg.aug_enabled) {
      AugmentedMask aug = augment_mask(mask, record_seed(cfg.global_seed, rec.record_id), cfg.aug);
      rec.augmentation = aug.kind;
      rec.aug_radius = aug.radius;
      emitted = std::move(aug.mask);
    }

    const Frame * gt = nullptr;
    for (const auto & b : backgrounds) {
      if (b.index == pair.bg_index) gt = &b.frame;
    }
    records.push_back(store.emit(x, emitted, *gt, std::move(rec)));
    ++summary.accepted;
  }
  return records;
}

BuildSummary build_dataset(
  const RunConfig & cfg, const fs::path & scenes_dir, const fs::path & out_dir, const LogFn & log)
{
  cfg.validate();
  const std::vector<fs::path> scene_dirs = discover_scenes(scenes_dir);
  if (scene_dirs.empty()) {
    throw Error(ErrorCode::NoScenes, "no scene directories in " + scenes_dir.string());
  }
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + out_dir.string() + ": " + ec.message());

  TripletStore store(out_dir);
  BuildSummary summary;
  summary.scenes.resize(scene_dirs.size());
  std::vector<std::vector<TripletRecord>> per_scene(scene_dirs.size());

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers =
    std::min<std::size_t>(scene_dirs.size(), cfg.threads ? static_cast<std::size_t>(*cfg.threads) : hw);

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < scene_dirs.size(); i = next++) {
      SceneSummary & s = summary.scenes[i];
      s.scene_id = scene_dirs[i].filename().string();
      try {
        per_scene[i] = build_scene(cfg, scene_dirs[i], store, s);
      } catch (const std::exception & e) {
        s.error = e.what();
        per_scene[i].clear();
        log("scene " + s.scene_id + " failed: " + e.what());
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(work);
  }

  std::vector<TripletRecord> records;
  for (auto & recs : per_scene) {
    for (auto & r : recs) records.push_back(std::move(r));
  }
  std::stable_sort(records.begin(), records.end(), [](const TripletRecord & a, const TripletRecord & b) {
    if (a.scene_id != b.scene_id) return a.scene_id < b.scene_id;
    return a.source_fg_index < b.source_fg_index;
  });

  ManifestHeader header;
  header.config_digest = config_digest(cfg);
  header.delta = cfg.delta;
  header.pairing_mode = to_string(cfg.pairing_mode);
  header.global_seed = cfg.global_seed;
  header.config = config_to_json(cfg);
  summary.manifest = out_dir / "manifest.jsonl";
  write_manifest(summary.manifest, header, records);
  summary.emitted = records.size();
  return summary;
}

AugmentedMask apply_augment_mode(const Mask & mask, const std::string & mode, const AugConfig & cfg)
{
  const auto colon = mode.find(':');
  const std::string kind = mode.substr(0, colon);
  const std::string arg = colon == std::string::npos ? std::string() : mode.substr(colon + 1);
  auto parse_number = [&](const char * what) -> unsigned long long {
    if (arg.empty() || !std::all_of(arg.begin(), arg.end(), [](unsigned char c) { return std::isdigit(c); })) {
      throw Error(ErrorCode::InvalidArgument, "augment mode " + kind + " needs a numeric " + what);
    }
    try {
      return std::stoull(arg);
    } catch (const std::exception &) {
      throw Error(ErrorCode::InvalidArgument, "augment mode " + kind + ": " + what + " out of range");
    }
  };
  auto parse_radius = [&]() {
    const auto r = parse_number("radius");
    if (r < 1 || r > 100000) throw Error(ErrorCode::InvalidArgument, "augment radius must be >= 1");
    return static_cast<int>(r);
  };

  if (mask.empty_foreground()) throw Error(ErrorCode::EmptyMask, "augment: empty input mask");
  if (kind == "none" && colon == std::string::npos) return {mask, AugmentKind::None, std::nullopt};
  if (kind == "box" && colon == std::string::npos) return {tight_box(mask), AugmentKind::Box, std::nullopt};
  if (kind == "dilate") {
    const int r = parse_radius();
    return {dilate(mask, r), AugmentKind::Dilate, r};
  }
  if (kind == "erode") {
    const int r = parse_radius();
    Mask out = erode(mask, r);
    if (out.empty_foreground()) throw Error(ErrorCode::EmptyMask, "augment: erosion emptied the mask");
    return {std::move(out), AugmentKind::Erode, r};
  }
  if (kind == "random") return augment_mask(mask, parse_number("seed"), cfg);
  throw Error(ErrorCode::InvalidArgument, "unknown augment mode \"" + mode + "\"");
}

MetricReport run_evaluation(
  const fs::path & pred_dir, const fs::path & gt_dir, const std::optional<fs::path> & mask_dir,
  const std::string & embedder, const SidecarOptions & sidecar)
{
  EvalOptions opt;
  opt.pred_dir = pred_dir;
  opt.gt_dir = gt_dir;
  opt.mask_dir = mask_dir;
  opt.embedder_id = embedder;
  std::unique_ptr<SidecarClient> client;
  if (embedder.rfind("sidecar:", 0) == 0) {
    client = std::make_unique<SidecarClient>(embedder.substr(8), sidecar);
    client->ensure_healthy();
    opt.embed = sidecar_embedder(*client);
  } else if (embedder != "builtin") {
    throw Error(ErrorCode::InvalidArgument, "embedder must be \"builtin\" or \"sidecar:URL\"");
  }
  return evaluate(opt);
}

}  // namespace v4r
