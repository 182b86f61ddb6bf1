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
#include "v4r/scene.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <regex>

#include <json.hpp>

namespace v4r
{

namespace fs = std::filesystem;

void SceneSequence::validate() const
{
  if (frames.size() < 2) {
    throw Error(ErrorCode::TooFewFrames, "scene " + scene_id + ": needs at least 2 frames");
  }
  for (std::size_t i = 1; i < frames.size(); ++i) {
    if (frames[i].index <= frames[i - 1].index) {
      throw Error(ErrorCode::InvalidArgument, "scene " + scene_id + ": frame indices must increase");
    }
  }
}

SceneSequence load_scene(const fs::path & dir)
{
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw Error(ErrorCode::Io, "not a directory: " + dir.string());

  SceneSequence scene;
  scene.scene_id = dir.filename().string();
  static const std::regex kFramePattern(R"(frame_(\d{6,})\.png)");
  std::vector<std::pair<std::string, fs::path>> names;
  for (const auto & entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (std::regex_match(name, kFramePattern)) names.emplace_back(name, entry.path());
  }
  std::sort(names.begin(), names.end());
  for (const auto & [name, path] : names) {
    std::smatch m;
    std::regex_match(name, m, kFramePattern);
    scene.frames.push_back({std::stol(m[1].str()), path});
  }

  const fs::path meta = dir / "scene.json";
  if (fs::exists(meta)) {
    std::ifstream in(meta);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception & e) {
      throw Error(ErrorCode::Parse, meta.string() + ": " + e.what());
    }
    if (j.contains("fps_hint") && j["fps_hint"].is_number()) {
      scene.fps_hint = j["fps_hint"].get<double>();
    }
    if (j.contains("prompt") && j["prompt"].is_string()) {
      scene.prompt = j["prompt"].get<std::string>();
    }
  }
  return scene;
}

std::vector<fs::path> discover_scenes(const fs::path & scenes_dir)
{
  std::error_code ec;
  if (!fs::is_directory(scenes_dir, ec)) {
    throw Error(ErrorCode::NoScenes, "scenes directory not found: " + scenes_dir.string());
  }
  std::vector<fs::path> out;
  for (const auto & entry : fs::directory_iterator(scenes_dir)) {
    if (entry.is_directory()) out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

SeparationResult separate_sequence(
  std::span<const long> indices, const std::function<GrayFrame(std::size_t)> & load_gray,
  const MogParams & params, double delta)
{
  params.validate();
  const std::size_t needed = static_cast<std::size_t>(params.warmup_frames) + 2;
  if (indices.size() < needed) {
    throw Error(
      ErrorCode::TooFewFrames, "separate_frames: " + std::to_string(indices.size()) +
                                 " frames, need at least " + std::to_string(needed));
  }
  SeparationResult result;
  std::optional<BackgroundModel> model;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const GrayFrame gray = load_gray(i);
    if (!model) model.emplace(gray.width(), gray.height(), params);
    SegmentationMap map = model->update(gray);
    if (!model->warmed_up()) continue;
    const double ratio = foreground_ratio(map);
    if (classify_frame(ratio, delta) == FrameClass::Foreground) {
      result.foreground.push_back({indices[i], ratio, std::move(map)});
    } else {
      result.background.push_back({indices[i], ratio});
    }
  }
  return result;
}

SeparationResult separate_frames(const SceneSequence & scene, const MogParams & params, double delta)
{
  scene.validate();
  std::vector<long> indices;
  indices.reserve(scene.frames.size());
  for (const auto & f : scene.frames) indices.push_back(f.index);
  return separate_sequence(
    indices, [&](std::size_t i) { return to_gray(load_image(scene.frames[i].path)); }, params,
    delta);
}

const char * to_string(PairingMode mode) noexcept
{
  return mode == PairingMode::MinMse ? "min_mse" : "temporal_closest";
}

std::optional<PairingMode> parse_pairing_mode(const std::string & name)
{
  if (name == "min_mse") return PairingMode::MinMse;
  if (name == "temporal_closest") return PairingMode::TemporalClosest;
  return std::nullopt;
}

PairedCandidate pair_frames(
  const Frame & fg, long fg_index, std::span<const BackgroundFrame> backgrounds, PairingMode mode,
  std::optional<long> window)
{
  constexpr double kTie = 1e-9;
  std::optional<PairedCandidate> best;
  for (const auto & bg : backgrounds) {
    if (!bg.frame.same_shape(fg)) {
      throw Error(ErrorCode::DimensionMismatch, "pair_frames: background frame size differs");
    }
    if (bg.index == fg_index) continue;
    const long gap = std::labs(bg.index - fg_index);
    if (window && gap > *window) continue;

    PairedCandidate cand{fg_index, bg.index, 0.0, gap};
    if (mode == PairingMode::MinMse) {
      cand.pair_mse = frame_mse(fg, bg.frame);
      if (!best) {
        best = cand;
        continue;
      }
      const double d = cand.pair_mse - best->pair_mse;
      if (d < -kTie) {
        best = cand;
      } else if (std::abs(d) < kTie) {
        if (gap < best->temporal_gap || (gap == best->temporal_gap && bg.index < best->bg_index)) {
          best = cand;
        }
      }
    } else {
      if (!best || gap < best->temporal_gap ||
          (gap == best->temporal_gap && bg.index < best->bg_index)) {
        best = cand;
      }
    }
  }
  if (!best) throw Error(ErrorCode::EmptyCandidates, "pair_frames: no background candidates");
  if (mode == PairingMode::TemporalClosest) {
    for (const auto & bg : backgrounds) {
      if (bg.index == best->bg_index) {
        best->pair_mse = frame_mse(fg, bg.frame);
        break;
      }
    }
  }
  return *best;
}

double blur_score(const GrayFrame & frame, const Mask & mask)
{
  if (!mask.same_shape(frame.width(), frame.height())) {
    throw Error(ErrorCode::DimensionMismatch, "blur_score: mask and frame sizes differ");
  }
  const std::size_t n = mask.count();
  if (n < 9) throw Error(ErrorCode::MaskTooSmall, "blur_score: mask needs at least 9 pixels");

  const int w = frame.width();
  const int h = frame.height();
  auto sample = [&](int r, int c) -> long {
    if (r < 0 || r >= h || c < 0 || c >= w) return 0;
    return frame.at(r, c);
  };
  // Integer Laplacian values; exact sums keep the variance order-independent.
  long long sum = 0;
  long long sum_sq = 0;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (!mask.at(r, c)) continue;
      const long lap = sample(r - 1, c) + sample(r + 1, c) + sample(r, c - 1) + sample(r, c + 1) -
                       4 * sample(r, c);
      sum += lap;
      sum_sq += static_cast<long long>(lap) * lap;
    }
  }
  const auto nn = static_cast<__int128>(n);
  const __int128 numer = nn * sum_sq - static_cast<__int128>(sum) * sum;
  return static_cast<double>(numer) / (static_cast<double>(n) * static_cast<double>(n));
}

const char * to_string(RejectReason reason) noexcept
{
  switch (reason) {
    case RejectReason::Blurred: return "blurred";
    case RejectReason::TinyMask: return "tiny_mask";
    case RejectReason::Oversized: return "oversized";
  }
  return "unknown";
}

std::optional<RejectReason> quality_gate(const QualityScores & scores, const GateConfig & cfg)
{
  if (scores.blur_score < cfg.min_blur) return RejectReason::Blurred;
  if (static_cast<long>(scores.mask_area_px) < cfg.min_area_px) return RejectReason::TinyMask;
  if (scores.frame_area_px > 0 &&
      static_cast<double>(scores.mask_area_px) / static_cast<double>(scores.frame_area_px) >
        cfg.max_fg_ratio) {
    return RejectReason::Oversized;
  }
  return std::nullopt;
}

}  // namespace v4r
