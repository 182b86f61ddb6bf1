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
#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "v4r/background.hpp"
#include "v4r/imaging.hpp"
#include "v4r/raster.hpp"

namespace v4r
{

struct SceneFrame
{
  long index;
  std::filesystem::path path;
};

struct SceneSequence
{
  std::string scene_id;
  std::vector<SceneFrame> frames;
  std::optional<double> fps_hint;
  /// Text prompt forwarded to an external segmenter.
  std::string prompt = "object";

  /// Indices strictly increasing, at least two frames.
  void validate() const;
};

/// Reads <dir>/frame_NNNNNN.png in lexicographic order plus an optional
/// scene.json ({"fps_hint": real, "prompt": string}).
SceneSequence load_scene(const std::filesystem::path & dir);

/// Immediate subdirectories of scenes_dir, sorted by name.
std::vector<std::filesystem::path> discover_scenes(const std::filesystem::path & scenes_dir);

struct ForegroundFrame
{
  long index;
  double fg_ratio;
  SegmentationMap map;
};

struct BackgroundFrameInfo
{
  long index;
  double fg_ratio;
};

struct SeparationResult
{
  std::vector<ForegroundFrame> foreground;
  std::vector<BackgroundFrameInfo> background;
};

/// Runs one background model over the frames in order. Warm-up frames are
/// modelled but left out of both classes.
SeparationResult separate_sequence(
  std::span<const long> indices, const std::function<GrayFrame(std::size_t)> & load_gray,
  const MogParams & params, double delta);

SeparationResult separate_frames(const SceneSequence & scene, const MogParams & params, double delta);

enum class PairingMode { MinMse, TemporalClosest };

const char * to_string(PairingMode mode) noexcept;
std::optional<PairingMode> parse_pairing_mode(const std::string & name);

struct BackgroundFrame
{
  long index;
  Frame frame;
};

struct PairedCandidate
{
  long fg_index;
  long bg_index;
  double pair_mse;
  long temporal_gap;
};

/// Picks the ground-truth background for a foreground frame. MinMse ties
/// (|dmse| < 1e-9) go to the temporally closer frame, then the smaller index.
/// With a window, only candidates within that many frames are considered.
PairedCandidate pair_frames(
  const Frame & fg, long fg_index, std::span<const BackgroundFrame> backgrounds,
  PairingMode mode = PairingMode::MinMse, std::optional<long> window = std::nullopt);

/// Variance of the 4-neighbour Laplacian sampled at mask pixels.
double blur_score(const GrayFrame & frame, const Mask & mask);

struct QualityScores
{
  double blur_score = 0.0;
  std::size_t mask_area_px = 0;
  std::size_t frame_area_px = 0;
};

struct GateConfig
{
  double min_blur = 100.0;
  long min_area_px = 256;
  double max_fg_ratio = 0.6;

  friend bool operator==(const GateConfig &, const GateConfig &) = default;
};

enum class RejectReason { Blurred, TinyMask, Oversized };

const char * to_string(RejectReason reason) noexcept;

/// std::nullopt means accept.
std::optional<RejectReason> quality_gate(const QualityScores & scores, const GateConfig & cfg = {});

}  // namespace v4r
