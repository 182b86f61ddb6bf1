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
#include <map>
#include <string>
#include <vector>

#include "v4r/config.hpp"
#include "v4r/dataset.hpp"
#include "v4r/metrics.hpp"

namespace v4r
{

using LogFn = std::function<void(const std::string &)>;

/// Writes to standard error, one line per call, serialised across threads.
LogFn stderr_logger();

struct SceneSummary
{
  std::string scene_id;
  std::size_t foreground_frames = 0;
  std::size_t background_frames = 0;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::map<std::string, std::size_t> reject_reasons;
  /// Non-empty when the scene failed as a whole.
  std::string error;
};

struct BuildSummary
{
  std::vector<SceneSummary> scenes;
  std::size_t emitted = 0;
  std::filesystem::path manifest;
};

/// Separates, masks, pairs, gates, optionally augments and emits every
/// scene under scenes_dir, then writes <out_dir>/manifest.jsonl. A failing
/// scene is logged and skipped. Throws NoScenes when scenes_dir holds no
/// scene directories.
BuildSummary build_dataset(
  const RunConfig & cfg, const std::filesystem::path & scenes_dir,
  const std::filesystem::path & out_dir, const LogFn & log = stderr_logger());

/// Processes a single scene into records (already emitted into store).
std::vector<TripletRecord> build_scene(
  const RunConfig & cfg, const std::filesystem::path & scene_dir, TripletStore & store,
  SceneSummary & summary);

/// Parses "none", "box", "dilate:R", "erode:R" or "random:SEED" and applies it.
AugmentedMask apply_augment_mode(const Mask & mask, const std::string & mode, const AugConfig & cfg = {});

/// embedder is "builtin" or "sidecar:URL".
MetricReport run_evaluation(
  const std::filesystem::path & pred_dir, const std::filesystem::path & gt_dir,
  const std::optional<std::filesystem::path> & mask_dir, const std::string & embedder,
  const SidecarOptions & sidecar = {});

}  // namespace v4r
