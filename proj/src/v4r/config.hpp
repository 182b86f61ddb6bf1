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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "v4r/background.hpp"
#include "v4r/mask.hpp"
#include "v4r/scene.hpp"

namespace v4r
{

struct SidecarOptions
{
  double timeout_s = 120.0;
  int retries = 2;

  friend bool operator==(const SidecarOptions &, const SidecarOptions &) = default;
};

/// Every knob of a build run. Threads never reach the manifest.
struct RunConfig
{
  double delta = 0.15;
  MogParams mog;
  PairingMode pairing_mode = PairingMode::MinMse;
  std::optional<long> pairing_window;
  GateConfig gate;
  CleanupConfig cleanup;
  AugConfig aug;
  bool aug_enabled = false;
  std::uint64_t global_seed = 0;
  /// "mog" or the base URL of a segmentation sidecar.
  std::string segmenter = "mog";
  SidecarOptions sidecar;
  std::optional<int> threads;

  /// Defaults, with the segmenter taken from V4R_SIDECAR_URL when set.
  static RunConfig from_environment();

  /// Throws Config on the first violated constraint.
  void validate() const;

  bool uses_sidecar() const noexcept { return segmenter != "mog"; }

  friend bool operator==(const RunConfig &, const RunConfig &) = default;
};

/// Overlays a JSON object onto base. Unknown keys, wrong types and
/// out-of-range values raise ErrorCode::Config.
RunConfig config_from_json(const nlohmann::ordered_json & j, const RunConfig & base);
RunConfig load_config(const std::filesystem::path & path, const RunConfig & base);

/// Full effective configuration, threads excluded.
nlohmann::ordered_json config_to_json(const RunConfig & cfg);

/// 16 hex digits over the canonical config_to_json dump.
std::string config_digest(const RunConfig & cfg);

}  // namespace v4r
