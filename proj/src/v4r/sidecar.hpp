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

#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "v4r/config.hpp"
#include "v4r/mask.hpp"
#include "v4r/metrics.hpp"

namespace v4r
{

struct SegmentResult
{
  Mask mask;
  double score = 0.0;
  std::string model_id;
};

/// HTTP client for the model sidecar (GET /health, POST /segment,
/// POST /embed). One connection per request, so a client may be shared
/// across threads. Transport failures and 5xx responses are retried.
class SidecarClient
{
public:
  SidecarClient(std::string base_url, SidecarOptions options = {});

  const std::string & base_url() const noexcept { return base_url_; }

  /// GET /health once; later calls return the cached mode list.
  const std::vector<std::string> & ensure_healthy();

  SegmentResult segment(
    const std::filesystem::path & image, const std::string & prompt, int width, int height);

  /// Rows in request order. space is one of the modes reported by /health.
  EmbeddingSet embed(const std::vector<std::filesystem::path> & images, const std::string & space);

private:
  nlohmann::ordered_json request(const std::string & method, const std::string & path,
                                 const nlohmann::ordered_json * body);

  std::string base_url_;
  std::string scheme_host_port_;
  std::string path_prefix_;
  SidecarOptions options_;
  std::mutex mutex_;
  std::optional<std::vector<std::string>> modes_;
};

/// Chooses, per metric, the matching neural space when the sidecar offers
/// it and "stub" otherwise.
EmbedFn sidecar_embedder(SidecarClient & client);

}  // namespace v4r
