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
#include <vector>

#include <json.hpp>

#include "v4r/raster.hpp"

namespace v4r
{

enum class ComponentKeep { LargestOnly, AllAboveMin };

struct CleanupConfig
{
  int open_radius = 1;
  int min_component_px = 64;
  ComponentKeep keep = ComponentKeep::LargestOnly;
  bool fill_holes = true;

  friend bool operator==(const CleanupConfig &, const CleanupConfig &) = default;
};

enum class AugmentKind { None, Dilate, Erode, Box };

const char * to_string(AugmentKind kind) noexcept;
std::optional<AugmentKind> parse_augment_kind(const std::string & name);

struct AugConfig
{
  int radius_min = 1;
  int radius_max = 9;

  friend bool operator==(const AugConfig &, const AugConfig &) = default;
};

struct AugmentedMask
{
  Mask mask;
  AugmentKind kind = AugmentKind::None;
  std::optional<int> radius;
};

/// Alternating run lengths over row-major order, starting with a zero-run.
struct RleMask
{
  int width = 0;
  int height = 0;
  std::vector<std::uint32_t> runs;

  friend bool operator==(const RleMask &, const RleMask &) = default;
};

/// Sidecar wire form: {"w":int,"h":int,"runs":[int,...]}.
nlohmann::ordered_json rle_to_json(const RleMask & rle);
/// Throws InvalidRle on a malformed object.
RleMask rle_from_json(const nlohmann::ordered_json & j);

/// Square structuring element of side 2r+1.
Mask dilate(const Mask & mask, int radius);
/// Out-of-canvas pixels count as 0.
Mask erode(const Mask & mask, int radius);
Mask tight_box(const Mask & mask);

/// 8-connected component labels (0 = background, 1..n in raster order of
/// first pixel). Returns the label image and per-label pixel counts
/// (index 0 unused).
struct Components
{
  std::vector<std::int32_t> labels;
  std::vector<std::size_t> sizes;
};
Components label_components(const Mask & mask);

/// Sets background regions that are 4-connected and do not reach the canvas
/// border to foreground.
Mask fill_holes(const Mask & mask);

/// Opening, component filtering, and hole filling of a raw MOG map.
Mask mog_mask_cleanup(const SegmentationMap & map, const CleanupConfig & cfg = {});

/// Seeded draw of one of {None, Dilate, Erode, Box} with equal probability.
AugmentedMask augment_mask(const Mask & mask, std::uint64_t seed, const AugConfig & cfg = {});

RleMask rle_encode(const Mask & mask);
Mask rle_decode(const RleMask & rle);

/// |a and b| / |a or b|; 1.0 when both are empty.
double mask_iou(const Mask & a, const Mask & b);

/// Mask PNG I/O: 8-bit, 0/255 on disk. On load any channel-0 value >= 128
/// is foreground.
Mask load_mask(const std::filesystem::path & path);
void save_mask(const Mask & mask, const std::filesystem::path & path);

/// Axis-aligned bounds of the foreground, inclusive.
struct BoundingBox
{
  int row0, col0, row1, col1;
};
std::optional<BoundingBox> bounding_box(const Mask & mask);

}  // namespace v4r
