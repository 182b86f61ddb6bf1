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
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "v4r/imaging.hpp"
#include "v4r/mask.hpp"

namespace v4r
{

using ojson = nlohmann::ordered_json;

/// One (input, mask, ground truth) sample. File paths are relative to the
/// dataset root, i.e. the directory holding the manifest.
struct TripletRecord
{
  std::string record_id;
  std::string scene_id;
  std::string input_frame;
  std::string gt_frame;
  std::string mask;
  double fg_ratio = 0.0;
  double gt_fg_ratio = 0.0;
  double pair_mse = 0.0;
  long temporal_gap = 0;
  double blur_score = 0.0;
  long mask_area_px = 0;
  AugmentKind augmentation = AugmentKind::None;
  std::optional<int> aug_radius;
  std::string pairing_mode;
  long source_fg_index = 0;
  long source_bg_index = 0;

  friend bool operator==(const TripletRecord &, const TripletRecord &) = default;
};

ojson to_json(const TripletRecord & record);
TripletRecord record_from_json(const ojson & j);

/// First 16 hex digits of a stable hash of (scene_id, fg_index, bg_index).
std::string make_record_id(const std::string & scene_id, long fg_index, long bg_index);

/// Per-record augmentation seed; independent of processing order.
std::uint64_t record_seed(std::uint64_t global_seed, const std::string & record_id);

struct GuidancePair
{
  Frame object_image;
  Frame background_image;
  Mask mask;
};

GuidancePair decompose_object_background(const Frame & x, const Mask & m);

/// Checks the partition identity and disjoint supports against the source
/// frame. Returns an empty string on success, else what failed.
std::string check_guidance(const GuidancePair & pair, const Frame & source);

/// Writes triplet directories under a dataset root. Thread-safe; rejects
/// duplicate record ids within one store instance.
class TripletStore
{
public:
  explicit TripletStore(std::filesystem::path root);

  const std::filesystem::path & root() const noexcept { return root_; }

  /// Writes <root>/<scene_id>/<record_id>/{input,gt,mask}.png and fills in
  /// the record's file paths.
  TripletRecord emit(const Frame & x, const Mask & m, const Frame & x_hat, TripletRecord meta);

private:
  std::filesystem::path root_;
  std::mutex mutex_;
  std::set<std::string> ids_;
};

struct ManifestHeader
{
  int version = 1;
  std::string config_digest;
  double delta = 0.15;
  std::string pairing_mode = "min_mse";
  std::uint64_t global_seed = 0;
  ojson config = ojson::object();

  friend bool operator==(const ManifestHeader &, const ManifestHeader &) = default;
};

struct Manifest
{
  ManifestHeader header;
  std::vector<TripletRecord> records;
};

/// JSON Lines: header object first, then one record per line.
void write_manifest(
  const std::filesystem::path & path, const ManifestHeader & header,
  const std::vector<TripletRecord> & records);
Manifest read_manifest(const std::filesystem::path & path);

struct StatsReport
{
  std::size_t count = 0;
  std::map<std::string, std::size_t> per_scene;
  std::vector<std::size_t> fg_ratio_histogram;  // 20 bins over [0,1]; empty when count == 0
  std::optional<long> mask_area_p10;
  std::optional<long> mask_area_p50;
  std::optional<long> mask_area_p90;
  std::map<std::string, std::size_t> augmentation_counts;
  std::optional<double> mean_pair_mse;
};

/// Nearest-rank quantile of an ascending-sorted sample.
long nearest_rank(const std::vector<long> & sorted, double q);

StatsReport compute_stats(const std::vector<TripletRecord> & records);
StatsReport dataset_stats(const std::filesystem::path & manifest_path);
ojson to_json(const StatsReport & report);

struct ValidationResult
{
  bool ok = true;
  std::size_t checked = 0;
  std::string failing_record;
  std::string message;
};

/// Re-checks every record: files exist and decode, sizes agree, masks are
/// binary on disk, and the object/background decomposition is exact.
ValidationResult validate_manifest(const std::filesystem::path & manifest_path);

}  // namespace v4r
