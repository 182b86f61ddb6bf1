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
#include "v4r/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "v4r/hash.hpp"

namespace v4r
{

namespace fs = std::filesystem;

ojson to_json(const TripletRecord & r)
{
  ojson j;
  j["type"] = "record";
  j["record_id"] = r.record_id;
  j["scene_id"] = r.scene_id;
  j["input_frame"] = r.input_frame;
  j["gt_frame"] = r.gt_frame;
  j["mask"] = r.mask;
  j["fg_ratio"] = r.fg_ratio;
  j["gt_fg_ratio"] = r.gt_fg_ratio;
  j["pair_mse"] = r.pair_mse;
  j["temporal_gap"] = r.temporal_gap;
  j["blur_score"] = r.blur_score;
  j["mask_area_px"] = r.mask_area_px;
  j["augmentation"] = to_string(r.augmentation);
  j["aug_radius"] = r.aug_radius ? ojson(*r.aug_radius) : ojson(nullptr);
  j["pairing_mode"] = r.pairing_mode;
  j["source_fg_index"] = r.source_fg_index;
  j["source_bg_index"] = r.source_bg_index;
  return j;
}

TripletRecord record_from_json(const ojson & j)
{
  if (!j.is_object() || j.value("type", "") != "record") {
    throw Error(ErrorCode::Parse, "expected an object with \"type\":\"record\"");
  }
  TripletRecord r;
  try {
    r.record_id = j.at("record_id").get<std::string>();
    r.scene_id = j.at("scene_id").get<std::string>();
    r.input_frame = j.at("input_frame").get<std::string>();
    r.gt_frame = j.at("gt_frame").get<std::string>();
    r.mask = j.at("mask").get<std::string>();
    r.fg_ratio = j.at("fg_ratio").get<double>();
    r.gt_fg_ratio = j.at("gt_fg_ratio").get<double>();
    r.pair_mse = j.at("pair_mse").get<double>();
    r.temporal_gap = j.at("temporal_gap").get<long>();
    r.blur_score = j.at("blur_score").get<double>();
    r.mask_area_px = j.at("mask_area_px").get<long>();
    const auto kind = parse_augment_kind(j.at("augmentation").get<std::string>());
    if (!kind) throw Error(ErrorCode::Parse, "unknown augmentation kind");
    r.augmentation = *kind;
    if (!j.at("aug_radius").is_null()) r.aug_radius = j.at("aug_radius").get<int>();
    r.pairing_mode = j.at("pairing_mode").get<std::string>();
    r.source_fg_index = j.at("source_fg_index").get<long>();
    r.source_bg_index = j.at("source_bg_index").get<long>();
  } catch (const nlohmann::json::exception & e) {
    throw Error(ErrorCode::Parse, std::string("record field: ") + e.what());
  }
  return r;
}

std::string make_record_id(const std::string & scene_id, long fg_index, long bg_index)
{
  Fnv1a h;
  h.bytes(scene_id).bytes(std::string_view("\0", 1)).i64(fg_index).i64(bg_index);
  return to_hex16(h.digest());
}

std::uint64_t record_seed(std::uint64_t global_seed, const std::string & record_id)
{
  return Fnv1a().u64(global_seed).bytes(record_id).digest();
}

GuidancePair decompose_object_background(const Frame & x, const Mask & m)
{
  if (!m.same_shape(x.width(), x.height())) {
    throw Error(ErrorCode::DimensionMismatch, "decompose_object_background: mask size differs");
  }
  GuidancePair out{Frame(x.width(), x.height()), Frame(x.width(), x.height()), m};
  const auto & src = x.data();
  auto & obj = out.object_image.data();
  auto & bg = out.background_image.data();
  for (std::size_t p = 0; p < m.size(); ++p) {
    auto & dst = m[p] ? obj : bg;
    for (int ch = 0; ch < 3; ++ch) dst[3 * p + ch] = src[3 * p + ch];
  }
  return out;
}

std::string check_guidance(const GuidancePair & pair, const Frame & source)
{
  if (!pair.object_image.same_shape(source) || !pair.background_image.same_shape(source) ||
      !pair.mask.same_shape(source.width(), source.height())) {
    return "guidance pair size differs from source";
  }
  const auto & obj = pair.object_image.data();
  const auto & bg = pair.background_image.data();
  const auto & src = source.data();
  for (std::size_t p = 0; p < pair.mask.size(); ++p) {
    for (int ch = 0; ch < 3; ++ch) {
      const std::size_t i = 3 * p + ch;
      if (pair.mask[p] ? bg[i] != 0 : obj[i] != 0) return "supports overlap at pixel " + std::to_string(p);
      if (static_cast<int>(obj[i]) + bg[i] != src[i]) {
        return "object + background != input at pixel " + std::to_string(p);
      }
    }
  }
  return {};
}

TripletStore::TripletStore(fs::path root) : root_(std::move(root)) {}

TripletRecord TripletStore::emit(
  const Frame & x, const Mask & m, const Frame & x_hat, TripletRecord meta)
{
  if (!x.same_shape(x_hat) || !m.same_shape(x.width(), x.height())) {
    throw Error(ErrorCode::DimensionMismatch, "emit_triplet: input, mask and ground truth sizes differ");
  }
  {
    std::lock_guard lock(mutex_);
    if (!ids_.insert(meta.record_id).second) {
      throw Error(ErrorCode::DuplicateRecord, "duplicate record id " + meta.record_id);
    }
  }
  const fs::path rel = fs::path(meta.scene_id) / meta.record_id;
  const fs::path dir = root_ / rel;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());
  save_image(x, dir / "input.png");
  save_image(x_hat, dir / "gt.png");
  save_mask(m, dir / "mask.png");
  meta.input_frame = (rel / "input.png").generic_string();
  meta.gt_frame = (rel / "gt.png").generic_string();
  meta.mask = (rel / "mask.png").generic_string();
  return meta;
}

namespace
{

ojson header_to_json(const ManifestHeader & h)
{
  ojson j;
  j["type"] = "header";
  j["version"] = h.version;
  j["config_digest"] = h.config_digest;
  j["delta"] = h.delta;
  j["pairing_mode"] = h.pairing_mode;
  j["global_seed"] = h.global_seed;
  j["config"] = h.config;
  return j;
}

ManifestHeader header_from_json(const ojson & j)
{
  if (!j.is_object() || j.value("type", "") != "header") {
    throw Error(ErrorCode::Parse, "first line must be an object with \"type\":\"header\"");
  }
  ManifestHeader h;
  try {
    h.version = j.at("version").get<int>();
    h.config_digest = j.at("config_digest").get<std::string>();
    h.delta = j.at("delta").get<double>();
    h.pairing_mode = j.at("pairing_mode").get<std::string>();
    h.global_seed = j.at("global_seed").get<std::uint64_t>();
    h.config = j.at("config");
  } catch (const nlohmann::json::exception & e) {
    throw Error(ErrorCode::Parse, std::string("header field: ") + e.what());
  }
  return h;
}

}  // namespace

void write_manifest(
  const fs::path & path, const ManifestHeader & header, const std::vector<TripletRecord> & records)
{
  std::set<std::string> ids;
  for (const auto & r : records) {
    if (!ids.insert(r.record_id).second) {
      throw Error(ErrorCode::DuplicateRecord, "duplicate record id " + r.record_id);
    }
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << header_to_json(header).dump() << '\n';
  for (const auto & r : records) out << to_json(r).dump() << '\n';
  out.flush();
  if (!out) throw Error(ErrorCode::Io, "write failed: " + path.string());
}

Manifest read_manifest(const fs::path & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  Manifest manifest;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    ojson j;
    try {
      j = ojson::parse(line);
    } catch (const nlohmann::json::exception & e) {
      throw ParseError(lineno, e.what());
    }
    try {
      if (!have_header) {
        manifest.header = header_from_json(j);
        have_header = true;
      } else {
        manifest.records.push_back(record_from_json(j));
      }
    } catch (const ParseError &) {
      throw;
    } catch (const Error & e) {
      throw ParseError(lineno, e.what());
    }
  }
  if (!have_header) throw ParseError(lineno + 1, "missing header line");
  return manifest;
}

long nearest_rank(const std::vector<long> & sorted, double q)
{
  if (sorted.empty()) throw Error(ErrorCode::InvalidArgument, "nearest_rank: empty sample");
  const auto n = static_cast<double>(sorted.size());
  auto rank = static_cast<std::size_t>(std::ceil(q * n));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

StatsReport compute_stats(const std::vector<TripletRecord> & records)
{
  StatsReport s;
  s.count = records.size();
  for (const char * kind : {"none", "dilate", "erode", "box"}) s.augmentation_counts[kind] = 0;
  if (records.empty()) return s;

  s.fg_ratio_histogram.assign(20, 0);
  std::vector<long> areas;
  double mse_sum = 0.0;
  for (const auto & r : records) {
    ++s.per_scene[r.scene_id];
    const int bin = std::clamp(static_cast<int>(std::floor(r.fg_ratio * 20.0)), 0, 19);
    ++s.fg_ratio_histogram[bin];
    areas.push_back(r.mask_area_px);
    ++s.augmentation_counts[to_string(r.augmentation)];
    mse_sum += r.pair_mse;
  }
  std::sort(areas.begin(), areas.end());
  s.mask_area_p10 = nearest_rank(areas, 0.1);
  s.mask_area_p50 = nearest_rank(areas, 0.5);
  s.mask_area_p90 = nearest_rank(areas, 0.9);
  s.mean_pair_mse = mse_sum / static_cast<double>(records.size());
  return s;
}

StatsReport dataset_stats(const fs::path & manifest_path)
{
  return compute_stats(read_manifest(manifest_path).records);
}

ojson to_json(const StatsReport & s)
{
  auto opt = [](const auto & v) { return v ? ojson(*v) : ojson(nullptr); };
  ojson j;
  j["count"] = s.count;
  j["per_scene"] = ojson::object();
  for (const auto & [k, v] : s.per_scene) j["per_scene"][k] = v;
  j["fg_ratio_histogram"] = s.fg_ratio_histogram;
  j["mask_area_quantiles"] = {
    {"p10", opt(s.mask_area_p10)}, {"p50", opt(s.mask_area_p50)}, {"p90", opt(s.mask_area_p90)}};
  j["augmentation_counts"] = ojson::object();
  for (const char * kind : {"none", "dilate", "erode", "box"}) {
    j["augmentation_counts"][kind] = s.augmentation_counts.at(kind);
  }
  j["mean_pair_mse"] = opt(s.mean_pair_mse);
  return j;
}

namespace
{

std::string validate_record(const fs::path & root, const TripletRecord & r)
{
  for (const auto * rel : {&r.input_frame, &r.gt_frame, &r.mask}) {
    if (!fs::exists(root / *rel)) return "missing file " + *rel;
  }
  try {
    const Frame x = load_image(root / r.input_frame);
    const Frame gt = load_image(root / r.gt_frame);
    const Frame raw_mask = load_image(root / r.mask);
    if (!x.same_shape(gt) || !x.same_shape(raw_mask)) return "file dimensions disagree";
    for (auto v : raw_mask.data()) {
      if (v != 0 && v != 255) return "mask is not binary 0/255";
    }
    const Mask m = load_mask(root / r.mask);
    const std::string why = check_guidance(decompose_object_background(x, m), x);
    if (!why.empty()) return why;
  } catch (const Error & e) {
    return e.what();
  }
  return {};
}

}  // namespace

ValidationResult validate_manifest(const fs::path & manifest_path)
{
  const Manifest manifest = read_manifest(manifest_path);
  const fs::path root = manifest_path.parent_path();
  ValidationResult result;
  std::set<std::string> ids;
  for (const auto & r : manifest.records) {
    std::string why;
    if (!ids.insert(r.record_id).second) {
      why = "duplicate record id";
    } else {
      why = validate_record(root, r);
    }
    if (!why.empty()) {
      result.ok = false;
      result.failing_record = r.record_id;
      result.message = why;
      return result;
    }
    ++result.checked;
  }
  return result;
}

}  // namespace v4r
