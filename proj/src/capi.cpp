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
#include "v4r/v4r.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>

#include "v4r/config.hpp"
#include "v4r/dataset.hpp"
#include "v4r/imaging.hpp"
#include "v4r/mask.hpp"
#include "v4r/metrics.hpp"
#include "v4r/pipeline.hpp"

struct v4r_frame
{
  v4r::Frame frame;
};

struct v4r_mask
{
  v4r::Mask mask;
};

struct v4r_config
{
  v4r::RunConfig cfg;
};

struct v4r_build_summary
{
  v4r::BuildSummary summary;
  std::string manifest;
};

namespace
{

thread_local std::string g_last_error;

v4r_status status_of(v4r::ErrorCode code)
{
  using v4r::ErrorCode;
  switch (code) {
    case ErrorCode::Io: return V4R_ERR_IO;
    case ErrorCode::Decode: return V4R_ERR_DECODE;
    case ErrorCode::DimensionMismatch: return V4R_ERR_DIMENSION_MISMATCH;
    case ErrorCode::InvalidParams: return V4R_ERR_INVALID_PARAMS;
    case ErrorCode::InvalidArgument: return V4R_ERR_INVALID_ARGUMENT;
    case ErrorCode::TooFewFrames: return V4R_ERR_TOO_FEW_FRAMES;
    case ErrorCode::TooFewSamples: return V4R_ERR_TOO_FEW_SAMPLES;
    case ErrorCode::EmptyCandidates: return V4R_ERR_EMPTY_CANDIDATES;
    case ErrorCode::MaskTooSmall: return V4R_ERR_MASK_TOO_SMALL;
    case ErrorCode::EmptyMask: return V4R_ERR_EMPTY_MASK;
    case ErrorCode::InvalidRle: return V4R_ERR_INVALID_RLE;
    case ErrorCode::DuplicateRecord: return V4R_ERR_DUPLICATE_RECORD;
    case ErrorCode::Parse: return V4R_ERR_PARSE;
    case ErrorCode::CountMismatch: return V4R_ERR_COUNT_MISMATCH;
    case ErrorCode::NumericalFailure: return V4R_ERR_NUMERICAL;
    case ErrorCode::Alignment: return V4R_ERR_ALIGNMENT;
    case ErrorCode::Sidecar: return V4R_ERR_SIDECAR;
    case ErrorCode::Config: return V4R_ERR_CONFIG;
    case ErrorCode::NoScenes: return V4R_ERR_NO_SCENES;
    case ErrorCode::Validation: return V4R_ERR_VALIDATION;
  }
  return V4R_ERR_INTERNAL;
}

v4r_status fail(v4r_status status, std::string message)
{
  g_last_error = std::move(message);
  return status;
}

// Runs body, translating exceptions into status codes.
template <typename Body>
v4r_status guarded(Body && body) noexcept
{
  try {
    return body();
  } catch (const v4r::Error & e) {
    return fail(status_of(e.code()), e.what());
  } catch (const std::bad_alloc &) {
    return fail(V4R_ERR_INTERNAL, "out of memory");
  } catch (const std::exception & e) {
    return fail(V4R_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(V4R_ERR_INTERNAL, "unknown exception");
  }
}

char * dup_string(const std::string & s)
{
  char * out = static_cast<char *>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

#define V4R_REQUIRE(ptr)                                                    \
  do {                                                                      \
    if (!(ptr)) return fail(V4R_ERR_NULL_ARGUMENT, #ptr " must not be NULL"); \
  } while (0)

}  // namespace

extern "C" {

const char * v4r_version(void) { return "1.0.0"; }

const char * v4r_status_name(v4r_status status)
{
  switch (status) {
    case V4R_OK: return "OK";
    case V4R_ERR_NULL_ARGUMENT: return "NullArgument";
    case V4R_ERR_INTERNAL: return "InternalError";
    default: break;
  }
  if (status >= V4R_ERR_IO && status <= V4R_ERR_VALIDATION) {
    return v4r::to_string(static_cast<v4r::ErrorCode>(status - 1));
  }
  return "UnknownStatus";
}

const char * v4r_last_error(void) { return g_last_error.c_str(); }

void v4r_string_free(char * s) { std::free(s); }

v4r_status v4r_frame_create(int width, int height, const uint8_t * rgb, v4r_frame ** out)
{
  V4R_REQUIRE(rgb);
  V4R_REQUIRE(out);
  return guarded([&] {
    if (width < 1 || height < 1) return fail(V4R_ERR_INVALID_ARGUMENT, "frame dimensions must be positive");
    const std::size_t n = static_cast<std::size_t>(width) * height * 3;
    *out = new v4r_frame{v4r::Frame(width, height, std::vector<std::uint8_t>(rgb, rgb + n))};
    return V4R_OK;
  });
}

v4r_status v4r_frame_load(const char * path, v4r_frame ** out)
{
  V4R_REQUIRE(path);
  V4R_REQUIRE(out);
  return guarded([&] {
    *out = new v4r_frame{v4r::load_image(path)};
    return V4R_OK;
  });
}

v4r_status v4r_frame_save(const v4r_frame * frame, const char * path)
{
  V4R_REQUIRE(frame);
  V4R_REQUIRE(path);
  return guarded([&] {
    v4r::save_image(frame->frame, path);
    return V4R_OK;
  });
}

int v4r_frame_width(const v4r_frame * frame) { return frame ? frame->frame.width() : 0; }
int v4r_frame_height(const v4r_frame * frame) { return frame ? frame->frame.height() : 0; }
const uint8_t * v4r_frame_data(const v4r_frame * frame)
{
  return frame ? frame->frame.data().data() : nullptr;
}
void v4r_frame_free(v4r_frame * frame) { delete frame; }

v4r_status v4r_frame_mse(const v4r_frame * a, const v4r_frame * b, double * out)
{
  V4R_REQUIRE(a);
  V4R_REQUIRE(b);
  V4R_REQUIRE(out);
  return guarded([&] {
    *out = v4r::frame_mse(a->frame, b->frame);
    return V4R_OK;
  });
}

v4r_status v4r_psnr(const v4r_frame * a, const v4r_frame * b, double max_value, double * out)
{
  V4R_REQUIRE(a);
  V4R_REQUIRE(b);
  V4R_REQUIRE(out);
  return guarded([&] {
    *out = v4r::psnr(a->frame, b->frame, max_value);
    return V4R_OK;
  });
}

v4r_status v4r_mask_create(int width, int height, const uint8_t * values, v4r_mask ** out)
{
  V4R_REQUIRE(values);
  V4R_REQUIRE(out);
  return guarded([&] {
    if (width < 1 || height < 1) return fail(V4R_ERR_INVALID_ARGUMENT, "mask dimensions must be positive");
    std::vector<std::uint8_t> data(static_cast<std::size_t>(width) * height);
    for (std::size_t i = 0; i < data.size(); ++i) data[i] = values[i] ? 1 : 0;
    *out = new v4r_mask{v4r::Mask(width, height, std::move(data))};
    return V4R_OK;
  });
}

v4r_status v4r_mask_load(const char * path, v4r_mask ** out)
{
  V4R_REQUIRE(path);
  V4R_REQUIRE(out);
  return guarded([&] {
    *out = new v4r_mask{v4r::load_mask(path)};
    return V4R_OK;
  });
}

v4r_status v4r_mask_save(const v4r_mask * mask, const char * path)
{
  V4R_REQUIRE(mask);
  V4R_REQUIRE(path);
  return guarded([&] {
    v4r::save_mask(mask->mask, path);
    return V4R_OK;
  });
}

int v4r_mask_width(const v4r_mask * mask) { return mask ? mask->mask.width() : 0; }
int v4r_mask_height(const v4r_mask * mask) { return mask ? mask->mask.height() : 0; }
const uint8_t * v4r_mask_data(const v4r_mask * mask)
{
  return mask ? mask->mask.data().data() : nullptr;
}
size_t v4r_mask_count(const v4r_mask * mask) { return mask ? mask->mask.count() : 0; }
void v4r_mask_free(v4r_mask * mask) { delete mask; }

v4r_status v4r_mask_iou(const v4r_mask * a, const v4r_mask * b, double * out)
{
  V4R_REQUIRE(a);
  V4R_REQUIRE(b);
  V4R_REQUIRE(out);
  return guarded([&] {
    *out = v4r::mask_iou(a->mask, b->mask);
    return V4R_OK;
  });
}

v4r_status v4r_mask_augment(
  const v4r_mask * mask, const char * mode, v4r_mask ** out, const char ** kind, int * radius)
{
  V4R_REQUIRE(mask);
  V4R_REQUIRE(mode);
  V4R_REQUIRE(out);
  return guarded([&] {
    v4r::AugmentedMask aug = v4r::apply_augment_mode(mask->mask, mode);
    if (kind) *kind = v4r::to_string(aug.kind);
    if (radius) *radius = aug.radius.value_or(-1);
    *out = new v4r_mask{std::move(aug.mask)};
    return V4R_OK;
  });
}

v4r_status v4r_config_create(v4r_config ** out)
{
  V4R_REQUIRE(out);
  return guarded([&] {
    *out = new v4r_config{v4r::RunConfig::from_environment()};
    return V4R_OK;
  });
}

v4r_status v4r_config_load(v4r_config * cfg, const char * path)
{
  V4R_REQUIRE(cfg);
  V4R_REQUIRE(path);
  return guarded([&] {
    cfg->cfg = v4r::load_config(path, cfg->cfg);
    return V4R_OK;
  });
}

v4r_status v4r_config_set_seed(v4r_config * cfg, uint64_t seed)
{
  V4R_REQUIRE(cfg);
  cfg->cfg.global_seed = seed;
  return V4R_OK;
}

v4r_status v4r_config_set_threads(v4r_config * cfg, int threads)
{
  V4R_REQUIRE(cfg);
  if (threads < 1) return fail(V4R_ERR_CONFIG, "config: threads must be >= 1");
  cfg->cfg.threads = threads;
  return V4R_OK;
}

v4r_status v4r_config_set_pairing_mode(v4r_config * cfg, const char * mode)
{
  V4R_REQUIRE(cfg);
  V4R_REQUIRE(mode);
  const auto parsed = v4r::parse_pairing_mode(mode);
  if (!parsed) {
    return fail(V4R_ERR_CONFIG, std::string("config: unknown pairing mode \"") + mode + "\"");
  }
  cfg->cfg.pairing_mode = *parsed;
  return V4R_OK;
}

v4r_status v4r_config_set_segmenter(v4r_config * cfg, const char * segmenter)
{
  V4R_REQUIRE(cfg);
  V4R_REQUIRE(segmenter);
  return guarded([&] {
    v4r::RunConfig next = cfg->cfg;
    next.segmenter = segmenter;
    next.validate();
    cfg->cfg = std::move(next);
    return V4R_OK;
  });
}

v4r_status v4r_config_to_json(const v4r_config * cfg, char ** out)
{
  V4R_REQUIRE(cfg);
  V4R_REQUIRE(out);
  return guarded([&] {
    auto j = v4r::config_to_json(cfg->cfg);
    j["threads"] = cfg->cfg.threads ? v4r::ojson(*cfg->cfg.threads) : v4r::ojson(nullptr);
    *out = dup_string(j.dump(2));
    return V4R_OK;
  });
}

void v4r_config_free(v4r_config * cfg) { delete cfg; }

v4r_status v4r_build(
  const v4r_config * cfg, const char * scenes_dir, const char * out_dir, v4r_build_summary ** out)
{
  V4R_REQUIRE(cfg);
  V4R_REQUIRE(scenes_dir);
  V4R_REQUIRE(out_dir);
  V4R_REQUIRE(out);
  return guarded([&] {
    auto * s = new v4r_build_summary{v4r::build_dataset(cfg->cfg, scenes_dir, out_dir), {}};
    s->manifest = s->summary.manifest.string();
    *out = s;
    return V4R_OK;
  });
}

size_t v4r_build_summary_emitted(const v4r_build_summary * s) { return s ? s->summary.emitted : 0; }

const char * v4r_build_summary_manifest(const v4r_build_summary * s)
{
  return s ? s->manifest.c_str() : "";
}

size_t v4r_build_summary_scene_count(const v4r_build_summary * s)
{
  return s ? s->summary.scenes.size() : 0;
}

v4r_status v4r_build_summary_scene(const v4r_build_summary * s, size_t index, v4r_scene_counts * out)
{
  V4R_REQUIRE(s);
  V4R_REQUIRE(out);
  if (index >= s->summary.scenes.size()) return fail(V4R_ERR_INVALID_ARGUMENT, "scene index out of range");
  const auto & sc = s->summary.scenes[index];
  out->scene_id = sc.scene_id.c_str();
  out->foreground_frames = sc.foreground_frames;
  out->background_frames = sc.background_frames;
  out->accepted = sc.accepted;
  out->rejected = sc.rejected;
  out->error = sc.error.c_str();
  return V4R_OK;
}

v4r_status v4r_build_summary_reject_reasons(const v4r_build_summary * s, size_t index, char ** json_out)
{
  V4R_REQUIRE(s);
  V4R_REQUIRE(json_out);
  if (index >= s->summary.scenes.size()) return fail(V4R_ERR_INVALID_ARGUMENT, "scene index out of range");
  return guarded([&] {
    v4r::ojson j = v4r::ojson::object();
    for (const auto & [k, v] : s->summary.scenes[index].reject_reasons) j[k] = v;
    *json_out = dup_string(j.dump());
    return V4R_OK;
  });
}

void v4r_build_summary_free(v4r_build_summary * s) { delete s; }

v4r_status v4r_manifest_stats(const char * manifest_path, char ** json_out)
{
  V4R_REQUIRE(manifest_path);
  V4R_REQUIRE(json_out);
  return guarded([&] {
    *json_out = dup_string(v4r::to_json(v4r::dataset_stats(manifest_path)).dump(2));
    return V4R_OK;
  });
}

v4r_status v4r_manifest_validate(const char * manifest_path, char ** failing_record)
{
  V4R_REQUIRE(manifest_path);
  return guarded([&] {
    if (failing_record) *failing_record = nullptr;
    const v4r::ValidationResult r = v4r::validate_manifest(manifest_path);
    if (r.ok) return V4R_OK;
    if (failing_record) *failing_record = dup_string(r.failing_record);
    return fail(V4R_ERR_VALIDATION, "record " + r.failing_record + ": " + r.message);
  });
}

v4r_status v4r_evaluate(
  const char * pred_dir, const char * gt_dir, const char * mask_dir, const char * embedder,
  const char * report_path, char ** json_out)
{
  V4R_REQUIRE(pred_dir);
  V4R_REQUIRE(gt_dir);
  V4R_REQUIRE(embedder);
  return guarded([&] {
    std::optional<std::filesystem::path> masks;
    if (mask_dir) masks = mask_dir;
    const v4r::MetricReport report = v4r::run_evaluation(pred_dir, gt_dir, masks, embedder);
    const std::string text = report.to_json().dump(2);
    if (report_path) {
      std::ofstream f(report_path, std::ios::binary | std::ios::trunc);
      f << text << '\n';
      if (!f) return fail(V4R_ERR_IO, std::string("cannot write ") + report_path);
    }
    if (json_out) *json_out = dup_string(text);
    return V4R_OK;
  });
}

v4r_status v4r_embed_directory(const char * image_dir, const char * out_path)
{
  V4R_REQUIRE(image_dir);
  V4R_REQUIRE(out_path);
  return guarded([&] {
    std::vector<std::filesystem::path> paths;
    for (const auto & name : v4r::list_images(image_dir)) paths.emplace_back(std::filesystem::path(image_dir) / name);
    if (paths.empty()) return fail(V4R_ERR_IO, std::string("no images in ") + image_dir);
    v4r::write_embeddings(v4r::embed_builtin(paths), out_path);
    return V4R_OK;
  });
}

}  // extern "C"
