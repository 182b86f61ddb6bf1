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
/*
 * C interface to the v4r triplet pipeline and evaluation harness.
 *
 * Objects are opaque handles created by v4r_*_create/load and released by
 * the matching v4r_*_free. Every fallible call returns a v4r_status; on
 * failure v4r_last_error() holds a message for the calling thread until the
 * next failing call on that thread. Strings returned through char** out
 * parameters are owned by the caller and released with v4r_string_free.
 */
#ifndef V4R_V4R_H_
#define V4R_V4R_H_

#include <stddef.h>
#include <stdint.h>

#if defined(V4R_BUILDING_LIBRARY)
#define V4R_API __attribute__((visibility("default")))
#else
#define V4R_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum v4r_status {
  V4R_OK = 0,
  V4R_ERR_IO = 1,
  V4R_ERR_DECODE = 2,
  V4R_ERR_DIMENSION_MISMATCH = 3,
  V4R_ERR_INVALID_PARAMS = 4,
  V4R_ERR_INVALID_ARGUMENT = 5,
  V4R_ERR_TOO_FEW_FRAMES = 6,
  V4R_ERR_TOO_FEW_SAMPLES = 7,
  V4R_ERR_EMPTY_CANDIDATES = 8,
  V4R_ERR_MASK_TOO_SMALL = 9,
  V4R_ERR_EMPTY_MASK = 10,
  V4R_ERR_INVALID_RLE = 11,
  V4R_ERR_DUPLICATE_RECORD = 12,
  V4R_ERR_PARSE = 13,
  V4R_ERR_COUNT_MISMATCH = 14,
  V4R_ERR_NUMERICAL = 15,
  V4R_ERR_ALIGNMENT = 16,
  V4R_ERR_SIDECAR = 17,
  V4R_ERR_CONFIG = 18,
  V4R_ERR_NO_SCENES = 19,
  V4R_ERR_VALIDATION = 20,
  V4R_ERR_NULL_ARGUMENT = 64,
  V4R_ERR_INTERNAL = 65
} v4r_status;

V4R_API const char * v4r_version(void);
V4R_API const char * v4r_status_name(v4r_status status);
V4R_API const char * v4r_last_error(void);
V4R_API void v4r_string_free(char * s);

/* ---- frames (8-bit RGB) ---- */

typedef struct v4r_frame v4r_frame;

V4R_API v4r_status v4r_frame_create(int width, int height, const uint8_t * rgb, v4r_frame ** out);
V4R_API v4r_status v4r_frame_load(const char * path, v4r_frame ** out);
V4R_API v4r_status v4r_frame_save(const v4r_frame * frame, const char * path);
V4R_API int v4r_frame_width(const v4r_frame * frame);
V4R_API int v4r_frame_height(const v4r_frame * frame);
/* width*height*3 bytes, row-major, channel-interleaved. */
V4R_API const uint8_t * v4r_frame_data(const v4r_frame * frame);
V4R_API void v4r_frame_free(v4r_frame * frame);

V4R_API v4r_status v4r_frame_mse(const v4r_frame * a, const v4r_frame * b, double * out);
/* *out is +infinity for identical frames. */
V4R_API v4r_status v4r_psnr(const v4r_frame * a, const v4r_frame * b, double max_value, double * out);

/* ---- binary masks ---- */

typedef struct v4r_mask v4r_mask;

/* values: width*height bytes, zero = background, non-zero = foreground. */
V4R_API v4r_status v4r_mask_create(int width, int height, const uint8_t * values, v4r_mask ** out);
V4R_API v4r_status v4r_mask_load(const char * path, v4r_mask ** out);
V4R_API v4r_status v4r_mask_save(const v4r_mask * mask, const char * path);
V4R_API int v4r_mask_width(const v4r_mask * mask);
V4R_API int v4r_mask_height(const v4r_mask * mask);
/* width*height bytes of 0/1. */
V4R_API const uint8_t * v4r_mask_data(const v4r_mask * mask);
V4R_API size_t v4r_mask_count(const v4r_mask * mask);
V4R_API void v4r_mask_free(v4r_mask * mask);

V4R_API v4r_status v4r_mask_iou(const v4r_mask * a, const v4r_mask * b, double * out);

/*
 * mode: "none", "box", "dilate:R", "erode:R" or "random:SEED". On success
 * *kind points at a static string ("none", "dilate", "erode", "box") and
 * *radius is the radius used, or -1. kind and radius may be NULL.
 */
V4R_API v4r_status v4r_mask_augment(
  const v4r_mask * mask, const char * mode, v4r_mask ** out, const char ** kind, int * radius);

/* ---- run configuration ---- */

typedef struct v4r_config v4r_config;

/* Defaults; the segmenter comes from V4R_SIDECAR_URL when set. */
V4R_API v4r_status v4r_config_create(v4r_config ** out);
/* Overlays a JSON config file; unknown keys are errors. */
V4R_API v4r_status v4r_config_load(v4r_config * cfg, const char * path);
V4R_API v4r_status v4r_config_set_seed(v4r_config * cfg, uint64_t seed);
V4R_API v4r_status v4r_config_set_threads(v4r_config * cfg, int threads);
V4R_API v4r_status v4r_config_set_pairing_mode(v4r_config * cfg, const char * mode);
V4R_API v4r_status v4r_config_set_segmenter(v4r_config * cfg, const char * segmenter);
V4R_API v4r_status v4r_config_to_json(const v4r_config * cfg, char ** out);
V4R_API void v4r_config_free(v4r_config * cfg);

/* ---- dataset build ---- */

typedef struct v4r_build_summary v4r_build_summary;

typedef struct v4r_scene_counts {
  const char * scene_id;
  size_t foreground_frames;
  size_t background_frames;
  size_t accepted;
  size_t rejected;
  /* Empty string unless the scene failed as a whole. */
  const char * error;
} v4r_scene_counts;

/* Fails with V4R_ERR_NO_SCENES when scenes_dir has no scene directories.
 * Zero emitted triplets is not an error; check the summary. */
V4R_API v4r_status v4r_build(
  const v4r_config * cfg, const char * scenes_dir, const char * out_dir, v4r_build_summary ** out);
V4R_API size_t v4r_build_summary_emitted(const v4r_build_summary * s);
V4R_API const char * v4r_build_summary_manifest(const v4r_build_summary * s);
V4R_API size_t v4r_build_summary_scene_count(const v4r_build_summary * s);
V4R_API v4r_status v4r_build_summary_scene(
  const v4r_build_summary * s, size_t index, v4r_scene_counts * out);
/* Rejection reasons of one scene as a JSON object. */
V4R_API v4r_status v4r_build_summary_reject_reasons(
  const v4r_build_summary * s, size_t index, char ** json_out);
V4R_API void v4r_build_summary_free(v4r_build_summary * s);

/* ---- manifests ---- */

V4R_API v4r_status v4r_manifest_stats(const char * manifest_path, char ** json_out);
/* V4R_ERR_VALIDATION when a record fails; *failing_record (may be NULL)
 * receives its record_id. */
V4R_API v4r_status v4r_manifest_validate(const char * manifest_path, char ** failing_record);

/* ---- evaluation ---- */

/* embedder: "builtin" or "sidecar:URL". mask_dir and report_path may be
 * NULL. The report JSON is returned through json_out when non-NULL. */
V4R_API v4r_status v4r_evaluate(
  const char * pred_dir, const char * gt_dir, const char * mask_dir, const char * embedder,
  const char * report_path, char ** json_out);

/* Built-in embeddings of every image in a directory, written as EMB1. */
V4R_API v4r_status v4r_embed_directory(const char * image_dir, const char * out_path);

#ifdef __cplusplus
}
#endif

#endif /* V4R_V4R_H_ */
