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
#include <string>
#include <vector>

#include <json.hpp>

#include "v4r/imaging.hpp"
#include "v4r/linalg.hpp"
#include "v4r/mask.hpp"

namespace v4r
{

/// n rows of d-dimensional embeddings, one per source image.
struct EmbeddingSet
{
  std::size_t count = 0;
  std::size_t dim = 0;
  std::vector<double> data;  // row-major count x dim
  std::vector<std::string> sources;

  std::span<const double> row(std::size_t i) const noexcept
  {
    return std::span<const double>(data).subspan(i * dim, dim);
  }
  /// Throws InvalidArgument on a shape mismatch or a non-finite entry.
  void validate() const;
};

EmbeddingSet make_embedding_set(
  std::size_t dim, std::vector<std::vector<double>> rows, std::vector<std::string> sources = {});

/// EMB1 little-endian binary: magic, u32 n, u32 d, n*d float32, then n
/// newline-terminated source paths.
void write_embeddings(const EmbeddingSet & set, const std::filesystem::path & path);
EmbeddingSet read_embeddings(const std::filesystem::path & path);

struct GaussianStats
{
  std::vector<double> mean;
  SquareMatrix covariance;
};

/// Infinity when the frames are identical.
double psnr(const Frame & a, const Frame & b, double max_value = 255.0);

/// PSNR restricted to an inclusive rectangle.
double psnr_region(const Frame & a, const Frame & b, const BoundingBox & box, double max_value = 255.0);

inline constexpr std::size_t kBuiltinGrid = 16;
inline constexpr std::size_t kBuiltinDim = kBuiltinGrid * kBuiltinGrid;

/// Neural-free 256-d embedding: luma sampled bilinearly on a 16x16 grid,
/// mean-subtracted and L2-normalised. Constant frames map to zero.
std::vector<double> builtin_embed(const Frame & frame);

/// Column mean and unbiased (n-1) covariance, symmetrised.
GaussianStats mean_cov(const EmbeddingSet & set);

/// Squared Frechet distance between two Gaussians.
double frechet_distance(const GaussianStats & a, const GaussianStats & b, double eps = 1e-6);

/// Scaled unbiased MMD^2 with a Gaussian RBF kernel.
double mmd2(const EmbeddingSet & x, const EmbeddingSet & y, double bandwidth = 10.0, double scale = 1000.0);

/// Mean of 1 - cos over index-aligned pairs; cos of a zero vector is 0.
double paired_embedding_distance(const EmbeddingSet & x, const EmbeddingSet & y);

enum class EmbeddingSpace { Inception, Clip, Dino };

const char * to_string(EmbeddingSpace space) noexcept;

/// Embeds the images in order. Builtin ignores the requested space.
using EmbedFn =
  std::function<EmbeddingSet(const std::vector<std::filesystem::path> &, EmbeddingSpace)>;

EmbeddingSet embed_builtin(const std::vector<std::filesystem::path> & images);

struct MetricReport
{
  // Infinite values serialise as the string "inf".
  std::vector<std::pair<std::string, double>> values;
  nlohmann::ordered_json provenance = nlohmann::ordered_json::object();

  std::optional<double> get(const std::string & name) const;
  nlohmann::ordered_json to_json() const;
};

struct EvalOptions
{
  std::filesystem::path pred_dir;
  std::filesystem::path gt_dir;
  std::optional<std::filesystem::path> mask_dir;
  std::string embedder_id = "builtin";
  EmbedFn embed;  // empty = builtin
  double cmmd_bandwidth = 10.0;
  double cmmd_scale = 1000.0;
};

/// Image files (png/jpg/jpeg) in a directory, sorted by filename.
std::vector<std::string> list_images(const std::filesystem::path & dir);

MetricReport evaluate(const EvalOptions & options);

}  // namespace v4r
