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
#include "v4r/background.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace v4r
{

namespace
{

constexpr double kPruneWeight = 1e-6;
constexpr int kComponentLimit = 32;

void invalid(const std::string & what)
{
  throw Error(ErrorCode::InvalidParams, "MogParams: " + what);
}

void renormalize(GaussianComponent * c, int n)
{
  double total = 0.0;
  for (int i = 0; i < n; ++i) total += c[i].weight;
  for (int i = 0; i < n; ++i) c[i].weight /= total;
}

// Stable insertion sort by descending weight; n is tiny.
void sort_by_weight(GaussianComponent * c, int n)
{
  for (int i = 1; i < n; ++i) {
    const GaussianComponent key = c[i];
    int j = i - 1;
    while (j >= 0 && c[j].weight < key.weight) {
      c[j + 1] = c[j];
      --j;
    }
    c[j + 1] = key;
  }
}

}  // namespace

void MogParams::validate() const
{
  if (max_components < 1 || max_components > kComponentLimit) {
    invalid("max_components must be in [1, " + std::to_string(kComponentLimit) + "]");
  }
  if (!(match_threshold_sq > 0.0)) invalid("match_threshold_sq must be positive");
  if (!(learning_rate > 0.0 && learning_rate <= 1.0)) invalid("learning_rate must be in (0,1]");
  if (!(complexity_prior >= 0.0)) invalid("complexity_prior must be >= 0");
  if (!(background_mass > 0.0 && background_mass < 1.0)) {
    invalid("background_mass must be in (0,1)");
  }
  if (!(variance_min > 0.0)) invalid("variance_min must be positive");
  if (!(variance_min < initial_variance && initial_variance <= variance_max)) {
    invalid("variance bounds must satisfy variance_min < initial_variance <= variance_max");
  }
  if (warmup_frames < 0) invalid("warmup_frames must be >= 0");
}

BackgroundModel::BackgroundModel(int width, int height, const MogParams & params)
: width_(width), height_(height), params_(params)
{
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::InvalidArgument, "background model dimensions must be positive");
  }
  params_.validate();
  const std::size_t pixels = static_cast<std::size_t>(width) * height;
  slots_.resize(pixels * params_.max_components, GaussianComponent{0.0, 0.0, 0.0});
  counts_.assign(pixels, 0);
}

PixelMixture BackgroundModel::mixture(int row, int col) const
{
  const std::size_t pixel = static_cast<std::size_t>(row) * width_ + col;
  const auto * c = slots_.data() + pixel * params_.max_components;
  return PixelMixture{{c, c + counts_[pixel]}};
}

std::uint8_t BackgroundModel::update_pixel(std::size_t pixel, double x)
{
  const MogParams & p = params_;
  GaussianComponent * c = slots_.data() + pixel * p.max_components;
  int n = counts_[pixel];

  if (n == 0) {
    c[0] = GaussianComponent{1.0, x, p.initial_variance};
    counts_[pixel] = 1;
    return 0;
  }

  // Match in descending-weight order against the pre-update state.
  int matched = -1;
  for (int i = 0; i < n; ++i) {
    const double d = x - c[i].mean;
    if (d * d / c[i].variance < p.match_threshold_sq) {
      matched = i;
      break;
    }
  }

  // Background decision, also on the pre-update state: the smallest prefix in
  // weight/sigma order whose cumulative weight exceeds background_mass.
  std::uint8_t foreground = 1;
  if (matched >= 0) {
    std::array<int, kComponentLimit> order{};
    for (int i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.begin() + n, [c](int a, int b) {
      return c[a].weight / std::sqrt(c[a].variance) > c[b].weight / std::sqrt(c[b].variance);
    });
    double cumulative = 0.0;
    for (int k = 0; k < n; ++k) {
      cumulative += c[order[k]].weight;
      if (order[k] == matched) {
        foreground = 0;
        break;
      }
      if (cumulative > p.background_mass) break;
    }
  }

  const double alpha = p.learning_rate;
  for (int i = 0; i < n; ++i) {
    const double owned = (i == matched) ? 1.0 : 0.0;
    c[i].weight += alpha * (owned - c[i].weight) - alpha * p.complexity_prior * c[i].weight;
  }
  // Prune, keeping relative order and tracking where the match moved to.
  int kept = 0;
  int matched_after = -1;
  for (int i = 0; i < n; ++i) {
    if (c[i].weight <= kPruneWeight) continue;
    if (i == matched) matched_after = kept;
    c[kept++] = c[i];
  }
  n = kept;
  if (n > 0) renormalize(c, n);

  if (matched_after >= 0) {
    GaussianComponent & m = c[matched_after];
    const double rho = std::min(1.0, alpha / m.weight);
    const double d = x - m.mean;
    m.mean += rho * d;
    m.variance = std::clamp(m.variance + rho * (d * d - m.variance), p.variance_min, p.variance_max);
  } else {
    const GaussianComponent fresh{alpha, x, p.initial_variance};
    if (n < p.max_components) {
      c[n++] = fresh;
    } else {
      int smallest = 0;
      for (int i = 1; i < n; ++i) {
        if (c[i].weight <= c[smallest].weight) smallest = i;
      }
      c[smallest] = fresh;
    }
    renormalize(c, n);
  }

  sort_by_weight(c, n);
  counts_[pixel] = static_cast<std::uint8_t>(n);
  return foreground;
}

SegmentationMap BackgroundModel::update(const GrayFrame & frame)
{
  if (frame.width() != width_ || frame.height() != height_) {
    throw Error(
      ErrorCode::DimensionMismatch,
      "bg_update: frame is " + std::to_string(frame.width()) + "x" +
        std::to_string(frame.height()) + ", model is " + std::to_string(width_) + "x" +
        std::to_string(height_));
  }
  std::vector<std::uint8_t> out(frame.pixel_count());
  const auto & px = frame.data();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = update_pixel(i, static_cast<double>(px[i]));
  }
  ++frames_seen_;
  return SegmentationMap(width_, height_, std::move(out));
}

BackgroundModel bg_init(int width, int height, const MogParams & params)
{
  return BackgroundModel(width, height, params);
}

SegmentationMap bg_update(BackgroundModel & model, const GrayFrame & frame)
{
  return model.update(frame);
}

double foreground_ratio(const SegmentationMap & map)
{
  return static_cast<double>(map.count()) / static_cast<double>(map.size());
}

FrameClass classify_frame(double ratio, double delta)
{
  return ratio > delta ? FrameClass::Foreground : FrameClass::Background;
}

}  // namespace v4r
