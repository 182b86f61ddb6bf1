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
#include <vector>

#include "v4r/imaging.hpp"
#include "v4r/raster.hpp"

namespace v4r
{

struct MogParams
{
  int max_components = 5;
  double match_threshold_sq = 16.0;
  double learning_rate = 0.005;
  double complexity_prior = 0.05;
  double initial_variance = 225.0;
  double variance_min = 4.0;
  double variance_max = 5000.0;
  double background_mass = 0.9;
  int warmup_frames = 20;

  /// Throws InvalidParams naming the first violated constraint.
  void validate() const;

  friend bool operator==(const MogParams &, const MogParams &) = default;
};

struct GaussianComponent
{
  double weight;
  double mean;
  double variance;
  friend bool operator==(const GaussianComponent &, const GaussianComponent &) = default;
};

/// Components of one pixel, kept sorted by descending weight.
struct PixelMixture
{
  std::vector<GaussianComponent> components;
};

/// Adaptive per-pixel Gaussian mixture over luma. Frames must be fed in
/// temporal order; a model instance is not shared between threads.
class BackgroundModel
{
public:
  BackgroundModel(int width, int height, const MogParams & params);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t frames_seen() const noexcept { return frames_seen_; }
  const MogParams & params() const noexcept { return params_; }

  /// Segments the frame against the current model, then absorbs it.
  SegmentationMap update(const GrayFrame & frame);

  /// Snapshot of one pixel's mixture.
  PixelMixture mixture(int row, int col) const;

  /// True once the warm-up period is over for the most recent update.
  bool warmed_up() const noexcept
  {
    return frames_seen_ > static_cast<std::size_t>(params_.warmup_frames);
  }

  friend bool operator==(const BackgroundModel &, const BackgroundModel &) = default;

private:
  std::uint8_t update_pixel(std::size_t pixel, double x);

  int width_;
  int height_;
  MogParams params_;
  std::size_t frames_seen_ = 0;
  // Flat storage: max_components slots per pixel plus a live count.
  std::vector<GaussianComponent> slots_;
  std::vector<std::uint8_t> counts_;
};

enum class FrameClass { Background, Foreground };

BackgroundModel bg_init(int width, int height, const MogParams & params);
SegmentationMap bg_update(BackgroundModel & model, const GrayFrame & frame);

double foreground_ratio(const SegmentationMap & map);

/// Foreground iff ratio strictly exceeds delta.
FrameClass classify_frame(double ratio, double delta);

}  // namespace v4r
