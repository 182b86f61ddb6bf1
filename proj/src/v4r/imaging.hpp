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
#include <cstdint>
#include <filesystem>
#include <vector>

namespace v4r
{

/// 8-bit RGB raster, row-major, channel-interleaved.
class Frame
{
public:
  Frame() = default;
  Frame(int width, int height);
  Frame(int width, int height, std::vector<std::uint8_t> data);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t pixel_count() const noexcept
  {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }
  const std::vector<std::uint8_t> & data() const noexcept { return data_; }
  std::vector<std::uint8_t> & data() noexcept { return data_; }

  std::uint8_t * pixel(int row, int col) noexcept
  {
    return data_.data() + (static_cast<std::size_t>(row) * width_ + col) * 3;
  }
  const std::uint8_t * pixel(int row, int col) const noexcept
  {
    return data_.data() + (static_cast<std::size_t>(row) * width_ + col) * 3;
  }

  bool same_shape(const Frame & other) const noexcept
  {
    return width_ == other.width_ && height_ == other.height_;
  }

  friend bool operator==(const Frame &, const Frame &) = default;

private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

/// 8-bit luma raster.
class GrayFrame
{
public:
  GrayFrame() = default;
  GrayFrame(int width, int height);
  GrayFrame(int width, int height, std::vector<std::uint8_t> data);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t pixel_count() const noexcept
  {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }
  const std::vector<std::uint8_t> & data() const noexcept { return data_; }
  std::vector<std::uint8_t> & data() noexcept { return data_; }
  std::uint8_t at(int row, int col) const noexcept
  {
    return data_[static_cast<std::size_t>(row) * width_ + col];
  }

  friend bool operator==(const GrayFrame &, const GrayFrame &) = default;

private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

/// Decodes PNG or JPEG (detected from the file signature). Gray sources are
/// expanded to three equal channels, alpha is dropped, 16-bit PNG is reduced
/// to 8 bits.
Frame load_image(const std::filesystem::path & path);

/// Writes an 8-bit RGB PNG.
void save_image(const Frame & frame, const std::filesystem::path & path);

/// Writes an 8-bit single-channel PNG.
void save_gray_png(const GrayFrame & frame, const std::filesystem::path & path);

/// BT.601 luma, rounded half away from zero and clamped.
GrayFrame to_gray(const Frame & frame);

/// Unrounded BT.601 luma per pixel.
std::vector<double> luma_values(const Frame & frame);

/// Mean over all width*height*3 samples of the squared difference, in
/// squared 8-bit levels.
double frame_mse(const Frame & a, const Frame & b);

}  // namespace v4r
