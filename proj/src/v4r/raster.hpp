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
#include <vector>

#include "v4r/error.hpp"

namespace v4r
{

/// Binary raster with values in {0,1}. The tag keeps segmentation maps and
/// object masks from being mixed up by accident; convert explicitly with
/// BinaryRaster::retag.
template <typename Tag>
class BinaryRaster
{
public:
  BinaryRaster() = default;
  BinaryRaster(int width, int height)
  : width_(width), height_(height),
    data_(static_cast<std::size_t>(width > 0 ? width : 0) * (height > 0 ? height : 0), 0)
  {
    if (width < 1 || height < 1) {
      throw Error(ErrorCode::InvalidArgument, "raster dimensions must be positive");
    }
  }
  BinaryRaster(int width, int height, std::vector<std::uint8_t> data)
  : width_(width), height_(height), data_(std::move(data))
  {
    if (width < 1 || height < 1) {
      throw Error(ErrorCode::InvalidArgument, "raster dimensions must be positive");
    }
    if (data_.size() != static_cast<std::size_t>(width) * height) {
      throw Error(ErrorCode::InvalidArgument, "raster data length must equal width*height");
    }
    for (auto & v : data_) {
      if (v > 1) throw Error(ErrorCode::InvalidArgument, "raster values must be 0 or 1");
    }
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  const std::vector<std::uint8_t> & data() const noexcept { return data_; }

  std::uint8_t at(int row, int col) const noexcept
  {
    return data_[static_cast<std::size_t>(row) * width_ + col];
  }
  void set(int row, int col, std::uint8_t v) noexcept
  {
    data_[static_cast<std::size_t>(row) * width_ + col] = v ? 1 : 0;
  }
  std::uint8_t operator[](std::size_t i) const noexcept { return data_[i]; }
  void set(std::size_t i, std::uint8_t v) noexcept { data_[i] = v ? 1 : 0; }

  std::size_t count() const noexcept
  {
    std::size_t n = 0;
    for (auto v : data_) n += v;
    return n;
  }
  bool empty_foreground() const noexcept { return count() == 0; }

  bool same_shape(int w, int h) const noexcept { return width_ == w && height_ == h; }
  template <typename Other>
  bool same_shape(const BinaryRaster<Other> & o) const noexcept
  {
    return width_ == o.width() && height_ == o.height();
  }

  template <typename Other>
  BinaryRaster<Other> retag() const
  {
    return BinaryRaster<Other>(width_, height_, data_);
  }

  friend bool operator==(const BinaryRaster &, const BinaryRaster &) = default;

private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

struct SegmentationTag;
struct MaskTag;

/// Per-pixel MOG output: 1 = foreground.
using SegmentationMap = BinaryRaster<SegmentationTag>;
/// Object mask m of a triplet: 1 = object.
using Mask = BinaryRaster<MaskTag>;

}  // namespace v4r
