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
#include "v4r/mask.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <random>

#include "v4r/imaging.hpp"

namespace v4r
{

namespace
{

void check_radius(int radius, const char * op)
{
  if (radius < 1) {
    throw Error(ErrorCode::InvalidArgument, std::string(op) + ": radius must be >= 1");
  }
}

// One separable pass of a square window. Each output sample counts the ones
// within +-radius along the line; dilation needs any, erosion needs the full
// window inside the canvas.
enum class Morph { Dilate, Erode };

std::vector<std::uint8_t> morph_pass(
  const std::vector<std::uint8_t> & in, int width, int height, int radius, bool horizontal,
  Morph op)
{
  std::vector<std::uint8_t> out(in.size(), 0);
  const int lines = horizontal ? height : width;
  const int len = horizontal ? width : height;
  const int window = 2 * radius + 1;
  std::vector<int> prefix(len + 1);
  for (int line = 0; line < lines; ++line) {
    auto idx = [&](int k) {
      return horizontal ? static_cast<std::size_t>(line) * width + k
                        : static_cast<std::size_t>(k) * width + line;
    };
    prefix[0] = 0;
    for (int k = 0; k < len; ++k) prefix[k + 1] = prefix[k] + in[idx(k)];
    for (int k = 0; k < len; ++k) {
      const int lo = std::max(0, k - radius);
      const int hi = std::min(len - 1, k + radius);
      const int ones = prefix[hi + 1] - prefix[lo];
      out[idx(k)] = op == Morph::Dilate ? (ones > 0) : (ones == window);
    }
  }
  return out;
}

Mask morph(const Mask & mask, int radius, Morph op)
{
  auto rows = morph_pass(mask.data(), mask.width(), mask.height(), radius, true, op);
  auto both = morph_pass(rows, mask.width(), mask.height(), radius, false, op);
  return Mask(mask.width(), mask.height(), std::move(both));
}

}  // namespace

Mask dilate(const Mask & mask, int radius)
{
  check_radius(radius, "dilate");
  return morph(mask, radius, Morph::Dilate);
}

Mask erode(const Mask & mask, int radius)
{
  check_radius(radius, "erode");
  return morph(mask, radius, Morph::Erode);
}

std::optional<BoundingBox> bounding_box(const Mask & mask)
{
  BoundingBox box{mask.height(), mask.width(), -1, -1};
  for (int r = 0; r < mask.height(); ++r) {
    for (int c = 0; c < mask.width(); ++c) {
      if (!mask.at(r, c)) continue;
      box.row0 = std::min(box.row0, r);
      box.col0 = std::min(box.col0, c);
      box.row1 = std::max(box.row1, r);
      box.col1 = std::max(box.col1, c);
    }
  }
  if (box.row1 < 0) return std::nullopt;
  return box;
}

Mask tight_box(const Mask & mask)
{
  const auto box = bounding_box(mask);
  if (!box) throw Error(ErrorCode::EmptyMask, "tight_box: mask has no foreground");
  Mask out(mask.width(), mask.height());
  for (int r = box->row0; r <= box->row1; ++r) {
    for (int c = box->col0; c <= box->col1; ++c) out.set(r, c, 1);
  }
  return out;
}

Components label_components(const Mask & mask)
{
  const int w = mask.width();
  const int h = mask.height();
  Components out;
  out.labels.assign(mask.size(), 0);
  out.sizes.assign(1, 0);
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < mask.size(); ++start) {
    if (!mask[start] || out.labels[start]) continue;
    const auto label = static_cast<std::int32_t>(out.sizes.size());
    std::size_t count = 0;
    stack.push_back(start);
    out.labels[start] = label;
    while (!stack.empty()) {
      const std::size_t p = stack.back();
      stack.pop_back();
      ++count;
      const int r = static_cast<int>(p / w);
      const int c = static_cast<int>(p % w);
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          const int rr = r + dr;
          const int cc = c + dc;
          if (rr < 0 || rr >= h || cc < 0 || cc >= w) continue;
          const std::size_t q = static_cast<std::size_t>(rr) * w + cc;
          if (mask[q] && !out.labels[q]) {
            out.labels[q] = label;
            stack.push_back(q);
          }
        }
      }
    }
    out.sizes.push_back(count);
  }
  return out;
}

Mask fill_holes(const Mask & mask)
{
  const int w = mask.width();
  const int h = mask.height();
  // Flood the background from the border; whatever is not reached is a hole.
  std::vector<std::uint8_t> outside(mask.size(), 0);
  std::deque<std::size_t> queue;
  auto seed = [&](int r, int c) {
    const std::size_t p = static_cast<std::size_t>(r) * w + c;
    if (!mask[p] && !outside[p]) {
      outside[p] = 1;
      queue.push_back(p);
    }
  };
  for (int c = 0; c < w; ++c) {
    seed(0, c);
    seed(h - 1, c);
  }
  for (int r = 0; r < h; ++r) {
    seed(r, 0);
    seed(r, w - 1);
  }
  while (!queue.empty()) {
    const std::size_t p = queue.front();
    queue.pop_front();
    const int r = static_cast<int>(p / w);
    const int c = static_cast<int>(p % w);
    if (r > 0) seed(r - 1, c);
    if (r + 1 < h) seed(r + 1, c);
    if (c > 0) seed(r, c - 1);
    if (c + 1 < w) seed(r, c + 1);
  }
  std::vector<std::uint8_t> data(mask.size());
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = outside[i] ? 0 : 1;
  return Mask(w, h, std::move(data));
}

Mask mog_mask_cleanup(const SegmentationMap & map, const CleanupConfig & cfg)
{
  if (cfg.open_radius < 0) throw Error(ErrorCode::InvalidArgument, "open_radius must be >= 0");
  Mask mask = map.retag<MaskTag>();
  if (cfg.open_radius > 0) mask = dilate(erode(mask, cfg.open_radius), cfg.open_radius);

  const Components comps = label_components(mask);
  const auto min_px = static_cast<std::size_t>(std::max(cfg.min_component_px, 0));
  std::vector<std::uint8_t> keep(comps.sizes.size(), 0);
  bool any = false;
  if (cfg.keep == ComponentKeep::LargestOnly) {
    std::size_t best = 0;
    for (std::size_t l = 1; l < comps.sizes.size(); ++l) {
      if (comps.sizes[l] >= min_px && (best == 0 || comps.sizes[l] > comps.sizes[best])) best = l;
    }
    if (best) {
      keep[best] = 1;
      any = true;
    }
  } else {
    for (std::size_t l = 1; l < comps.sizes.size(); ++l) {
      if (comps.sizes[l] >= min_px) {
        keep[l] = 1;
        any = true;
      }
    }
  }
  if (!any) throw Error(ErrorCode::EmptyMask, "mog_mask_cleanup: no component survives filtering");

  std::vector<std::uint8_t> data(mask.size());
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = keep[comps.labels[i]];
  Mask out(mask.width(), mask.height(), std::move(data));
  if (cfg.fill_holes) out = fill_holes(out);
  return out;
}

const char * to_string(AugmentKind kind) noexcept
{
  switch (kind) {
    case AugmentKind::None: return "none";
    case AugmentKind::Dilate: return "dilate";
    case AugmentKind::Erode: return "erode";
    case AugmentKind::Box: return "box";
  }
  return "none";
}

std::optional<AugmentKind> parse_augment_kind(const std::string & name)
{
  if (name == "none") return AugmentKind::None;
  if (name == "dilate") return AugmentKind::Dilate;
  if (name == "erode") return AugmentKind::Erode;
  if (name == "box") return AugmentKind::Box;
  return std::nullopt;
}

namespace
{

// Rejection sampling on raw mt19937_64 output: std::uniform_int_distribution
// is implementation-defined, this is not.
std::uint64_t draw_below(std::mt19937_64 & engine, std::uint64_t bound)
{
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t v;
  do {
    v = engine();
  } while (v >= limit);
  return v % bound;
}

}  // namespace

AugmentedMask augment_mask(const Mask & mask, std::uint64_t seed, const AugConfig & cfg)
{
  if (cfg.radius_min < 1 || cfg.radius_max < cfg.radius_min) {
    throw Error(ErrorCode::InvalidArgument, "augment_mask: radius range must satisfy 1 <= min <= max");
  }
  if (mask.empty_foreground()) throw Error(ErrorCode::EmptyMask, "augment_mask: empty input mask");

  std::mt19937_64 engine(seed);
  const auto kind = static_cast<AugmentKind>(draw_below(engine, 4));
  const int span = cfg.radius_max - cfg.radius_min + 1;

  switch (kind) {
    case AugmentKind::None:
      return {mask, AugmentKind::None, std::nullopt};
    case AugmentKind::Box:
      return {tight_box(mask), AugmentKind::Box, std::nullopt};
    case AugmentKind::Dilate: {
      const int r = cfg.radius_min + static_cast<int>(draw_below(engine, span));
      return {dilate(mask, r), AugmentKind::Dilate, r};
    }
    case AugmentKind::Erode: {
      const int r = cfg.radius_min + static_cast<int>(draw_below(engine, span));
      Mask eroded = erode(mask, r);
      if (eroded.empty_foreground()) return {mask, AugmentKind::None, std::nullopt};
      return {std::move(eroded), AugmentKind::Erode, r};
    }
  }
  return {mask, AugmentKind::None, std::nullopt};
}

RleMask rle_encode(const Mask & mask)
{
  RleMask rle{mask.width(), mask.height(), {}};
  std::uint8_t current = 0;
  std::uint32_t run = 0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i] != current) {
      rle.runs.push_back(run);
      run = 0;
      current = mask[i];
    }
    ++run;
  }
  rle.runs.push_back(run);
  return rle;
}

Mask rle_decode(const RleMask & rle)
{
  if (rle.width < 1 || rle.height < 1) {
    throw Error(ErrorCode::InvalidRle, "rle: dimensions must be positive");
  }
  const std::size_t area = static_cast<std::size_t>(rle.width) * rle.height;
  std::size_t total = 0;
  for (std::size_t i = 0; i < rle.runs.size(); ++i) {
    if (rle.runs[i] == 0 && i != 0) {
      throw Error(ErrorCode::InvalidRle, "rle: zero-length run at position " + std::to_string(i));
    }
    total += rle.runs[i];
  }
  if (total != area) {
    throw Error(
      ErrorCode::InvalidRle,
      "rle: runs sum to " + std::to_string(total) + ", expected " + std::to_string(area));
  }
  std::vector<std::uint8_t> data;
  data.reserve(area);
  std::uint8_t value = 0;
  for (auto run : rle.runs) {
    data.insert(data.end(), run, value);
    value ^= 1;
  }
  return Mask(rle.width, rle.height, std::move(data));
}

nlohmann::ordered_json rle_to_json(const RleMask & rle)
{
  nlohmann::ordered_json j;
  j["w"] = rle.width;
  j["h"] = rle.height;
  j["runs"] = rle.runs;
  return j;
}

RleMask rle_from_json(const nlohmann::ordered_json & j)
{
  RleMask rle;
  try {
    rle.width = j.at("w").get<int>();
    rle.height = j.at("h").get<int>();
    for (const auto & v : j.at("runs")) {
      if (!v.is_number_integer() || v.get<long long>() < 0) {
        throw Error(ErrorCode::InvalidRle, "rle: runs must be non-negative integers");
      }
      rle.runs.push_back(v.get<std::uint32_t>());
    }
  } catch (const nlohmann::json::exception & e) {
    throw Error(ErrorCode::InvalidRle, std::string("rle: ") + e.what());
  }
  return rle;
}

double mask_iou(const Mask & a, const Mask & b)
{
  if (!a.same_shape(b)) throw Error(ErrorCode::DimensionMismatch, "mask_iou: size mismatch");
  std::size_t inter = 0;
  std::size_t uni = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    inter += a[i] & b[i];
    uni += a[i] | b[i];
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

Mask load_mask(const std::filesystem::path & path)
{
  const Frame frame = load_image(path);
  std::vector<std::uint8_t> data(frame.pixel_count());
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = frame.data()[3 * i] >= 128 ? 1 : 0;
  return Mask(frame.width(), frame.height(), std::move(data));
}

void save_mask(const Mask & mask, const std::filesystem::path & path)
{
  std::vector<std::uint8_t> data(mask.size());
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = mask[i] ? 255 : 0;
  save_gray_png(GrayFrame(mask.width(), mask.height(), std::move(data)), path);
}

}  // namespace v4r
