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
#include <doctest.h>

#include <algorithm>
#include <array>
#include <map>
#include <queue>
#include <random>
#include <vector>

#include "support/check.hpp"
#include "support/synthetic.hpp"
#include "v4r/mask.hpp"

using namespace v4r;
using v4r::testing::code_of;
using v4r::testing::TempDir;

namespace
{

Mask from_rows(const std::vector<std::string> & rows)
{
  Mask m(static_cast<int>(rows[0].size()), static_cast<int>(rows.size()));
  for (int r = 0; r < m.height(); ++r) {
    for (int c = 0; c < m.width(); ++c) m.set(r, c, rows[r][c] == '#');
  }
  return m;
}

bool subset(const Mask & a, const Mask & b)
{
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] && !b[i]) return false;
  }
  return true;
}

// Direct Chebyshev-ball definitions.
Mask naive_dilate(const Mask & m, int r)
{
  Mask out(m.width(), m.height());
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      bool any = false;
      for (int dy = -r; dy <= r && !any; ++dy) {
        for (int dx = -r; dx <= r && !any; ++dx) {
          const int yy = y + dy, xx = x + dx;
          any = yy >= 0 && yy < m.height() && xx >= 0 && xx < m.width() && m.at(yy, xx);
        }
      }
      out.set(y, x, any);
    }
  }
  return out;
}

Mask naive_erode(const Mask & m, int r)
{
  Mask out(m.width(), m.height());
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) {
      bool all = true;
      for (int dy = -r; dy <= r && all; ++dy) {
        for (int dx = -r; dx <= r && all; ++dx) {
          const int yy = y + dy, xx = x + dx;
          all = yy >= 0 && yy < m.height() && xx >= 0 && xx < m.width() && m.at(yy, xx);
        }
      }
      out.set(y, x, all);
    }
  }
  return out;
}

// Flood the background from the border with 4-connectivity.
Mask naive_fill(const Mask & m)
{
  const int w = m.width(), h = m.height();
  std::vector<char> outside(m.size(), 0);
  std::queue<std::pair<int, int>> q;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if ((y == 0 || x == 0 || y == h - 1 || x == w - 1) && !m.at(y, x)) {
        outside[y * w + x] = 1;
        q.push({y, x});
      }
    }
  }
  while (!q.empty()) {
    auto [y, x] = q.front();
    q.pop();
    const int d[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    for (auto & s : d) {
      const int yy = y + s[0], xx = x + s[1];
      if (yy < 0 || yy >= h || xx < 0 || xx >= w) continue;
      if (m.at(yy, xx) || outside[yy * w + xx]) continue;
      outside[yy * w + xx] = 1;
      q.push({yy, xx});
    }
  }
  Mask out(w, h);
  for (std::size_t i = 0; i < m.size(); ++i) out.set(i, m[i] || !outside[i]);
  return out;
}

}  // namespace

TEST_CASE("dilate examples")
{
  Mask dot(5, 5);
  dot.set(2, 2, 1);
  CHECK(dilate(dot, 1) == from_rows({".....", ".###.", ".###.", ".###.", "....."}));
  CHECK(dilate(Mask(6, 4), 3).count() == 0);
  Mask corner(5, 5);
  corner.set(0, 0, 1);
  CHECK(dilate(corner, 2) == from_rows({"###..", "###..", "###..", ".....", "....."}));
  CHECK(code_of([&] { dilate(dot, 0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("erode examples")
{
  const Mask block = from_rows({".....", ".###.", ".###.", ".###.", "....."});
  Mask centre(5, 5);
  centre.set(2, 2, 1);
  CHECK(erode(block, 1) == centre);
  const Mask full(4, 3, std::vector<std::uint8_t>(12, 1));
  CHECK(erode(full, 1) == from_rows({"....", ".##.", "...."}));
  CHECK(erode(centre, 1).count() == 0);
}

TEST_CASE("morphology agrees with the direct definition on random masks")
{
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 300; ++i) {
    const Mask m = testing::random_mask(rng, 24, 24);
    const int r = 1 + static_cast<int>(rng() % 4);
    const Mask d = dilate(m, r);
    const Mask e = erode(m, r);
    REQUIRE(d == naive_dilate(m, r));
    REQUIRE(e == naive_erode(m, r));
    CHECK(subset(e, m));
    CHECK(subset(m, d));
    CHECK(subset(dilate(e, r), m));
    // Erosion treats the outside as 0, so closing can only be checked away
    // from the border, or on a canvas padded by r.
    const Mask closed = erode(d, r);
    for (int y = r; y < m.height() - r; ++y) {
      for (int x = r; x < m.width() - r; ++x) {
        if (m.at(y, x)) CHECK(closed.at(y, x));
      }
    }
    Mask padded(m.width() + 2 * r, m.height() + 2 * r);
    for (int y = 0; y < m.height(); ++y) {
      for (int x = 0; x < m.width(); ++x) padded.set(y + r, x + r, m.at(y, x));
    }
    CHECK(subset(padded, erode(dilate(padded, r), r)));
  }
}

TEST_CASE("tight box")
{
  Mask two(6, 5);
  two.set(1, 1, 1);
  two.set(3, 4, 1);
  CHECK(tight_box(two) == from_rows({"......", ".####.", ".####.", ".####.", "......"}));
  const Mask rect = from_rows({"....", ".##.", ".##."});
  CHECK(tight_box(rect) == rect);
  Mask one(3, 3);
  one.set(2, 0, 1);
  CHECK(tight_box(one) == one);
  CHECK(code_of([] { tight_box(Mask(3, 3)); }) == ErrorCode::EmptyMask);

  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    const Mask m = testing::random_mask(rng, 20, 20);
    if (m.count() == 0) continue;
    const Mask b = tight_box(m);
    CHECK(subset(m, b));
    CHECK(tight_box(b) == b);
  }
}

TEST_CASE("labelling and hole filling")
{
  const Mask m = from_rows({"##..#", "#...#", "..#..", "....#", "##..#"});
  const Components comp = label_components(m);
  // 8-connectivity joins the diagonal (2,2) to neither corner block.
  REQUIRE(comp.sizes.size() == 6);
  CHECK(comp.labels[0] == 1);
  CHECK(comp.labels[4] == 2);
  CHECK(comp.labels[12] == 3);
  CHECK(comp.sizes[1] == 3);
  CHECK(comp.sizes[2] == 2);
  CHECK(comp.sizes[3] == 1);

  const Mask diag = from_rows({"#..", ".#.", "..#"});
  CHECK(label_components(diag).sizes.size() == 2);

  Mask holed(10, 10, std::vector<std::uint8_t>(100, 1));
  for (int r = 4; r < 6; ++r) {
    for (int c = 4; c < 6; ++c) holed.set(r, c, 0);
  }
  CHECK(fill_holes(holed) == Mask(10, 10, std::vector<std::uint8_t>(100, 1)));
  const Mask notch = from_rows({"#.##", "#..#", "####"});
  CHECK(fill_holes(notch) == notch);

  std::mt19937_64 rng(71);
  for (int i = 0; i < 200; ++i) {
    const Mask r = testing::random_mask(rng, 20, 20);
    CHECK(fill_holes(r) == naive_fill(r));
  }
}

TEST_CASE("cleanup of MOG maps")
{
  SegmentationMap map(30, 30);
  for (int r = 5; r < 15; ++r) {
    for (int c = 5; c < 15; ++c) map.set(r, c, 1);
  }
  for (int c = 25; c < 30; ++c) map.set(27, c, 1);
  map.set(0, 29, 1);
  CleanupConfig cfg;
  Mask want(30, 30);
  for (int r = 5; r < 15; ++r) {
    for (int c = 5; c < 15; ++c) want.set(r, c, 1);
  }
  CHECK(mog_mask_cleanup(map, cfg) == want);
  cfg.open_radius = 0;
  CHECK(mog_mask_cleanup(map, cfg) == want);

  SegmentationMap two(40, 20);
  for (int r = 2; r < 12; ++r) {
    for (int c = 2; c < 12; ++c) two.set(r, c, 1);
    for (int c = 20; c < 29; ++c) two.set(r, c, 1);
  }
  cfg = {};
  cfg.keep = ComponentKeep::AllAboveMin;
  CHECK(mog_mask_cleanup(two, cfg).count() == 190);
  cfg.keep = ComponentKeep::LargestOnly;
  CHECK(mog_mask_cleanup(two, cfg).count() == 100);
  CHECK(code_of([] { mog_mask_cleanup(SegmentationMap(8, 8)); }) == ErrorCode::EmptyMask);

  SegmentationMap ring(20, 20);
  for (int r = 3; r < 17; ++r) {
    for (int c = 3; c < 17; ++c) ring.set(r, c, !(r >= 8 && r < 12 && c >= 8 && c < 12));
  }
  CHECK(mog_mask_cleanup(ring).count() == 196);
}

TEST_CASE("augmentation")
{
  // Large enough that erosion by the widest radius never empties it.
  Mask m(64, 64);
  for (int r = 10; r < 45; ++r) {
    for (int c = 12; c < 50; ++c) m.set(r, c, 1);
  }
  m.set(10, 12, 0);
  m.set(30, 60, 1);
  const AugmentedMask a = augment_mask(m, 12345);
  const AugmentedMask b = augment_mask(m, 12345);
  CHECK(a.mask == b.mask);
  CHECK(a.kind == b.kind);
  CHECK(a.radius == b.radius);

  std::map<AugmentKind, int> counts;
  for (std::uint64_t s = 0; s < 4000; ++s) {
    const AugmentedMask out = augment_mask(m, s);
    ++counts[out.kind];
    switch (out.kind) {
      case AugmentKind::None:
        CHECK(out.mask == m);
        CHECK_FALSE(out.radius.has_value());
        break;
      case AugmentKind::Box:
        CHECK(out.mask == tight_box(m));
        CHECK(subset(m, out.mask));
        CHECK_FALSE(out.radius.has_value());
        break;
      case AugmentKind::Dilate:
        REQUIRE(out.radius.has_value());
        CHECK(*out.radius >= 1);
        CHECK(*out.radius <= 9);
        CHECK(out.mask == dilate(m, *out.radius));
        CHECK(subset(m, out.mask));
        break;
      case AugmentKind::Erode:
        REQUIRE(out.radius.has_value());
        CHECK(out.mask == erode(m, *out.radius));
        CHECK(out.mask.count() > 0);
        break;
    }
  }
  for (auto k : {AugmentKind::None, AugmentKind::Dilate, AugmentKind::Erode, AugmentKind::Box}) {
    CHECK(counts[k] >= 880);
    CHECK(counts[k] <= 1120);
  }

  Mask dot(5, 5);
  dot.set(2, 2, 1);
  int eroded = 0;
  for (std::uint64_t s = 0; s < 200; ++s) {
    const AugmentedMask out = augment_mask(dot, s);
    CHECK(out.kind != AugmentKind::Erode);
    eroded += out.kind == AugmentKind::Erode;
  }
  CHECK(eroded == 0);
  CHECK(code_of([] { augment_mask(Mask(4, 4), 1); }) == ErrorCode::EmptyMask);
  CHECK(code_of([&] { augment_mask(m, 1, AugConfig{3, 2}); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("augment kind names")
{
  for (auto k : {AugmentKind::None, AugmentKind::Dilate, AugmentKind::Erode, AugmentKind::Box}) {
    CHECK(parse_augment_kind(to_string(k)) == k);
  }
  CHECK_FALSE(parse_augment_kind("blur").has_value());
}

TEST_CASE("run-length encoding")
{
  CHECK(rle_encode(Mask(2, 2, {1, 0, 0, 1})).runs == std::vector<std::uint32_t>{0, 1, 2, 1});
  CHECK(rle_encode(Mask(3, 3)).runs == std::vector<std::uint32_t>{9});
  CHECK(rle_encode(Mask(2, 1, {1, 1})).runs == std::vector<std::uint32_t>{0, 2});

  std::mt19937_64 rng(88);
  for (int i = 0; i < 500; ++i) {
    const Mask m = testing::random_mask(rng, 40, 40);
    const RleMask rle = rle_encode(m);
    std::uint64_t total = 0;
    for (std::size_t k = 0; k < rle.runs.size(); ++k) {
      total += rle.runs[k];
      if (k > 0) CHECK(rle.runs[k] > 0);
    }
    CHECK(total == m.size());
    CHECK(rle_decode(rle) == m);
    CHECK(rle_from_json(rle_to_json(rle)) == rle);
  }

  CHECK(code_of([] { rle_decode({2, 2, {1, 2}}); }) == ErrorCode::InvalidRle);
  CHECK(code_of([] { rle_decode({2, 2, {1, 0, 3}}); }) == ErrorCode::InvalidRle);
  CHECK(code_of([] { rle_from_json(nlohmann::ordered_json::parse(R"({"w":2,"h":2})")); }) ==
        ErrorCode::InvalidRle);
  CHECK(code_of([] { rle_from_json(nlohmann::ordered_json::parse(R"({"w":2,"h":2,"runs":[-1,5]})")); }) ==
        ErrorCode::InvalidRle);
  const auto j = rle_to_json({2, 1, {1, 1}});
  CHECK(j.dump() == R"({"w":2,"h":1,"runs":[1,1]})");
}

TEST_CASE("intersection over union")
{
  const Mask a = from_rows({"##", ".."});
  const Mask b = from_rows({".#", ".#"});
  CHECK(mask_iou(a, b) == doctest::Approx(1.0 / 3.0));
  CHECK(mask_iou(a, a) == 1.0);
  CHECK(mask_iou(a, from_rows({"..", "##"})) == 0.0);
  CHECK(mask_iou(Mask(3, 3), Mask(3, 3)) == 1.0);
  CHECK(code_of([&] { mask_iou(a, Mask(3, 2)); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("mask files")
{
  TempDir dir;
  std::mt19937_64 rng(3);
  const Mask m = testing::random_mask(rng, 30, 30);
  save_mask(m, dir / "m.png");
  CHECK(load_mask(dir / "m.png") == m);
  const auto box = bounding_box(from_rows({"....", ".#..", "...#"}));
  REQUIRE(box.has_value());
  CHECK(box->row0 == 1);
  CHECK(box->col0 == 1);
  CHECK(box->row1 == 2);
  CHECK(box->col1 == 3);
  CHECK_FALSE(bounding_box(Mask(2, 2)).has_value());
}
