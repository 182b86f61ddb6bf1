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

#include <cmath>
#include <fstream>
#include <limits>
#include <random>

#include "support/check.hpp"
#include "support/synthetic.hpp"
#include "v4r/metrics.hpp"

using namespace v4r;
using v4r::testing::code_of;
using v4r::testing::TempDir;

namespace
{

EmbeddingSet random_set(std::mt19937_64 & rng, std::size_t n, std::size_t d, double spread = 1.0, double shift = 0.0)
{
  std::normal_distribution<double> g(shift, spread);
  std::vector<std::vector<double>> rows(n, std::vector<double>(d));
  for (auto & r : rows) {
    for (auto & v : r) v = g(rng);
  }
  return make_embedding_set(d, rows);
}

GaussianStats diagonal_stats(std::vector<double> mean, const std::vector<double> & var)
{
  GaussianStats s{std::move(mean), SquareMatrix(var.size())};
  for (std::size_t k = 0; k < var.size(); ++k) s.covariance(k, k) = var[k];
  return s;
}

double naive_mmd(const EmbeddingSet & x, const EmbeddingSet & y, double sigma, double scale)
{
  auto k = [&](std::span<const double> u, std::span<const double> v) {
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += (u[i] - v[i]) * (u[i] - v[i]);
    return std::exp(-s * (1.0 / (2.0 * sigma * sigma)));
  };
  const double m = static_cast<double>(x.count), n = static_cast<double>(y.count);
  double a = 0, b = 0, c = 0;
  for (std::size_t i = 0; i < x.count; ++i) {
    for (std::size_t j = 0; j < x.count; ++j) {
      if (i != j) a += k(x.row(i), x.row(j));
    }
  }
  for (std::size_t i = 0; i < y.count; ++i) {
    for (std::size_t j = 0; j < y.count; ++j) {
      if (i != j) b += k(y.row(i), y.row(j));
    }
  }
  for (std::size_t i = 0; i < x.count; ++i) {
    for (std::size_t j = 0; j < y.count; ++j) c += k(x.row(i), y.row(j));
  }
  return scale * (a / (m * (m - 1.0)) + b / (n * (n - 1.0)) - 2.0 * c / (m * n));
}

// Independent bilinear resampler for the builtin embedding.
std::vector<double> reference_embed(const Frame & f)
{
  const int w = f.width(), h = f.height();
  auto luma = [&](int r, int c) {
    const auto * p = f.pixel(r, c);
    return 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
  };
  auto src = [](int i, int extent) {
    return std::min(std::max((i + 0.5) * extent / 16.0 - 0.5, 0.0), extent - 1.0);
  };
  std::vector<double> v;
  for (int i = 0; i < 16; ++i) {
    const double sy = src(i, h);
    const int y0 = static_cast<int>(sy), y1 = std::min(y0 + 1, h - 1);
    for (int j = 0; j < 16; ++j) {
      const double sx = src(j, w);
      const int x0 = static_cast<int>(sx), x1 = std::min(x0 + 1, w - 1);
      const double fy = sy - y0, fx = sx - x0;
      v.push_back(luma(y0, x0) * (1 - fx) * (1 - fy) + luma(y0, x1) * fx * (1 - fy) +
                  luma(y1, x0) * (1 - fx) * fy + luma(y1, x1) * fx * fy);
    }
  }
  double mean = 0;
  for (double x : v) mean += x;
  mean /= v.size();
  double norm = 0;
  for (double & x : v) {
    x -= mean;
    norm += x * x;
  }
  norm = std::sqrt(norm);
  for (double & x : v) x = norm > 0 ? x / norm : 0.0;
  return v;
}

void write_pairs(const std::filesystem::path & pred, const std::filesystem::path & gt, int n, bool noisy,
                 std::uint64_t seed)
{
  std::filesystem::create_directories(pred);
  std::filesystem::create_directories(gt);
  std::mt19937_64 rng(seed);
  for (int i = 0; i < n; ++i) {
    Frame g = testing::random_frame(rng, 24, 18);
    for (auto & v : g.data()) v = static_cast<std::uint8_t>(std::clamp<int>(v, 1, 254));
    Frame p = g;
    if (noisy) {
      for (std::size_t k = 0; k < p.data().size(); ++k) p.data()[k] += (k % 2) ? 1 : -1;
    }
    char name[32];
    std::snprintf(name, sizeof(name), "img_%03d.png", i);
    save_image(g, gt / name);
    save_image(p, pred / name);
  }
}

}  // namespace

TEST_CASE("psnr closed forms")
{
  const Frame black(1, 1, {0, 0, 0});
  CHECK(std::isinf(psnr(black, black)));
  CHECK(psnr(black, Frame(1, 1, {255, 255, 255})) == doctest::Approx(0.0));
  std::mt19937_64 rng(1);
  Frame a = testing::random_frame(rng, 10, 10);
  for (auto & v : a.data()) v = static_cast<std::uint8_t>(std::min<int>(v, 254));
  Frame b = a;
  for (auto & v : b.data()) ++v;
  CHECK(psnr(a, b) == doctest::Approx(20.0 * std::log10(255.0)).epsilon(1e-12));
  CHECK(psnr(a, b) == doctest::Approx(48.1308).epsilon(1e-6));
  CHECK(code_of([&] { psnr(a, Frame(3, 3)); }) == ErrorCode::DimensionMismatch);

  Frame c = a;
  c.pixel(0, 0)[0] ^= 0x40;
  const double region = psnr_region(a, c, BoundingBox{0, 0, 1, 1});
  CHECK(region == doctest::Approx(10.0 * std::log10(255.0 * 255.0 / (64.0 * 64.0 / 12.0))));
  CHECK(std::isinf(psnr_region(a, c, BoundingBox{2, 2, 5, 5})));
}

TEST_CASE("mean and covariance")
{
  const GaussianStats s = mean_cov(make_embedding_set(2, {{0, 0}, {2, 0}}));
  CHECK(s.mean == std::vector<double>{1, 0});
  CHECK(s.covariance(0, 0) == 2.0);
  CHECK(s.covariance(0, 1) == 0.0);
  CHECK(s.covariance(1, 1) == 0.0);
  const GaussianStats z = mean_cov(make_embedding_set(3, {{1, 2, 3}, {1, 2, 3}, {1, 2, 3}}));
  for (double v : z.covariance.values()) CHECK(v == 0.0);
  CHECK(code_of([] { mean_cov(make_embedding_set(2, {{1, 1}})); }) == ErrorCode::TooFewSamples);

  std::mt19937_64 rng(5);
  const EmbeddingSet e = random_set(rng, 30, 4);
  const GaussianStats g = mean_cov(e);
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t c = 0; c < 4; ++c) {
      double acc = 0;
      for (std::size_t i = 0; i < 30; ++i) acc += (e.row(i)[r] - g.mean[r]) * (e.row(i)[c] - g.mean[c]);
      CHECK(g.covariance(r, c) == doctest::Approx(acc / 29.0).epsilon(1e-12));
      CHECK(g.covariance(r, c) == g.covariance(c, r));
    }
  }
}

TEST_CASE("Frechet distance")
{
  CHECK(frechet_distance(diagonal_stats({0}, {1}), diagonal_stats({1}, {4})) == doctest::Approx(2.0).epsilon(1e-12));

  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.1, 5.0);
  for (int t = 0; t < 20; ++t) {
    const std::size_t d = 1 + rng() % 12;
    std::vector<double> ma(d), mb(d), va(d), vb(d);
    double want = 0;
    for (std::size_t k = 0; k < d; ++k) {
      ma[k] = u(rng) - 2.5;
      mb[k] = u(rng) - 2.5;
      va[k] = u(rng);
      vb[k] = u(rng);
      want += (ma[k] - mb[k]) * (ma[k] - mb[k]) + std::pow(std::sqrt(va[k]) - std::sqrt(vb[k]), 2);
    }
    const double got = frechet_distance(diagonal_stats(ma, va), diagonal_stats(mb, vb));
    CHECK(got == doctest::Approx(want).epsilon(1e-8));
  }

  const GaussianStats a = mean_cov(random_set(rng, 40, 6));
  const GaussianStats b = mean_cov(random_set(rng, 40, 6, 2.0, 0.5));
  CHECK(std::abs(frechet_distance(a, a)) < 1e-6);
  CHECK(std::abs(frechet_distance(a, b) - frechet_distance(b, a)) < 1e-9);
  CHECK(frechet_distance(a, b) > 0.5);
  CHECK(code_of([&] { frechet_distance(a, diagonal_stats({0}, {1})); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("Frechet distance is translation invariant")
{
  std::mt19937_64 rng(7);
  EmbeddingSet x = random_set(rng, 25, 5);
  EmbeddingSet y = random_set(rng, 25, 5, 1.5);
  const double before = frechet_distance(mean_cov(x), mean_cov(y));
  const double shift[5] = {3, -1, 0.5, 10, -7};
  for (auto * s : {&x, &y}) {
    for (std::size_t i = 0; i < s->count; ++i) {
      for (std::size_t k = 0; k < 5; ++k) s->data[i * 5 + k] += shift[k];
    }
  }
  CHECK(frechet_distance(mean_cov(x), mean_cov(y)) == doctest::Approx(before).epsilon(1e-9));
}

TEST_CASE("MMD")
{
  const EmbeddingSet aa = make_embedding_set(2, {{1, 2}, {1, 2}});
  CHECK(mmd2(aa, aa) == 0.0);
  // k(0,b) = 0.5 when |b|^2 = 2 sigma^2 ln 2.
  const double b = std::sqrt(2.0 * 100.0 * std::log(2.0));
  const EmbeddingSet zeros = make_embedding_set(1, {{0}, {0}});
  const EmbeddingSet bs = make_embedding_set(1, {{b}, {b}});
  CHECK(mmd2(zeros, bs) == doctest::Approx(1000.0).epsilon(1e-12));

  std::mt19937_64 rng(8);
  for (int t = 0; t < 10; ++t) {
    const EmbeddingSet x = random_set(rng, 2 + rng() % 49, 7, 4.0);
    const EmbeddingSet y = random_set(rng, 2 + rng() % 49, 7, 4.0, 1.0);
    CHECK(mmd2(x, y) == naive_mmd(x, y, 10.0, 1000.0));
    CHECK(mmd2(x, y, 3.0, 1.0) == naive_mmd(x, y, 3.0, 1.0));
    CHECK(mmd2(x, y) == doctest::Approx(mmd2(y, x)).epsilon(1e-12));
  }
  CHECK(code_of([&] { mmd2(make_embedding_set(1, {{0}}), bs); }) == ErrorCode::TooFewSamples);
  CHECK(code_of([&] { mmd2(aa, bs); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("paired embedding distance")
{
  const EmbeddingSet x = make_embedding_set(2, {{1, 0}, {0, 1}});
  CHECK(paired_embedding_distance(x, x) == doctest::Approx(0.0).scale(1e-9));
  CHECK(paired_embedding_distance(x, make_embedding_set(2, {{-1, 0}, {0, -1}})) == doctest::Approx(2.0));
  CHECK(paired_embedding_distance(x, make_embedding_set(2, {{0, 1}, {1, 0}})) == doctest::Approx(1.0));
  CHECK(paired_embedding_distance(x, make_embedding_set(2, {{0, 0}, {0, 3}})) == doctest::Approx(0.5));
  CHECK(code_of([&] { paired_embedding_distance(x, make_embedding_set(2, {{1, 0}})); }) == ErrorCode::CountMismatch);
  CHECK(code_of([&] { paired_embedding_distance(x, make_embedding_set(1, {{1}, {1}})); }) ==
        ErrorCode::DimensionMismatch);
}

TEST_CASE("builtin embedding")
{
  const Frame flat(40, 30, std::vector<std::uint8_t>(40 * 30 * 3, 77));
  for (double v : builtin_embed(flat)) CHECK(v == 0.0);

  std::mt19937_64 rng(9);
  for (auto [w, h] : {std::pair{40, 30}, std::pair{7, 5}, std::pair{16, 16}, std::pair{100, 3}}) {
    const Frame f = testing::random_frame(rng, w, h);
    const auto e = builtin_embed(f);
    REQUIRE(e.size() == kBuiltinDim);
    double norm = 0;
    for (double v : e) norm += v * v;
    CHECK(std::abs(std::sqrt(norm) - 1.0) < 1e-9);
    const auto ref = reference_embed(f);
    for (std::size_t k = 0; k < kBuiltinDim; ++k) CHECK(e[k] == doctest::Approx(ref[k]).scale(1.0).epsilon(1e-12));

    Frame inv = f;
    for (auto & v : inv.data()) v = static_cast<std::uint8_t>(255 - v);
    const auto ei = builtin_embed(inv);
    for (std::size_t k = 0; k < kBuiltinDim; ++k) CHECK(ei[k] == doctest::Approx(-e[k]).scale(1.0).epsilon(1e-9));
  }
}

TEST_CASE("embedding files round trip")
{
  TempDir dir;
  std::mt19937_64 rng(10);
  EmbeddingSet s = random_set(rng, 5, 3);
  for (auto & v : s.data) v = static_cast<float>(v);  // stored as float32
  s.sources = {"a.png", "b.png", "c d.png", "e.png", "f.png"};
  write_embeddings(s, dir / "e.emb");
  const EmbeddingSet back = read_embeddings(dir / "e.emb");
  CHECK(back.count == 5);
  CHECK(back.dim == 3);
  CHECK(back.data == s.data);
  CHECK(back.sources == s.sources);

  std::ifstream in(dir / "e.emb", std::ios::binary);
  char head[12];
  in.read(head, 12);
  CHECK(std::string(head, 4) == "EMB1");
  CHECK(static_cast<unsigned char>(head[4]) == 5);
  CHECK(static_cast<unsigned char>(head[8]) == 3);
  CHECK(std::filesystem::file_size(dir / "e.emb") == 12 + 5 * 3 * 4 + 6 * 4 + 8);

  std::ofstream(dir / "bad.emb") << "EMB2xxxxxxxx";
  CHECK(code_of([&] { read_embeddings(dir / "bad.emb"); }) == ErrorCode::Decode);
  CHECK(code_of([] { make_embedding_set(2, {{1, std::numeric_limits<double>::quiet_NaN()}}).validate(); }) ==
        ErrorCode::InvalidArgument);
}

TEST_CASE("evaluate over directories")
{
  TempDir dir;
  write_pairs(dir / "same_p", dir / "same_g", 6, false, 1);
  EvalOptions same{dir / "same_p", dir / "same_g"};
  const MetricReport r = evaluate(same);
  CHECK(std::isinf(*r.get("psnr")));
  CHECK(std::abs(*r.get("fid")) < 1e-6);
  // The unbiased estimator on two copies of one set is scale * 2 (k_off - 1) / n,
  // with k_off the mean off-diagonal kernel value: slightly negative, not 0.
  std::vector<std::filesystem::path> same_paths;
  for (const auto & name : list_images(dir / "same_p")) same_paths.push_back(dir / "same_p" / name);
  const EmbeddingSet emb = embed_builtin(same_paths);
  CHECK(*r.get("cmmd") == naive_mmd(emb, emb, 10.0, 1000.0));
  CHECK(*r.get("cmmd") <= 0.0);
  CHECK(*r.get("cmmd") >= -2.0 * 1000.0 / 6.0);
  CHECK(std::abs(*r.get("dino")) < 1e-9);
  CHECK(r.to_json().at("psnr") == "inf");
  CHECK(r.to_json().at("provenance").at("embedder") == "builtin");

  write_pairs(dir / "n_p", dir / "n_g", 6, true, 2);
  const MetricReport n = evaluate(EvalOptions{dir / "n_p", dir / "n_g"});
  CHECK(*n.get("psnr") == doctest::Approx(48.1308).epsilon(1e-5));
  CHECK(std::isfinite(*n.get("fid")));
  CHECK(std::isfinite(*n.get("cmmd")));

  std::filesystem::create_directories(dir / "masks");
  Mask m(24, 18);
  for (int r0 = 2; r0 < 6; ++r0) m.set(r0, 3, 1);
  for (const auto & name : list_images(dir / "n_p")) save_mask(m, dir / "masks" / name);
  EvalOptions masked{dir / "n_p", dir / "n_g", dir / "masks"};
  const MetricReport mr = evaluate(masked);
  REQUIRE(mr.get("psnr_masked").has_value());
  CHECK(*mr.get("psnr_masked") == doctest::Approx(48.1308).epsilon(1e-5));

  std::filesystem::remove(dir / "n_g" / "img_003.png");
  try {
    evaluate(EvalOptions{dir / "n_p", dir / "n_g"});
    FAIL("expected AlignmentError");
  } catch (const Error & e) {
    CHECK(e.code() == ErrorCode::Alignment);
    CHECK(std::string(e.what()).find("img_003.png") != std::string::npos);
  }
}

TEST_CASE("custom embedder is used per space")
{
  TempDir dir;
  write_pairs(dir / "p", dir / "g", 4, true, 3);
  std::vector<EmbeddingSpace> seen;
  EvalOptions opt{dir / "p", dir / "g"};
  opt.embedder_id = "test";
  opt.embed = [&](const std::vector<std::filesystem::path> & images, EmbeddingSpace space) {
    seen.push_back(space);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < images.size(); ++i) rows.push_back({double(i), 1.0});
    return make_embedding_set(2, rows);
  };
  const MetricReport r = evaluate(opt);
  CHECK(seen.size() == 6);
  CHECK(*r.get("dino") == doctest::Approx(0.0).scale(1e-12));
  CHECK(r.provenance.at("embedder") == "test");
}
