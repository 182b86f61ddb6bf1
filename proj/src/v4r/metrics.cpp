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
#include "v4r/metrics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <set>

#include "v4r/error.hpp"

namespace v4r
{

namespace fs = std::filesystem;

void EmbeddingSet::validate() const
{
  if (count < 1 || dim < 1) throw Error(ErrorCode::InvalidArgument, "embedding set must be non-empty");
  if (data.size() != count * dim) {
    throw Error(ErrorCode::InvalidArgument, "embedding data length must equal count*dim");
  }
  if (!sources.empty() && sources.size() != count) {
    throw Error(ErrorCode::InvalidArgument, "embedding sources must align with rows");
  }
  for (double v : data) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "embedding contains NaN/Inf");
  }
}

EmbeddingSet make_embedding_set(
  std::size_t dim, std::vector<std::vector<double>> rows, std::vector<std::string> sources)
{
  EmbeddingSet set;
  set.count = rows.size();
  set.dim = dim;
  set.data.reserve(rows.size() * dim);
  for (const auto & r : rows) {
    if (r.size() != dim) throw Error(ErrorCode::DimensionMismatch, "embedding row has wrong length");
    set.data.insert(set.data.end(), r.begin(), r.end());
  }
  set.sources = std::move(sources);
  set.validate();
  return set;
}

namespace
{

constexpr char kEmbMagic[4] = {'E', 'M', 'B', '1'};

void put_u32(std::ostream & out, std::uint32_t v)
{
  const unsigned char b[4] = {
    static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
    static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char *>(b), 4);
}

std::uint32_t get_u32(std::istream & in)
{
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char *>(b), 4)) {
    throw Error(ErrorCode::Decode, "embedding file truncated");
  }
  return static_cast<std::uint32_t>(b[0]) | static_cast<std::uint32_t>(b[1]) << 8 |
         static_cast<std::uint32_t>(b[2]) << 16 | static_cast<std::uint32_t>(b[3]) << 24;
}

std::size_t check_same_dim(const EmbeddingSet & x, const EmbeddingSet & y, const char * op)
{
  if (x.dim != y.dim) {
    throw Error(ErrorCode::DimensionMismatch, std::string(op) + ": embedding dimensions differ");
  }
  return x.dim;
}

double squared_distance(std::span<const double> u, std::span<const double> v)
{
  double s = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double d = u[k] - v[k];
    s += d * d;
  }
  return s;
}

}  // namespace

void write_embeddings(const EmbeddingSet & set, const fs::path & path)
{
  set.validate();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out.write(kEmbMagic, 4);
  put_u32(out, static_cast<std::uint32_t>(set.count));
  put_u32(out, static_cast<std::uint32_t>(set.dim));
  for (double v : set.data) put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  for (std::size_t i = 0; i < set.count; ++i) {
    const std::string & s = set.sources.empty() ? std::string() : set.sources[i];
    out << s << '\n';
  }
  if (!out) throw Error(ErrorCode::Io, "write failed: " + path.string());
}

EmbeddingSet read_embeddings(const fs::path & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kEmbMagic, 4) != 0) {
    throw Error(ErrorCode::Decode, path.string() + ": bad embedding magic");
  }
  EmbeddingSet set;
  set.count = get_u32(in);
  set.dim = get_u32(in);
  set.data.resize(set.count * set.dim);
  for (auto & v : set.data) v = std::bit_cast<float>(get_u32(in));
  for (std::size_t i = 0; i < set.count; ++i) {
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::Decode, "embedding file: missing source paths");
    set.sources.push_back(line);
  }
  set.validate();
  return set;
}

double psnr(const Frame & a, const Frame & b, double max_value)
{
  const double mse = frame_mse(a, b);
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(max_value * max_value / mse);
}

double psnr_region(const Frame & a, const Frame & b, const BoundingBox & box, double max_value)
{
  if (!a.same_shape(b)) throw Error(ErrorCode::DimensionMismatch, "psnr: frames differ in size");
  std::uint64_t acc = 0;
  std::uint64_t n = 0;
  for (int r = box.row0; r <= box.row1; ++r) {
    for (int c = box.col0; c <= box.col1; ++c) {
      const auto * pa = a.pixel(r, c);
      const auto * pb = b.pixel(r, c);
      for (int ch = 0; ch < 3; ++ch) {
        const int d = static_cast<int>(pa[ch]) - pb[ch];
        acc += static_cast<std::uint64_t>(d * d);
      }
      n += 3;
    }
  }
  if (acc == 0) return std::numeric_limits<double>::infinity();
  const double mse = static_cast<double>(acc) / static_cast<double>(n);
  return 10.0 * std::log10(max_value * max_value / mse);
}

std::vector<double> builtin_embed(const Frame & frame)
{
  const std::vector<double> luma = luma_values(frame);
  const int w = frame.width();
  const int h = frame.height();
  auto coord = [](std::size_t i, int extent, int & lo, int & hi, double & frac) {
    double s = (static_cast<double>(i) + 0.5) * extent / static_cast<double>(kBuiltinGrid) - 0.5;
    s = std::clamp(s, 0.0, static_cast<double>(extent - 1));
    lo = static_cast<int>(std::floor(s));
    hi = std::min(lo + 1, extent - 1);
    frac = s - lo;
  };
  auto at = [&](int r, int c) { return luma[static_cast<std::size_t>(r) * w + c]; };

  std::vector<double> out(kBuiltinDim);
  for (std::size_t i = 0; i < kBuiltinGrid; ++i) {
    int y0, y1;
    double fy;
    coord(i, h, y0, y1, fy);
    for (std::size_t j = 0; j < kBuiltinGrid; ++j) {
      int x0, x1;
      double fx;
      coord(j, w, x0, x1, fx);
      const double top = (1.0 - fx) * at(y0, x0) + fx * at(y0, x1);
      const double bottom = (1.0 - fx) * at(y1, x0) + fx * at(y1, x1);
      out[i * kBuiltinGrid + j] = (1.0 - fy) * top + fy * bottom;
    }
  }

  const bool constant = std::all_of(out.begin(), out.end(), [&](double v) { return v == out[0]; });
  if (constant) return std::vector<double>(kBuiltinDim, 0.0);
  double mean = 0.0;
  for (double v : out) mean += v;
  mean /= static_cast<double>(kBuiltinDim);
  double norm = 0.0;
  for (double & v : out) {
    v -= mean;
    norm += v * v;
  }
  norm = std::sqrt(norm);
  if (norm < 1e-9) return std::vector<double>(kBuiltinDim, 0.0);
  for (double & v : out) v /= norm;
  return out;
}

GaussianStats mean_cov(const EmbeddingSet & set)
{
  set.validate();
  if (set.count < 2) throw Error(ErrorCode::TooFewSamples, "mean_cov: need at least 2 samples");
  const std::size_t n = set.count;
  const std::size_t d = set.dim;
  GaussianStats s{std::vector<double>(d, 0.0), SquareMatrix(d)};
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = set.row(i);
    for (std::size_t k = 0; k < d; ++k) s.mean[k] += row[k];
  }
  for (double & m : s.mean) m /= static_cast<double>(n);

  std::vector<double> centred(d);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = set.row(i);
    for (std::size_t k = 0; k < d; ++k) centred[k] = row[k] - s.mean[k];
    for (std::size_t r = 0; r < d; ++r) {
      if (centred[r] == 0.0) continue;
      for (std::size_t c = r; c < d; ++c) s.covariance(r, c) += centred[r] * centred[c];
    }
  }
  const double denom = static_cast<double>(n - 1);
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t c = r; c < d; ++c) {
      const double v = s.covariance(r, c) / denom;
      s.covariance(r, c) = v;
      s.covariance(c, r) = v;
    }
  }
  return s;
}

double frechet_distance(const GaussianStats & a, const GaussianStats & b, double eps)
{
  const std::size_t d = a.mean.size();
  if (b.mean.size() != d || a.covariance.size() != d || b.covariance.size() != d) {
    throw Error(ErrorCode::DimensionMismatch, "frechet_distance: dimensions differ");
  }
  double mean_term = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    const double diff = a.mean[k] - b.mean[k];
    mean_term += diff * diff;
  }

  SymmetricEigen eig_a = jacobi_eigen(a.covariance);
  const SymmetricEigen eig_b = jacobi_eigen(b.covariance);
  const bool singular = eig_a.values.front() < eps || eig_b.values.front() < eps;
  const double shift = singular ? eps : 0.0;

  SquareMatrix cov_b = b.covariance;
  for (std::size_t k = 0; k < d; ++k) cov_b(k, k) += shift;
  // sqrt(Sigma_a + shift I) shares eigenvectors with Sigma_a.
  std::vector<double> roots(d);
  for (std::size_t k = 0; k < d; ++k) roots[k] = std::sqrt(std::max(eig_a.values[k] + shift, 0.0));
  const SquareMatrix root_a = reconstruct(eig_a, roots);

  SquareMatrix inner = root_a * cov_b * root_a;
  for (std::size_t r = 0; r < d; ++r) {
    for (std::size_t c = r + 1; c < d; ++c) {
      const double v = 0.5 * (inner(r, c) + inner(c, r));
      inner(r, c) = v;
      inner(c, r) = v;
    }
  }
  const SymmetricEigen eig_inner = jacobi_eigen(inner);
  double trace_root = 0.0;
  for (double lambda : eig_inner.values) trace_root += std::sqrt(std::max(lambda, 0.0));

  const double trace_a = a.covariance.trace() + shift * static_cast<double>(d);
  const double trace_b = b.covariance.trace() + shift * static_cast<double>(d);
  const double value = mean_term + trace_a + trace_b - 2.0 * trace_root;
  if (value < 0.0) {
    if (value < -1e-6) {
      throw Error(ErrorCode::NumericalFailure, "frechet_distance: negative result");
    }
    return 0.0;
  }
  return value;
}

double mmd2(const EmbeddingSet & x, const EmbeddingSet & y, double bandwidth, double scale)
{
  x.validate();
  y.validate();
  check_same_dim(x, y, "mmd2");
  if (x.count < 2 || y.count < 2) throw Error(ErrorCode::TooFewSamples, "mmd2: need at least 2 samples per set");
  if (!(bandwidth > 0.0)) throw Error(ErrorCode::InvalidArgument, "mmd2: bandwidth must be positive");

  const double gamma = 1.0 / (2.0 * bandwidth * bandwidth);
  auto kernel = [gamma](std::span<const double> u, std::span<const double> v) {
    return std::exp(-squared_distance(u, v) * gamma);
  };
  const std::size_t m = x.count;
  const std::size_t n = y.count;
  double kxx = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (i != j) kxx += kernel(x.row(i), x.row(j));
    }
  }
  double kyy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) kyy += kernel(y.row(i), y.row(j));
    }
  }
  double kxy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) kxy += kernel(x.row(i), y.row(j));
  }
  const double md = static_cast<double>(m);
  const double nd = static_cast<double>(n);
  const double raw = kxx / (md * (md - 1.0)) + kyy / (nd * (nd - 1.0)) - 2.0 * kxy / (md * nd);
  return scale * raw;
}

double paired_embedding_distance(const EmbeddingSet & x, const EmbeddingSet & y)
{
  x.validate();
  y.validate();
  if (x.count != y.count) throw Error(ErrorCode::CountMismatch, "paired distance: row counts differ");
  check_same_dim(x, y, "paired distance");
  double total = 0.0;
  for (std::size_t i = 0; i < x.count; ++i) {
    const auto u = x.row(i);
    const auto v = y.row(i);
    double dot = 0.0, nu = 0.0, nv = 0.0;
    for (std::size_t k = 0; k < x.dim; ++k) {
      dot += u[k] * v[k];
      nu += u[k] * u[k];
      nv += v[k] * v[k];
    }
    const double cosine = (nu == 0.0 || nv == 0.0) ? 0.0 : dot / std::sqrt(nu * nv);
    total += 1.0 - std::clamp(cosine, -1.0, 1.0);
  }
  return total / static_cast<double>(x.count);
}

const char * to_string(EmbeddingSpace space) noexcept
{
  switch (space) {
    case EmbeddingSpace::Inception: return "inception";
    case EmbeddingSpace::Clip: return "clip";
    case EmbeddingSpace::Dino: return "dino";
  }
  return "inception";
}

EmbeddingSet embed_builtin(const std::vector<fs::path> & images)
{
  std::vector<std::vector<double>> rows;
  std::vector<std::string> sources;
  rows.reserve(images.size());
  for (const auto & p : images) {
    rows.push_back(builtin_embed(load_image(p)));
    sources.push_back(p.string());
  }
  return make_embedding_set(kBuiltinDim, std::move(rows), std::move(sources));
}

std::optional<double> MetricReport::get(const std::string & name) const
{
  for (const auto & [k, v] : values) {
    if (k == name) return v;
  }
  return std::nullopt;
}

nlohmann::ordered_json MetricReport::to_json() const
{
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto & [k, v] : values) {
    if (std::isinf(v)) {
      j[k] = "inf";
    } else {
      j[k] = v;
    }
  }
  j["provenance"] = provenance;
  return j;
}

std::vector<std::string> list_images(const fs::path & dir)
{
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw Error(ErrorCode::Io, "not a directory: " + dir.string());
  std::vector<std::string> names;
  for (const auto & entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".png" || ext == ".jpg" || ext == ".jpeg") names.push_back(entry.path().filename().string());
  }
  std::sort(names.begin(), names.end());
  return names;
}

namespace
{

// Mean over finite values; +inf when every value is infinite.
double mean_finite(const std::vector<double> & values, std::size_t & infinite)
{
  double sum = 0.0;
  std::size_t n = 0;
  infinite = 0;
  for (double v : values) {
    if (std::isinf(v)) {
      ++infinite;
    } else {
      sum += v;
      ++n;
    }
  }
  if (n == 0) return std::numeric_limits<double>::infinity();
  return sum / static_cast<double>(n);
}

fs::path find_mask(const fs::path & mask_dir, const std::string & name)
{
  if (fs::exists(mask_dir / name)) return mask_dir / name;
  const fs::path alt = mask_dir / (fs::path(name).stem().string() + ".png");
  if (fs::exists(alt)) return alt;
  throw Error(ErrorCode::Alignment, "no mask for " + name + " in " + mask_dir.string());
}

}  // namespace

MetricReport evaluate(const EvalOptions & opt)
{
  const std::vector<std::string> pred = list_images(opt.pred_dir);
  const std::vector<std::string> gt = list_images(opt.gt_dir);
  if (pred.empty()) throw Error(ErrorCode::Alignment, "no images in " + opt.pred_dir.string());
  const std::set<std::string> gt_set(gt.begin(), gt.end());
  const std::set<std::string> pred_set(pred.begin(), pred.end());
  for (const auto & name : pred) {
    if (!gt_set.count(name)) throw Error(ErrorCode::Alignment, "missing in gt: " + name);
  }
  for (const auto & name : gt) {
    if (!pred_set.count(name)) throw Error(ErrorCode::Alignment, "missing in pred: " + name);
  }

  std::vector<fs::path> pred_paths, gt_paths;
  std::vector<double> psnrs, masked_psnrs;
  for (const auto & name : pred) {
    pred_paths.push_back(opt.pred_dir / name);
    gt_paths.push_back(opt.gt_dir / name);
    const Frame p = load_image(pred_paths.back());
    const Frame g = load_image(gt_paths.back());
    psnrs.push_back(psnr(p, g));
    if (opt.mask_dir) {
      const Mask m = load_mask(find_mask(*opt.mask_dir, name));
      if (!m.same_shape(p.width(), p.height())) {
        throw Error(ErrorCode::DimensionMismatch, "mask size differs for " + name);
      }
      if (const auto box = bounding_box(m)) masked_psnrs.push_back(psnr_region(p, g, *box));
    }
  }

  EmbeddingSet pred_fid, gt_fid, pred_clip, gt_clip, pred_dino, gt_dino;
  if (opt.embed) {
    pred_fid = opt.embed(pred_paths, EmbeddingSpace::Inception);
    gt_fid = opt.embed(gt_paths, EmbeddingSpace::Inception);
    pred_clip = opt.embed(pred_paths, EmbeddingSpace::Clip);
    gt_clip = opt.embed(gt_paths, EmbeddingSpace::Clip);
    pred_dino = opt.embed(pred_paths, EmbeddingSpace::Dino);
    gt_dino = opt.embed(gt_paths, EmbeddingSpace::Dino);
  } else {
    // The builtin embedder has a single space.
    pred_fid = pred_clip = pred_dino = embed_builtin(pred_paths);
    gt_fid = gt_clip = gt_dino = embed_builtin(gt_paths);
  }
  for (const auto * set : {&pred_fid, &gt_fid, &pred_clip, &gt_clip, &pred_dino, &gt_dino}) {
    if (set->count != pred.size()) {
      throw Error(ErrorCode::CountMismatch, "embedder returned the wrong number of rows");
    }
  }

  MetricReport report;
  report.values.emplace_back("fid", frechet_distance(mean_cov(pred_fid), mean_cov(gt_fid)));
  report.values.emplace_back("cmmd", mmd2(pred_clip, gt_clip, opt.cmmd_bandwidth, opt.cmmd_scale));
  report.values.emplace_back("dino", paired_embedding_distance(pred_dino, gt_dino));
  std::size_t identical = 0;
  report.values.emplace_back("psnr", mean_finite(psnrs, identical));
  std::size_t masked_identical = 0;
  if (opt.mask_dir && !masked_psnrs.empty()) {
    report.values.emplace_back("psnr_masked", mean_finite(masked_psnrs, masked_identical));
  }

  auto & prov = report.provenance;
  prov["embedder"] = opt.embedder_id;
  prov["count"] = pred.size();
  prov["embedding_dim"] = {{"fid", pred_fid.dim}, {"cmmd", pred_clip.dim}, {"dino", pred_dino.dim}};
  prov["cmmd_bandwidth"] = opt.cmmd_bandwidth;
  prov["cmmd_scale"] = opt.cmmd_scale;
  prov["psnr_identical_pairs"] = identical;
  if (opt.mask_dir) {
    prov["psnr_masked_pairs"] = masked_psnrs.size();
    prov["psnr_masked_identical_pairs"] = masked_identical;
  }
  return report;
}

}  // namespace v4r
