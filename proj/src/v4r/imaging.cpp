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
#include "v4r/imaging.hpp"

#include <jpeglib.h>
#include <png.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <memory>
#include <string>

#include "v4r/error.hpp"

namespace v4r
{

Frame::Frame(int width, int height)
: Frame(width, height,
        std::vector<std::uint8_t>(
          static_cast<std::size_t>(std::max(width, 0)) * std::max(height, 0) * 3, 0))
{
}

Frame::Frame(int width, int height, std::vector<std::uint8_t> data)
: width_(width), height_(height), data_(std::move(data))
{
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::InvalidArgument, "frame dimensions must be positive");
  }
  if (data_.size() != static_cast<std::size_t>(width) * height * 3) {
    throw Error(ErrorCode::InvalidArgument, "frame data length must equal width*height*3");
  }
}

GrayFrame::GrayFrame(int width, int height)
: GrayFrame(width, height,
            std::vector<std::uint8_t>(
              static_cast<std::size_t>(std::max(width, 0)) * std::max(height, 0), 0))
{
}

GrayFrame::GrayFrame(int width, int height, std::vector<std::uint8_t> data)
: width_(width), height_(height), data_(std::move(data))
{
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::InvalidArgument, "frame dimensions must be positive");
  }
  if (data_.size() != static_cast<std::size_t>(width) * height) {
    throw Error(ErrorCode::InvalidArgument, "gray frame data length must equal width*height");
  }
}

namespace
{

struct FileCloser
{
  void operator()(std::FILE * f) const noexcept
  {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path & path, const char * mode)
{
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f) {
    throw Error(ErrorCode::Io, "cannot open " + path.string());
  }
  return f;
}

// libpng reports errors through longjmp; the message is captured here and
// rethrown as an exception once control is back in C++ frames.
struct PngErrorState
{
  std::jmp_buf jump;
  char message[256] = {0};
};

void png_error_fn(png_structp png, png_const_charp msg)
{
  auto * state = static_cast<PngErrorState *>(png_get_error_ptr(png));
  std::snprintf(state->message, sizeof(state->message), "%s", msg);
  std::longjmp(state->jump, 1);
}

void png_warning_fn(png_structp, png_const_charp) {}

Frame decode_png(std::FILE * file, const std::filesystem::path & path)
{
  PngErrorState state;
  png_structp png =
    png_create_read_struct(PNG_LIBPNG_VER_STRING, &state, png_error_fn, png_warning_fn);
  if (!png) throw Error(ErrorCode::Decode, "png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw Error(ErrorCode::Decode, "png_create_info_struct failed");
  }

  // Only trivially destructible state lives across setjmp; the buffers are
  // heap-owned and released on both paths.
  auto * pixels = new std::vector<std::uint8_t>();
  auto * rows = new std::vector<png_bytep>();
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  if (setjmp(state.jump)) {
    png_destroy_read_struct(&png, &info, nullptr);
    delete pixels;
    delete rows;
    throw Error(ErrorCode::Decode, path.string() + ": " + state.message);
  }

  png_init_io(png, file);
  png_read_info(png, info);
  width = png_get_image_width(png, info);
  height = png_get_image_height(png, info);
  const int color_type = png_get_color_type(png, info);
  const int bit_depth = png_get_bit_depth(png, info);

  if (bit_depth == 16) png_set_strip_16(png);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA) {
    png_set_gray_to_rgb(png);
  }
  png_set_strip_alpha(png);
  png_set_interlace_handling(png);
  png_read_update_info(png, info);

  const std::size_t rowbytes = png_get_rowbytes(png, info);
  if (rowbytes != static_cast<std::size_t>(width) * 3) {
    png_error(png, "unsupported pixel layout");
  }
  pixels->resize(rowbytes * height);
  rows->resize(height);
  for (png_uint_32 r = 0; r < height; ++r) (*rows)[r] = pixels->data() + r * rowbytes;
  png_read_image(png, rows->data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  std::vector<std::uint8_t> data = std::move(*pixels);
  delete pixels;
  delete rows;
  return Frame(static_cast<int>(width), static_cast<int>(height), std::move(data));
}

struct JpegErrorState
{
  jpeg_error_mgr mgr;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX] = {0};
};

void jpeg_error_exit(j_common_ptr cinfo)
{
  auto * state = reinterpret_cast<JpegErrorState *>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, state->message);
  std::longjmp(state->jump, 1);
}

void jpeg_silent(j_common_ptr) {}

Frame decode_jpeg(std::FILE * file, const std::filesystem::path & path)
{
  jpeg_decompress_struct cinfo;
  JpegErrorState state;
  cinfo.err = jpeg_std_error(&state.mgr);
  state.mgr.error_exit = jpeg_error_exit;
  state.mgr.output_message = jpeg_silent;
  std::vector<std::uint8_t> * pixels = new std::vector<std::uint8_t>();
  if (setjmp(state.jump)) {
    jpeg_destroy_decompress(&cinfo);
    delete pixels;
    throw Error(ErrorCode::Decode, path.string() + ": " + state.message);
  }
  jpeg_create_decompress(&cinfo);
  jpeg_stdio_src(&cinfo, file);
  jpeg_read_header(&cinfo, TRUE);
  if (cinfo.jpeg_color_space == JCS_CMYK || cinfo.jpeg_color_space == JCS_YCCK) {
    std::snprintf(state.message, sizeof(state.message), "CMYK JPEG is not supported");
    std::longjmp(state.jump, 1);
  }
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);
  const std::size_t stride = static_cast<std::size_t>(cinfo.output_width) * 3;
  pixels->resize(stride * cinfo.output_height);
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = pixels->data() + cinfo.output_scanline * stride;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  const int width = static_cast<int>(cinfo.output_width);
  const int height = static_cast<int>(cinfo.output_height);
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  std::vector<std::uint8_t> data = std::move(*pixels);
  delete pixels;
  return Frame(width, height, std::move(data));
}

void encode_png(
  const std::uint8_t * data, int width, int height, int channels,
  const std::filesystem::path & path)
{
  FilePtr file = open_file(path, "wb");
  PngErrorState state;
  png_structp png =
    png_create_write_struct(PNG_LIBPNG_VER_STRING, &state, png_error_fn, png_warning_fn);
  if (!png) throw Error(ErrorCode::Io, "png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw Error(ErrorCode::Io, "png_create_info_struct failed");
  }
  std::vector<png_bytep> * rows = new std::vector<png_bytep>(height);
  if (setjmp(state.jump)) {
    png_destroy_write_struct(&png, &info);
    delete rows;
    throw Error(ErrorCode::Io, path.string() + ": " + state.message);
  }
  png_init_io(png, file.get());
  png_set_IHDR(
    png, info, width, height, 8, channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY,
    PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const std::size_t stride = static_cast<std::size_t>(width) * channels;
  for (int r = 0; r < height; ++r) {
    (*rows)[r] = const_cast<png_bytep>(data + r * stride);
  }
  png_write_image(png, rows->data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  delete rows;
  if (std::fflush(file.get()) != 0) {
    throw Error(ErrorCode::Io, "write failed: " + path.string());
  }
}

}  // namespace

Frame load_image(const std::filesystem::path & path)
{
  FilePtr file = open_file(path, "rb");
  std::array<unsigned char, 8> sig{};
  const std::size_t got = std::fread(sig.data(), 1, sig.size(), file.get());
  std::rewind(file.get());
  if (got >= 8 && png_sig_cmp(sig.data(), 0, 8) == 0) {
    return decode_png(file.get(), path);
  }
  if (got >= 3 && sig[0] == 0xFF && sig[1] == 0xD8 && sig[2] == 0xFF) {
    return decode_jpeg(file.get(), path);
  }
  throw Error(ErrorCode::Decode, path.string() + ": not a PNG or JPEG file");
}

void save_image(const Frame & frame, const std::filesystem::path & path)
{
  encode_png(frame.data().data(), frame.width(), frame.height(), 3, path);
}

void save_gray_png(const GrayFrame & frame, const std::filesystem::path & path)
{
  encode_png(frame.data().data(), frame.width(), frame.height(), 1, path);
}

GrayFrame to_gray(const Frame & frame)
{
  std::vector<std::uint8_t> out(frame.pixel_count());
  const auto & in = frame.data();
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double y = 0.299 * in[3 * i] + 0.587 * in[3 * i + 1] + 0.114 * in[3 * i + 2];
    out[i] = static_cast<std::uint8_t>(std::clamp<long>(std::lround(y), 0, 255));
  }
  return GrayFrame(frame.width(), frame.height(), std::move(out));
}

std::vector<double> luma_values(const Frame & frame)
{
  std::vector<double> out(frame.pixel_count());
  const auto & in = frame.data();
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = 0.299 * in[3 * i] + 0.587 * in[3 * i + 1] + 0.114 * in[3 * i + 2];
  }
  return out;
}

double frame_mse(const Frame & a, const Frame & b)
{
  if (!a.same_shape(b)) {
    throw Error(ErrorCode::DimensionMismatch, "frame_mse: frames differ in size");
  }
  const auto & da = a.data();
  const auto & db = b.data();
  // Integer accumulation keeps the result exact and order-independent.
  std::uint64_t acc = 0;
  for (std::size_t i = 0; i < da.size(); ++i) {
    const int d = static_cast<int>(da[i]) - static_cast<int>(db[i]);
    acc += static_cast<std::uint64_t>(d * d);
  }
  return static_cast<double>(acc) / static_cast<double>(da.size());
}

const char * to_string(ErrorCode code) noexcept
{
  switch (code) {
    case ErrorCode::Io: return "IoError";
    case ErrorCode::Decode: return "DecodeError";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::TooFewFrames: return "TooFewFrames";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::EmptyCandidates: return "EmptyCandidates";
    case ErrorCode::MaskTooSmall: return "MaskTooSmall";
    case ErrorCode::EmptyMask: return "EmptyMask";
    case ErrorCode::InvalidRle: return "InvalidRle";
    case ErrorCode::DuplicateRecord: return "DuplicateRecord";
    case ErrorCode::Parse: return "ParseError";
    case ErrorCode::CountMismatch: return "CountMismatch";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
    case ErrorCode::Alignment: return "AlignmentError";
    case ErrorCode::Sidecar: return "SidecarError";
    case ErrorCode::Config: return "ConfigError";
    case ErrorCode::NoScenes: return "NoScenes";
    case ErrorCode::Validation: return "ValidationError";
  }
  return "UnknownError";
}

}  // namespace v4r
