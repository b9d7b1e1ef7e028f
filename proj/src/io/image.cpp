// Copyright (C) 2026 The LIC Authors
// SPDX-License-Identifier: Apache-2.0

#include "lic/io/image.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>

#include "lic/bytes.hpp"
#include "lic/error.hpp"

namespace lic::io {

namespace {

constexpr std::uint8_t kPngSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

[[noreturn]] void unsupported(const std::string& msg) {
  throw Error(ErrorCode::kUnsupported, msg);
}

struct PngRead {
  std::span<const std::uint8_t> data;
  std::size_t pos = 0;
};

void png_read_cb(png_structp png, png_bytep out, png_size_t n) {
  auto* s = static_cast<PngRead*>(png_get_io_ptr(png));
  if (s->data.size() - s->pos < n) png_error(png, "unexpected end of PNG data");
  std::memcpy(out, s->data.data() + s->pos, n);
  s->pos += n;
}

void png_error_cb(png_structp, png_const_charp msg) {
  throw Error(ErrorCode::kFormat, std::string("PNG: ") + msg);
}

void png_warning_cb(png_structp, png_const_charp) {}

Image decode_png(std::span<const std::uint8_t> bytes) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                           png_error_cb, png_warning_cb);
  png_infop info = png_create_info_struct(png);
  Image img;
  try {
    PngRead src{bytes, 0};
    png_set_read_fn(png, &src, png_read_cb);
    png_read_info(png, info);
    const int depth = png_get_bit_depth(png, info);
    const int type = png_get_color_type(png, info);
    if (depth == 16) unsupported("16-bit PNG input is not supported");
    if (type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (type == PNG_COLOR_TYPE_GRAY || type == PNG_COLOR_TYPE_GRAY_ALPHA) {
      if (depth < 8) png_set_expand_gray_1_2_4_to_8(png);
      png_set_gray_to_rgb(png);
    }
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    png_set_strip_alpha(png);
    png_set_interlace_handling(png);
    png_read_update_info(png, info);
    img.width = static_cast<int>(png_get_image_width(png, info));
    img.height = static_cast<int>(png_get_image_height(png, info));
    if (png_get_rowbytes(png, info) != static_cast<std::size_t>(img.width) * 3) {
      unsupported("PNG does not decode to 8-bit RGB");
    }
    img.rgb.resize(static_cast<std::size_t>(img.width) * img.height * 3);
    std::vector<png_bytep> rows(img.height);
    for (int y = 0; y < img.height; ++y) {
      rows[y] = img.rgb.data() + static_cast<std::size_t>(y) * img.width * 3;
    }
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
  } catch (...) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw;
  }
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

// Next PPM header token, skipping whitespace and comments.
std::string ppm_token(std::span<const std::uint8_t> b, std::size_t& pos) {
  while (pos < b.size()) {
    if (b[pos] == '#') {
      while (pos < b.size() && b[pos] != '\n') ++pos;
    } else if (std::isspace(b[pos])) {
      ++pos;
    } else {
      break;
    }
  }
  std::string t;
  while (pos < b.size() && !std::isspace(b[pos]) && b[pos] != '#') t += static_cast<char>(b[pos++]);
  if (t.empty()) throw Error(ErrorCode::kFormat, "PPM: truncated header");
  return t;
}

int ppm_int(std::span<const std::uint8_t> b, std::size_t& pos) {
  const std::string t = ppm_token(b, pos);
  if (!std::all_of(t.begin(), t.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }) ||
      t.size() > 9) {
    throw Error(ErrorCode::kFormat, "PPM: bad header field '" + t + "'");
  }
  return std::stoi(t);
}

Image decode_ppm(std::span<const std::uint8_t> b) {
  std::size_t pos = 2;
  Image img;
  img.width = ppm_int(b, pos);
  img.height = ppm_int(b, pos);
  const int maxval = ppm_int(b, pos);
  if (maxval > 255) unsupported("16-bit PPM input is not supported");
  if (maxval != 255) unsupported("PPM maxval must be 255");
  if (img.width < 1 || img.height < 1) throw Error(ErrorCode::kFormat, "PPM: empty image");
  ++pos;  // single whitespace before the raster
  const std::size_t n = static_cast<std::size_t>(img.width) * img.height * 3;
  if (pos > b.size() || b.size() - pos < n) {
    throw Error(ErrorCode::kTruncated, "PPM: raster truncated");
  }
  img.rgb.assign(b.begin() + pos, b.begin() + pos + n);
  return img;
}

void png_write_cb(png_structp png, png_bytep data, png_size_t n) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + n);
}

void png_flush_cb(png_structp) {}

}  // namespace

Image decode_image_bytes(std::span<const std::uint8_t> bytes) {
  if (bytes.size() >= 8 && std::equal(kPngSignature, kPngSignature + 8, bytes.begin())) {
    return decode_png(bytes);
  }
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '6') return decode_ppm(bytes);
  unsupported("unrecognized image format (expected PNG or binary PPM)");
}

Image read_image(const std::string& path) { return decode_image_bytes(read_file(path)); }

std::vector<std::uint8_t> encode_png(const Image& image) {
  std::vector<std::uint8_t> out;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                            png_error_cb, png_warning_cb);
  png_infop info = png_create_info_struct(png);
  try {
    png_set_write_fn(png, &out, png_write_cb, png_flush_cb);
    png_set_IHDR(png, info, image.width, image.height, 8, PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < image.height; ++y) {
      png_write_row(png, image.rgb.data() + static_cast<std::size_t>(y) * image.width * 3);
    }
    png_write_end(png, nullptr);
  } catch (...) {
    png_destroy_write_struct(&png, &info);
    throw;
  }
  png_destroy_write_struct(&png, &info);
  return out;
}

std::vector<std::uint8_t> encode_ppm(const Image& image) {
  const std::string header = "P6\n" + std::to_string(image.width) + " " +
                             std::to_string(image.height) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), image.rgb.begin(), image.rgb.end());
  return out;
}

void write_image(const std::string& path, const Image& image) {
  const bool ppm = path.size() >= 4 && path.compare(path.size() - 4, 4, ".ppm") == 0;
  write_file(path, ppm ? encode_ppm(image) : encode_png(image));
}

nn::Tensor to_tensor(const Image& image) {
  nn::Tensor t(3, image.height, image.width);
  const std::size_t hw = t.plane_size();
  for (std::size_t p = 0; p < hw; ++p) {
    for (int c = 0; c < 3; ++c) t.plane(c)[p] = image.rgb[p * 3 + c] / 255.0f;
  }
  return t;
}

Image from_tensor(const nn::Tensor& t) {
  if (t.rank() != 3 || t.channels() != 3) {
    throw Error(ErrorCode::kShape, "image tensor must be 3 x H x W");
  }
  Image img;
  img.width = t.width();
  img.height = t.height();
  const std::size_t hw = t.plane_size();
  img.rgb.resize(hw * 3);
  for (std::size_t p = 0; p < hw; ++p) {
    for (int c = 0; c < 3; ++c) {
      const float v = std::clamp(t.plane(c)[p], 0.0f, 1.0f);
      img.rgb[p * 3 + c] = static_cast<std::uint8_t>(std::lround(v * 255.0f));
    }
  }
  return img;
}

}  // namespace lic::io
