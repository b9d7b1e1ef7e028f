// Copyright (C) 2026 The LIC Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lic/nn/tensor.hpp"

namespace lic::io {

/// 8-bit interleaved RGB raster.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;
  bool operator==(const Image&) const = default;
};

/// PNG (8-bit gray, RGB, palette; alpha dropped) or binary PPM (P6,
/// maxval 255), chosen by content. 16-bit samples are rejected.
Image read_image(const std::string& path);
Image decode_image_bytes(std::span<const std::uint8_t> bytes);
/// Format from the extension: ".ppm" writes P6, anything else PNG.
void write_image(const std::string& path, const Image& image);

std::vector<std::uint8_t> encode_png(const Image& image);
std::vector<std::uint8_t> encode_ppm(const Image& image);

/// 3 x H x W tensor with values / 255.
nn::Tensor to_tensor(const Image& image);
/// Rounds clamp(v, 0, 1) * 255.
Image from_tensor(const nn::Tensor& t);

}  // namespace lic::io
