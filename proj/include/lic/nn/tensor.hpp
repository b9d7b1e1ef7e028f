// Copyright (C) 2026 The LIC Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace lic::nn {

/// Dense C x H x W float tensor, channel-major and row-major within a
/// channel. Kernels and other rank != 3 weights use `dims` directly.
class Tensor {
 public:
  Tensor() = default;
  Tensor(int channels, int height, int width, float fill = 0.0f);
  /// Arbitrary-rank tensor (weights). Rank-3 views use dims {C, H, W}.
  explicit Tensor(std::vector<int> dims, float fill = 0.0f);

  const std::vector<int>& dims() const { return dims_; }
  int rank() const { return static_cast<int>(dims_.size()); }
  int dim(int i) const { return dims_[i]; }

  // Rank-3 accessors.
  int channels() const { return dims_[0]; }
  int height() const { return dims_[1]; }
  int width() const { return dims_[2]; }
  std::size_t plane_size() const {
    return static_cast<std::size_t>(dims_[1]) * dims_[2];
  }

  std::size_t size() const { return data_.size(); }
  float* data() { return data_.data(); }
  const float* data() const { return data_.data(); }
  std::span<float> values() { return data_; }
  std::span<const float> values() const { return data_; }

  float* plane(int c) { return data_.data() + c * plane_size(); }
  const float* plane(int c) const { return data_.data() + c * plane_size(); }

  float& at(int c, int y, int x) {
    return data_[(static_cast<std::size_t>(c) * dims_[1] + y) * dims_[2] + x];
  }
  float at(int c, int y, int x) const {
    return data_[(static_cast<std::size_t>(c) * dims_[1] + y) * dims_[2] + x];
  }

  bool same_shape(const Tensor& other) const { return dims_ == other.dims_; }
  std::string shape_string() const;

  bool all_finite() const;

  /// Bitwise equality of shape and payload.
  bool bit_equal(const Tensor& other) const;

 private:
  std::vector<int> dims_;
  std::vector<float> data_;
};

std::string shape_string(const std::vector<int>& dims);

/// Channel concatenation of two rank-3 tensors with equal spatial size.
Tensor concat_channels(const Tensor& a, const Tensor& b);

/// Integer-symbol C x H x W tensor (quantized latents).
struct LatentTensor {
  int channels = 0;
  int height = 0;
  int width = 0;
  std::vector<std::int32_t> data;

  LatentTensor() = default;
  LatentTensor(int c, int h, int w)
      : channels(c), height(h), width(w),
        data(static_cast<std::size_t>(c) * h * w, 0) {}

  std::size_t plane_size() const {
    return static_cast<std::size_t>(height) * width;
  }
  std::int32_t& at(int c, int y, int x) {
    return data[(static_cast<std::size_t>(c) * height + y) * width + x];
  }
  std::int32_t at(int c, int y, int x) const {
    return data[(static_cast<std::size_t>(c) * height + y) * width + x];
  }
  bool operator==(const LatentTensor&) const = default;
};

/// Round half away from zero.
LatentTensor quantize(const Tensor& t);
Tensor dequantize(const LatentTensor& t);

}  // namespace lic::nn
