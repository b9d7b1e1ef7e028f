// Copyright (C) 2026 The LIC Authors
// SPDX-License-Identifier: Apache-2.0

#include "lic/nn/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <functional>
#include <numeric>

#include "lic/error.hpp"

namespace lic::nn {

Tensor::Tensor(int channels, int height, int width, float fill)
    : Tensor(std::vector<int>{channels, height, width}, fill) {}

Tensor::Tensor(std::vector<int> dims, float fill) : dims_(std::move(dims)) {
  std::size_t n = 1;
  for (int d : dims_) {
    if (d < 0) throw Error(ErrorCode::kShape, "negative tensor dimension");
    n *= static_cast<std::size_t>(d);
  }
  data_.assign(n, fill);
}

std::string shape_string(const std::vector<int>& dims) {
  std::string s = "(";
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(dims[i]);
  }
  return s + ")";
}

std::string Tensor::shape_string() const { return nn::shape_string(dims_); }

bool Tensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](float v) { return std::isfinite(v); });
}

bool Tensor::bit_equal(const Tensor& other) const {
  return dims_ == other.dims_ &&
         (data_.empty() || std::memcmp(data_.data(), other.data_.data(),
                                       data_.size() * sizeof(float)) == 0);
}

Tensor concat_channels(const Tensor& a, const Tensor& b) {
  if (a.height() != b.height() || a.width() != b.width()) {
    throw Error(ErrorCode::kShape, "concat: spatial size mismatch " +
                                       a.shape_string() + " vs " +
                                       b.shape_string());
  }
  Tensor out(a.channels() + b.channels(), a.height(), a.width());
  std::copy(a.values().begin(), a.values().end(), out.data());
  std::copy(b.values().begin(), b.values().end(), out.data() + a.size());
  return out;
}

LatentTensor quantize(const Tensor& t) {
  LatentTensor q(t.channels(), t.height(), t.width());
  constexpr double kLimit = 1 << 30;
  for (std::size_t i = 0; i < t.size(); ++i) {
    double v = std::clamp(static_cast<double>(t.data()[i]), -kLimit, kLimit);
    q.data[i] = static_cast<std::int32_t>(std::round(v));
  }
  return q;
}

Tensor dequantize(const LatentTensor& t) {
  Tensor out(t.channels, t.height, t.width);
  for (std::size_t i = 0; i < t.data.size(); ++i) {
    out.data()[i] = static_cast<float>(t.data[i]);
  }
  return out;
}

}  // namespace lic::nn
