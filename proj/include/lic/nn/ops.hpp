// Copyright (C) 2026 The LIC Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>

#include "lic/nn/tensor.hpp"
#include "lic/parallel.hpp"

namespace lic::nn {

inline constexpr float kDefaultLeakySlope = 0.01f;
inline constexpr float kGdnBetaMin = 1e-6f;

// All kernels below compute every output element as
//   bias, then += w * x over (input channel, kernel row, kernel col) in
//   ascending order, skipping taps that fall outside the input.
// Parallelism is over output channels only, so results do not depend on the
// pool size. An empty bias span means zero bias.

/// Zero-padded cross-correlation. weight is (C_out, C_in, k, k).
Tensor conv2d(const Tensor& input, const Tensor& weight,
              std::span<const float> bias, int stride, int padding,
              ThreadPool* pool = nullptr);

/// One output element of conv2d, same summation order.
float conv2d_at(const Tensor& input, const Tensor& weight,
                std::span<const float> bias, int stride, int padding,
                int out_channel, int out_y, int out_x);

/// Transposed convolution. weight is (C_in, C_out, k, k); output size is
/// (H - 1) * stride - 2 * padding + k + output_padding.
Tensor deconv2d(const Tensor& input, const Tensor& weight,
                std::span<const float> bias, int stride, int padding,
                int output_padding = 0, ThreadPool* pool = nullptr);

/// y_i = x_i / sqrt(beta_i + sum_j gamma_ij x_j^2), or x_i * sqrt(...) when
/// inverse. beta is clamped to kGdnBetaMin and gamma to 0.
Tensor gdn(const Tensor& input, std::span<const float> beta,
           const Tensor& gamma, bool inverse, ThreadPool* pool = nullptr);

inline float leaky_relu(float v, float slope) { return v < 0.0f ? v * slope : v; }
void leaky_relu_inplace(Tensor& t, float slope = kDefaultLeakySlope);
void sigmoid_inplace(Tensor& t);
void clamp_inplace(Tensor& t, float lo, float hi);
void add_inplace(Tensor& dst, const Tensor& src);
/// dst += a * b elementwise.
void add_product_inplace(Tensor& dst, const Tensor& a, const Tensor& b);

/// Deformable convolution with a single offset group. offsets has 2*k*k
/// channels laid out as (dy, dx) per tap, taps in row-major kernel order, and
/// the output's spatial size. Samples are bilinear; corners outside the
/// input read as zero. With all-zero offsets the result equals conv2d
/// bit for bit.
Tensor deform_conv2d(const Tensor& input, const Tensor& offsets,
                     const Tensor& weight, std::span<const float> bias,
                     int stride, int padding, ThreadPool* pool = nullptr);

/// Bilinear sample at fractional (y, x); out-of-range corners read 0.
float bilinear_sample(const float* plane, int height, int width, float y,
                      float x);

/// Output spatial extent of a convolution; throws on non-positive results.
int conv_out_size(int in, int kernel, int stride, int padding);

}  // namespace lic::nn
