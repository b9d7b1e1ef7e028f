// Copyright (C) 2026 The LIC Authors
// SPDX-License-Identifier: Apache-2.0

#include "lic/nn/ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "lic/error.hpp"

namespace lic::nn {

namespace {

void run(ThreadPool* pool, std::size_t n,
         const std::function<void(std::size_t)>& fn) {
  if (pool) {
    pool->parallel_for(0, n, fn);
  } else {
    for (std::size_t i = 0; i < n; ++i) fn(i);
  }
}

// Outputs o in [lo, hi) whose input coordinate o * stride + offset lies in
// [0, in_size).
struct Span {
  int lo;
  int hi;
};

Span valid_outputs(int offset, int stride, int in_size, int out_size) {
  int lo = offset >= 0 ? 0 : (-offset + stride - 1) / stride;
  int last = in_size - 1 - offset;
  int hi = last < 0 ? 0 : last / stride + 1;
  return {lo, std::min(hi, out_size)};
}

void check_bias(std::span<const float> bias, int channels, const char* op) {
  if (!bias.empty() && static_cast<int>(bias.size()) != channels) {
    throw Error(ErrorCode::kShape,
                std::string(op) + ": bias has " + std::to_string(bias.size()) +
                    " entries, expected " + std::to_string(channels));
  }
}

void check_kernel(const Tensor& weight, int in_channels, int in_axis,
                  const char* op) {
  if (weight.rank() != 4 || weight.dim(2) != weight.dim(3)) {
    throw Error(ErrorCode::kShape, std::string(op) + ": weight must be square "
                                   "rank-4, got " + weight.shape_string());
  }
  if (weight.dim(in_axis) != in_channels) {
    throw Error(ErrorCode::kShape,
                std::string(op) + ": weight " + weight.shape_string() +
                    " does not accept " + std::to_string(in_channels) +
                    " input channels");
  }
}

// 1x1 stride-1 convolution, tiled over positions so an input block stays
// in cache across output channels. Per-element order matches the general
// path: bias, then input channels ascending.
void pointwise(const Tensor& input, const Tensor& weight,
               std::span<const float> bias, Tensor& out, ThreadPool* pool) {
  constexpr std::size_t kBlock = 256;
  constexpr std::size_t kGroup = 16;
  const std::size_t c_in = static_cast<std::size_t>(input.channels());
  const std::size_t c_out = static_cast<std::size_t>(out.channels());
  const std::size_t n = input.plane_size();
  const std::size_t groups = (c_out + kGroup - 1) / kGroup;
  run(pool, groups, [&](std::size_t g) {
    const std::size_t co_end = std::min(c_out, (g + 1) * kGroup);
    for (std::size_t p0 = 0; p0 < n; p0 += kBlock) {
      const std::size_t len = std::min(kBlock, n - p0);
      for (std::size_t co = g * kGroup; co < co_end; ++co) {
        float* o = out.data() + co * n + p0;
        std::fill(o, o + len, bias.empty() ? 0.0f : bias[co]);
        const float* wk = weight.data() + co * c_in;
        for (std::size_t ci = 0; ci < c_in; ++ci) {
          const float wv = wk[ci];
          const float* src = input.data() + ci * n + p0;
          for (std::size_t i = 0; i < len; ++i) o[i] += wv * src[i];
        }
      }
    }
  });
}

}  // namespace

int conv_out_size(int in, int kernel, int stride, int padding) {
  if (stride < 1) throw Error(ErrorCode::kShape, "stride must be >= 1");
  int span = in + 2 * padding - kernel;
  if (span < 0) {
    throw Error(ErrorCode::kShape, "input extent " + std::to_string(in) +
                                       " too small for kernel " +
                                       std::to_string(kernel));
  }
  return span / stride + 1;
}

Tensor conv2d(const Tensor& input, const Tensor& weight,
              std::span<const float> bias, int stride, int padding,
              ThreadPool* pool) {
  if (input.rank() != 3) {
    throw Error(ErrorCode::kShape, "conv2d: input must be rank 3");
  }
  check_kernel(weight, input.channels(), 1, "conv2d");
  const int c_out = weight.dim(0);
  const int c_in = input.channels();
  const int k = weight.dim(2);
  check_bias(bias, c_out, "conv2d");
  const int h = input.height();
  const int w = input.width();
  const int h_out = conv_out_size(h, k, stride, padding);
  const int w_out = conv_out_size(w, k, stride, padding);
  Tensor out(c_out, h_out, w_out);
  if (k == 1 && stride == 1 && padding == 0) {
    pointwise(input, weight, bias, out, pool);
    return out;
  }
  run(pool, c_out, [&](std::size_t co) {
    float* o = out.plane(static_cast<int>(co));
    std::fill(o, o + out.plane_size(), bias.empty() ? 0.0f : bias[co]);
    const float* wk = weight.data() + co * static_cast<std::size_t>(c_in) * k * k;
    for (int ci = 0; ci < c_in; ++ci) {
      const float* ip = input.plane(ci);
      for (int ky = 0; ky < k; ++ky) {
        const Span rows = valid_outputs(ky - padding, stride, h, h_out);
        for (int kx = 0; kx < k; ++kx) {
          const float wv = *wk++;
          const Span cols = valid_outputs(kx - padding, stride, w, w_out);
          if (cols.lo >= cols.hi) continue;
          for (int oy = rows.lo; oy < rows.hi; ++oy) {
            const float* src = ip + static_cast<std::size_t>(oy * stride + ky - padding) * w;
            float* dst = o + static_cast<std::size_t>(oy) * w_out;
            if (stride == 1) {
              const float* s = src + (kx - padding);
              for (int ox = cols.lo; ox < cols.hi; ++ox) dst[ox] += wv * s[ox];
            } else {
              for (int ox = cols.lo; ox < cols.hi; ++ox) {
                dst[ox] += wv * src[ox * stride + kx - padding];
              }
            }
          }
        }
      }
    }
  });
  return out;
}

float conv2d_at(const Tensor& input, const Tensor& weight,
                std::span<const float> bias, int stride, int padding,
                int out_channel, int out_y, int out_x) {
  check_kernel(weight, input.channels(), 1, "conv2d_at");
  const int c_in = input.channels();
  const int k = weight.dim(2);
  const int h = input.height();
  const int w = input.width();
  float acc = bias.empty() ? 0.0f : bias[out_channel];
  const float* wk =
      weight.data() + static_cast<std::size_t>(out_channel) * c_in * k * k;
  for (int ci = 0; ci < c_in; ++ci) {
    const float* ip = input.plane(ci);
    for (int ky = 0; ky < k; ++ky) {
      const int iy = out_y * stride + ky - padding;
      for (int kx = 0; kx < k; ++kx) {
        const float wv = *wk++;
        const int ix = out_x * stride + kx - padding;
        if (iy < 0 || iy >= h || ix < 0 || ix >= w) continue;
        acc += wv * ip[static_cast<std::size_t>(iy) * w + ix];
      }
    }
  }
  return acc;
}

Tensor deconv2d(const Tensor& input, const Tensor& weight,
                std::span<const float> bias, int stride, int padding,
                int output_padding, ThreadPool* pool) {
  if (input.rank() != 3) {
    throw Error(ErrorCode::kShape, "deconv2d: input must be rank 3");
  }
  check_kernel(weight, input.channels(), 0, "deconv2d");
  if (stride < 1) throw Error(ErrorCode::kShape, "deconv2d: stride must be >= 1");
  const int c_in = input.channels();
  const int c_out = weight.dim(1);
  const int k = weight.dim(2);
  check_bias(bias, c_out, "deconv2d");
  const int h = input.height();
  const int w = input.width();
  const int h_out = (h - 1) * stride - 2 * padding + k + output_padding;
  const int w_out = (w - 1) * stride - 2 * padding + k + output_padding;
  if (h_out <= 0 || w_out <= 0) {
    throw Error(ErrorCode::kShape, "deconv2d: empty output for input " +
                                       input.shape_string());
  }
  Tensor out(c_out, h_out, w_out);
  run(pool, c_out, [&](std::size_t co) {
    float* o = out.plane(static_cast<int>(co));
    std::fill(o, o + out.plane_size(), bias.empty() ? 0.0f : bias[co]);
    for (int ci = 0; ci < c_in; ++ci) {
      const float* ip = input.plane(ci);
      const float* wk =
          weight.data() + (static_cast<std::size_t>(ci) * c_out + co) * k * k;
      for (int ky = 0; ky < k; ++ky) {
        for (int kx = 0; kx < k; ++kx) {
          const float wv = wk[ky * k + kx];
          for (int iy = 0; iy < h; ++iy) {
            const int oy = iy * stride + ky - padding;
            if (oy < 0 || oy >= h_out) continue;
            const float* src = ip + static_cast<std::size_t>(iy) * w;
            float* dst = o + static_cast<std::size_t>(oy) * w_out;
            for (int ix = 0; ix < w; ++ix) {
              const int ox = ix * stride + kx - padding;
              if (ox < 0 || ox >= w_out) continue;
              dst[ox] += wv * src[ix];
            }
          }
        }
      }
    }
  });
  return out;
}

Tensor gdn(const Tensor& input, std::span<const float> beta,
           const Tensor& gamma, bool inverse, ThreadPool* pool) {
  const int c = input.channels();
  if (static_cast<int>(beta.size()) != c || gamma.rank() != 2 ||
      gamma.dim(0) != c || gamma.dim(1) != c) {
    throw Error(ErrorCode::kShape, "gdn: parameters do not match " +
                                       std::to_string(c) + " channels");
  }
  const std::size_t n = input.plane_size();
  Tensor squared = input;
  for (float& v : squared.values()) v = v * v;
  Tensor out(input.dims());
  run(pool, c, [&](std::size_t i) {
    std::vector<float> norm(n, std::max(beta[i], kGdnBetaMin));
    for (int j = 0; j < c; ++j) {
      const float g = std::max(gamma.data()[i * c + j], 0.0f);
      const float* sq = squared.plane(j);
      for (std::size_t p = 0; p < n; ++p) norm[p] += g * sq[p];
    }
    const float* x = input.plane(static_cast<int>(i));
    float* y = out.plane(static_cast<int>(i));
    if (inverse) {
      for (std::size_t p = 0; p < n; ++p) y[p] = x[p] * std::sqrt(norm[p]);
    } else {
      for (std::size_t p = 0; p < n; ++p) y[p] = x[p] / std::sqrt(norm[p]);
    }
  });
  return out;
}

void leaky_relu_inplace(Tensor& t, float slope) {
  for (float& v : t.values()) v = leaky_relu(v, slope);
}

void sigmoid_inplace(Tensor& t) {
  for (float& v : t.values()) v = 1.0f / (1.0f + std::exp(-v));
}

void clamp_inplace(Tensor& t, float lo, float hi) {
  for (float& v : t.values()) v = std::clamp(v, lo, hi);
}

void add_inplace(Tensor& dst, const Tensor& src) {
  if (!dst.same_shape(src)) {
    throw Error(ErrorCode::kShape, "add: " + dst.shape_string() + " vs " +
                                       src.shape_string());
  }
  float* d = dst.data();
  const float* s = src.data();
  for (std::size_t i = 0; i < dst.size(); ++i) d[i] += s[i];
}

void add_product_inplace(Tensor& dst, const Tensor& a, const Tensor& b) {
  if (!dst.same_shape(a) || !dst.same_shape(b)) {
    throw Error(ErrorCode::kShape, "add_product: shape mismatch");
  }
  float* d = dst.data();
  for (std::size_t i = 0; i < dst.size(); ++i) d[i] += a.data()[i] * b.data()[i];
}

float bilinear_sample(const float* plane, int height, int width, float y,
                      float x) {
  const float fy = std::floor(y);
  const float fx = std::floor(x);
  const int y0 = static_cast<int>(fy);
  const int x0 = static_cast<int>(fx);
  const float ly = y - fy;
  const float lx = x - fx;
  auto pixel = [&](int yy, int xx) -> float {
    if (yy < 0 || yy >= height || xx < 0 || xx >= width) return 0.0f;
    return plane[static_cast<std::size_t>(yy) * width + xx];
  };
  if (ly == 0.0f && lx == 0.0f) return pixel(y0, x0);
  const float hy = 1.0f - ly;
  const float hx = 1.0f - lx;
  return hy * hx * pixel(y0, x0) + hy * lx * pixel(y0, x0 + 1) +
         ly * hx * pixel(y0 + 1, x0) + ly * lx * pixel(y0 + 1, x0 + 1);
}

Tensor deform_conv2d(const Tensor& input, const Tensor& offsets,
                     const Tensor& weight, std::span<const float> bias,
                     int stride, int padding, ThreadPool* pool) {
  if (input.rank() != 3 || offsets.rank() != 3) {
    throw Error(ErrorCode::kShape, "deform_conv2d: inputs must be rank 3");
  }
  check_kernel(weight, input.channels(), 1, "deform_conv2d");
  const int c_out = weight.dim(0);
  const int c_in = input.channels();
  const int k = weight.dim(2);
  const int taps = k * k;
  check_bias(bias, c_out, "deform_conv2d");
  if (offsets.channels() != 2 * taps) {
    throw Error(ErrorCode::kShape,
                "deform_conv2d: offsets have " +
                    std::to_string(offsets.channels()) + " channels, expected " +
                    std::to_string(2 * taps));
  }
  const int h = input.height();
  const int w = input.width();
  const int h_out = conv_out_size(h, k, stride, padding);
  const int w_out = conv_out_size(w, k, stride, padding);
  if (offsets.height() != h_out || offsets.width() != w_out) {
    throw Error(ErrorCode::kShape, "deform_conv2d: offsets " +
                                       offsets.shape_string() +
                                       " do not match output size");
  }
  const std::size_t n = static_cast<std::size_t>(h_out) * w_out;

  Tensor out(c_out, h_out, w_out);
  for (int co = 0; co < c_out; ++co) {
    std::fill(out.plane(co), out.plane(co) + n, bias.empty() ? 0.0f : bias[co]);
  }

  // Sampled columns for one input channel: taps x positions.
  std::vector<float> cols(static_cast<std::size_t>(taps) * n);
  for (int ci = 0; ci < c_in; ++ci) {
    const float* ip = input.plane(ci);
    run(pool, taps, [&](std::size_t t) {
      const int ky = static_cast<int>(t) / k;
      const int kx = static_cast<int>(t) % k;
      const float* dy = offsets.plane(static_cast<int>(2 * t));
      const float* dx = offsets.plane(static_cast<int>(2 * t + 1));
      float* col = cols.data() + t * n;
      for (int oy = 0; oy < h_out; ++oy) {
        for (int ox = 0; ox < w_out; ++ox) {
          const std::size_t p = static_cast<std::size_t>(oy) * w_out + ox;
          const float y = static_cast<float>(oy * stride + ky - padding) + dy[p];
          const float x = static_cast<float>(ox * stride + kx - padding) + dx[p];
          col[p] = bilinear_sample(ip, h, w, y, x);
        }
      }
    });
    run(pool, c_out, [&](std::size_t co) {
      float* o = out.plane(static_cast<int>(co));
      const float* wk =
          weight.data() + (co * static_cast<std::size_t>(c_in) + ci) * taps;
      for (int t = 0; t < taps; ++t) {
        const float wv = wk[t];
        const float* col = cols.data() + static_cast<std::size_t>(t) * n;
        for (std::size_t p = 0; p < n; ++p) o[p] += wv * col[p];
      }
    });
  }
  return out;
}

}  // namespace lic::nn
