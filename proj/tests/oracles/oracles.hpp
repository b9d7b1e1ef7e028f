// Copyright (C) 2026 The LIC Authors
// SPDX-License-Identifier: Apache-2.0

// Brute-force reference implementations used only by tests. Everything is
// computed in double with the most literal loop nest available.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "lic/nn/tensor.hpp"

namespace oracle {

using lic::nn::Tensor;

// Uniform [lo, hi) floats from a seeded engine.
inline Tensor random_tensor(std::mt19937_64& rng, std::vector<int> dims,
                            float lo = -1.0f, float hi = 1.0f) {
  std::uniform_real_distribution<float> u(lo, hi);
  Tensor t(std::move(dims));
  for (float& v : t.values()) v = u(rng);
  return t;
}

inline double at(const Tensor& t, int c, int y, int x) {
  if (y < 0 || y >= t.height() || x < 0 || x >= t.width()) return 0.0;
  return t.at(c, y, x);
}

inline double w4(const Tensor& w, int a, int b, int c, int d) {
  return w.data()[((static_cast<std::size_t>(a) * w.dim(1) + b) * w.dim(2) + c) *
                      w.dim(3) + d];
}

// Six nested loops of cross-correlation with zero padding.
inline Tensor conv2d(const Tensor& x, const Tensor& w, const std::vector<float>& bias,
                     int stride, int pad) {
  const int co_n = w.dim(0), ci_n = w.dim(1), k = w.dim(2);
  const int ho = (x.height() + 2 * pad - k) / stride + 1;
  const int wo = (x.width() + 2 * pad - k) / stride + 1;
  Tensor out(co_n, ho, wo);
  for (int co = 0; co < co_n; ++co)
    for (int oy = 0; oy < ho; ++oy)
      for (int ox = 0; ox < wo; ++ox) {
        double s = bias.empty() ? 0.0 : bias[co];
        for (int ci = 0; ci < ci_n; ++ci)
          for (int ky = 0; ky < k; ++ky)
            for (int kx = 0; kx < k; ++kx)
              s += w4(w, co, ci, ky, kx) *
                   at(x, ci, oy * stride - pad + ky, ox * stride - pad + kx);
        out.at(co, oy, ox) = static_cast<float>(s);
      }
  return out;
}

// Transposed convolution as scatter-add of every input pixel.
inline Tensor deconv2d(const Tensor& x, const Tensor& w, const std::vector<float>& bias,
                       int stride, int pad, int output_padding) {
  const int ci_n = w.dim(0), co_n = w.dim(1), k = w.dim(2);
  const int ho = (x.height() - 1) * stride - 2 * pad + k + output_padding;
  const int wo = (x.width() - 1) * stride - 2 * pad + k + output_padding;
  std::vector<double> acc(static_cast<std::size_t>(co_n) * ho * wo, 0.0);
  for (int co = 0; co < co_n; ++co)
    for (std::size_t p = 0; p < static_cast<std::size_t>(ho) * wo; ++p)
      acc[co * static_cast<std::size_t>(ho) * wo + p] = bias.empty() ? 0.0 : bias[co];
  for (int ci = 0; ci < ci_n; ++ci)
    for (int iy = 0; iy < x.height(); ++iy)
      for (int ix = 0; ix < x.width(); ++ix)
        for (int co = 0; co < co_n; ++co)
          for (int ky = 0; ky < k; ++ky)
            for (int kx = 0; kx < k; ++kx) {
              const int oy = iy * stride - pad + ky;
              const int ox = ix * stride - pad + kx;
              if (oy < 0 || oy >= ho || ox < 0 || ox >= wo) continue;
              acc[(static_cast<std::size_t>(co) * ho + oy) * wo + ox] +=
                  x.at(ci, iy, ix) * w4(w, ci, co, ky, kx);
            }
  Tensor out(co_n, ho, wo);
  for (std::size_t i = 0; i < acc.size(); ++i) out.data()[i] = static_cast<float>(acc[i]);
  return out;
}

// Bilinear sample with zero outside the plane.
inline double bilinear(const Tensor& x, int c, double py, double px) {
  const double fy = std::floor(py), fx = std::floor(px);
  const int y0 = static_cast<int>(fy), x0 = static_cast<int>(fx);
  const double ly = py - fy, lx = px - fx;
  return (1 - ly) * (1 - lx) * at(x, c, y0, x0) + (1 - ly) * lx * at(x, c, y0, x0 + 1) +
         ly * (1 - lx) * at(x, c, y0 + 1, x0) + ly * lx * at(x, c, y0 + 1, x0 + 1);
}

// Offsets: channel 2t is dy, 2t + 1 is dx of tap t = ky * k + kx.
inline Tensor deform_conv2d(const Tensor& x, const Tensor& off, const Tensor& w,
                            const std::vector<float>& bias, int stride, int pad) {
  const int co_n = w.dim(0), ci_n = w.dim(1), k = w.dim(2);
  const int ho = off.height(), wo = off.width();
  Tensor out(co_n, ho, wo);
  for (int co = 0; co < co_n; ++co)
    for (int oy = 0; oy < ho; ++oy)
      for (int ox = 0; ox < wo; ++ox) {
        double s = bias.empty() ? 0.0 : bias[co];
        for (int ci = 0; ci < ci_n; ++ci)
          for (int ky = 0; ky < k; ++ky)
            for (int kx = 0; kx < k; ++kx) {
              const int t = ky * k + kx;
              const double py = oy * stride - pad + ky + off.at(2 * t, oy, ox);
              const double px = ox * stride - pad + kx + off.at(2 * t + 1, oy, ox);
              s += w4(w, co, ci, ky, kx) * bilinear(x, ci, py, px);
            }
        out.at(co, oy, ox) = static_cast<float>(s);
      }
  return out;
}

// y_i = x_i / sqrt(beta_i + sum_j gamma_ij x_j^2), or times for the inverse.
inline Tensor gdn(const Tensor& x, const std::vector<float>& beta, const Tensor& gamma,
                  bool inverse) {
  const int c = x.channels();
  Tensor out(x.dims());
  for (int i = 0; i < c; ++i)
    for (int y = 0; y < x.height(); ++y)
      for (int xx = 0; xx < x.width(); ++xx) {
        double d = std::max<double>(beta[i], 1e-6);
        for (int j = 0; j < c; ++j) {
          const double v = x.at(j, y, xx);
          d += std::max<double>(gamma.data()[i * c + j], 0.0) * v * v;
        }
        const double r = std::sqrt(d);
        out.at(i, y, xx) = static_cast<float>(inverse ? x.at(i, y, xx) * r
                                                      : x.at(i, y, xx) / r);
      }
  return out;
}

inline double leaky(double v, double slope) { return v < 0 ? v * slope : v; }

// Composite Simpson integration of the standard normal density.
inline double normal_cdf_by_integration(double x, double mean, double sigma) {
  const double a = mean - 40.0 * sigma;
  const int n = 200000;
  const double h = (x - a) / n;
  auto f = [&](double t) {
    const double z = (t - mean) / sigma;
    return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * M_PI));
  };
  double s = f(a) + f(x);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

inline double relative_error(double a, double b) {
  return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

inline double max_relative_error(const Tensor& a, const Tensor& b) {
  if (a.dims() != b.dims()) return INFINITY;
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, relative_error(a.data()[i], b.data()[i]));
  }
  return m;
}

// Field-by-field ".lic" reader written from the format description alone.
struct ParsedContainer {
  std::string magic;
  int version = 0, cfg = 0, parity = 0, streams = 0;
  int n = 0, cy = 0, cz = 0;
  std::uint32_t tw = 0, th = 0, pw = 0, ph = 0;
  std::vector<int> present;  // 0/1 per channel
  std::vector<std::pair<std::int32_t, std::int32_t>> bounds;
  std::vector<std::uint32_t> lengths;
  std::vector<std::vector<std::uint8_t>> segments;
};

inline ParsedContainer parse_lic(const std::vector<std::uint8_t>& b) {
  std::size_t pos = 0;
  auto take = [&](std::size_t n) {
    if (pos + n > b.size()) throw std::runtime_error("short container");
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(b[pos + i]) << (8 * i);
    pos += n;
    return v;
  };
  ParsedContainer c;
  for (int i = 0; i < 4; ++i) c.magic += static_cast<char>(take(1));
  c.version = static_cast<int>(take(1));
  c.cfg = static_cast<int>(take(1));
  c.parity = static_cast<int>(take(1));
  c.streams = static_cast<int>(take(1));
  c.n = static_cast<int>(take(2));
  c.cy = static_cast<int>(take(2));
  c.cz = static_cast<int>(take(2));
  c.tw = static_cast<std::uint32_t>(take(4));
  c.th = static_cast<std::uint32_t>(take(4));
  c.pw = static_cast<std::uint32_t>(take(4));
  c.ph = static_cast<std::uint32_t>(take(4));
  std::vector<std::uint8_t> bitmap;
  for (int i = 0; i < (c.cy + 7) / 8; ++i) bitmap.push_back(static_cast<std::uint8_t>(take(1)));
  for (int i = 0; i < c.cy; ++i) c.present.push_back((bitmap[i / 8] >> (i % 8)) & 1);
  for (int i = 0; i < c.cy; ++i) {
    if (!c.present[i]) continue;
    const auto lo = static_cast<std::int32_t>(static_cast<std::uint32_t>(take(4)));
    const auto hi = static_cast<std::int32_t>(static_cast<std::uint32_t>(take(4)));
    c.bounds.emplace_back(lo, hi);
  }
  for (int i = 0; i < 1 + 2 * c.streams; ++i) c.lengths.push_back(static_cast<std::uint32_t>(take(4)));
  for (std::uint32_t len : c.lengths) {
    if (pos + len > b.size()) throw std::runtime_error("short segment");
    c.segments.emplace_back(b.begin() + pos, b.begin() + pos + len);
    pos += len;
  }
  if (pos != b.size()) throw std::runtime_error("trailing bytes");
  return c;
}

}  // namespace oracle
