// Copyright (C) 2026 The LIC Authors
// SPDX-License-Identifier: Apache-2.0

#include "lic/metrics/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

#include "lic/error.hpp"

namespace lic::metrics {

namespace {

void check_same(const Tensor& a, const Tensor& b, const char* what) {
  if (!a.same_shape(b)) {
    throw Error(ErrorCode::kShape, std::string(what) + ": shape mismatch " +
                                       a.shape_string() + " vs " + b.shape_string());
  }
}

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;
constexpr std::array<double, 5> kScaleWeights = {0.0448, 0.2856, 0.3001, 0.2363,
                                                 0.1333};

struct Plane {
  int h = 0;
  int w = 0;
  std::vector<double> v;
  double& at(int y, int x) { return v[static_cast<std::size_t>(y) * w + x]; }
  double at(int y, int x) const { return v[static_cast<std::size_t>(y) * w + x]; }
};

std::array<double, kWindow> gaussian_window() {
  std::array<double, kWindow> g{};
  double sum = 0;
  for (int i = 0; i < kWindow; ++i) {
    const double d = i - kWindow / 2;
    g[i] = std::exp(-(d * d) / (2 * kSigma * kSigma));
    sum += g[i];
  }
  for (double& x : g) x /= sum;
  return g;
}

// Valid separable filtering; an axis shorter than the window is left
// unfiltered.
Plane blur(const Plane& p) {
  static const auto g = gaussian_window();
  Plane a = p;
  if (p.h >= kWindow) {
    a.h = p.h - kWindow + 1;
    a.v.assign(static_cast<std::size_t>(a.h) * a.w, 0.0);
    for (int y = 0; y < a.h; ++y) {
      for (int x = 0; x < a.w; ++x) {
        double s = 0;
        for (int k = 0; k < kWindow; ++k) s += g[k] * p.at(y + k, x);
        a.at(y, x) = s;
      }
    }
  }
  Plane b = a;
  if (a.w >= kWindow) {
    b.w = a.w - kWindow + 1;
    b.v.assign(static_cast<std::size_t>(b.h) * b.w, 0.0);
    for (int y = 0; y < b.h; ++y) {
      for (int x = 0; x < b.w; ++x) {
        double s = 0;
        for (int k = 0; k < kWindow; ++k) s += g[k] * a.at(y, x + k);
        b.at(y, x) = s;
      }
    }
  }
  return b;
}

// 2x2 average pooling; odd axes get one zero pad on each side, counted in
// the average.
Plane downsample(const Plane& p) {
  const int ph = p.h % 2;
  const int pw = p.w % 2;
  Plane o;
  o.h = (p.h + 2 * ph - 2) / 2 + 1;
  o.w = (p.w + 2 * pw - 2) / 2 + 1;
  o.v.assign(static_cast<std::size_t>(o.h) * o.w, 0.0);
  for (int y = 0; y < o.h; ++y) {
    for (int x = 0; x < o.w; ++x) {
      double s = 0;
      for (int dy = 0; dy < 2; ++dy) {
        for (int dx = 0; dx < 2; ++dx) {
          const int sy = 2 * y + dy - ph;
          const int sx = 2 * x + dx - pw;
          if (sy >= 0 && sy < p.h && sx >= 0 && sx < p.w) s += p.at(sy, sx);
        }
      }
      o.at(y, x) = s / 4.0;
    }
  }
  return o;
}

Plane product(const Plane& a, const Plane& b) {
  Plane o = a;
  for (std::size_t i = 0; i < o.v.size(); ++i) o.v[i] = a.v[i] * b.v[i];
  return o;
}

// (mean ssim, mean cs) of one scale.
std::pair<double, double> ssim_scale(const Plane& x, const Plane& y) {
  const Plane mx = blur(x);
  const Plane my = blur(y);
  const Plane sxx = blur(product(x, x));
  const Plane syy = blur(product(y, y));
  const Plane sxy = blur(product(x, y));
  double ssim = 0;
  double cs = 0;
  for (std::size_t i = 0; i < mx.v.size(); ++i) {
    const double m1 = mx.v[i];
    const double m2 = my.v[i];
    const double v1 = sxx.v[i] - m1 * m1;
    const double v2 = syy.v[i] - m2 * m2;
    const double v12 = sxy.v[i] - m1 * m2;
    const double c = (2 * v12 + kC2) / (v1 + v2 + kC2);
    cs += c;
    ssim += (2 * m1 * m2 + kC1) / (m1 * m1 + m2 * m2 + kC1) * c;
  }
  const double n = static_cast<double>(mx.v.size());
  return {ssim / n, cs / n};
}

}  // namespace

double mse(const Tensor& a, const Tensor& b) {
  check_same(a, b, "mse");
  if (a.size() == 0) return 0.0;
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a.data()[i]) - b.data()[i];
    s += d * d;
  }
  return s / static_cast<double>(a.size());
}

double psnr(const Tensor& a, const Tensor& b) {
  const double m8 = mse(a, b) * 255.0 * 255.0;
  if (m8 == 0.0) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(255.0 * 255.0 / m8));
}

double ms_ssim(const Tensor& a, const Tensor& b) {
  check_same(a, b, "ms_ssim");
  if (a.rank() != 3 || std::min(a.height(), a.width()) < kMsSsimMinSize) {
    throw Error(ErrorCode::kInvalidArgument,
                "image too small for 5-scale MS-SSIM (min side " +
                    std::to_string(kMsSsimMinSize) + ")");
  }
  double total = 0;
  for (int c = 0; c < a.channels(); ++c) {
    Plane x{a.height(), a.width(), {}};
    Plane y = x;
    x.v.assign(a.plane(c), a.plane(c) + a.plane_size());
    y.v.assign(b.plane(c), b.plane(c) + b.plane_size());
    double value = 1.0;
    for (std::size_t s = 0; s < kScaleWeights.size(); ++s) {
      const auto [ssim, cs] = ssim_scale(x, y);
      const bool last = s + 1 == kScaleWeights.size();
      value *= std::pow(std::max(last ? ssim : cs, 0.0), kScaleWeights[s]);
      if (!last) {
        x = downsample(x);
        y = downsample(y);
      }
    }
    total += value;
  }
  return total / a.channels();
}

void LossConfig::validate() const {
  if (!(lambda1 >= 0) || !(lambda2 >= 0) || !(lambda3 >= 0)) {
    throw Error(ErrorCode::kInvalidArgument, "loss multipliers must be non-negative");
  }
}

double distortion(const Tensor& x, const Tensor& x_hat, Distortion kind) {
  return kind == Distortion::kMse ? mse(x, x_hat) * 255.0 * 255.0
                                  : 1.0 - ms_ssim(x, x_hat);
}

double l1_norm(const LatentTensor& y) {
  double s = 0;
  for (std::int32_t v : y.data) s += std::abs(static_cast<double>(v));
  return s;
}

double teacher_loss(double d, double h_y_bits, double h_z_bits, double l1,
                    const LossConfig& config) {
  config.validate();
  return config.lambda1 * d + h_y_bits + h_z_bits + config.lambda2 * l1;
}

LossReport teacher_loss(const Tensor& x, const Tensor& x_hat, double h_y_bits,
                        double h_z_bits, const LatentTensor& y_hat,
                        const LossConfig& config) {
  LossReport r;
  r.distortion = distortion(x, x_hat, config.distortion);
  r.h_y_bits = h_y_bits;
  r.h_z_bits = h_z_bits;
  r.l1 = l1_norm(y_hat);
  r.teacher = teacher_loss(r.distortion, h_y_bits, h_z_bits, r.l1, config);
  r.student = r.teacher + config.lambda3 * r.kd;
  r.bpp = (h_y_bits + h_z_bits) / (static_cast<double>(x.height()) * x.width());
  return r;
}

double kd_loss(const Tensor& x_teacher, const Tensor& x_student,
               const Tensor& theta1_teacher, const Tensor& theta1_student,
               const Tensor& theta2_teacher, const Tensor& theta2_student) {
  check_same(x_teacher, x_student, "kd_loss reconstruction");
  auto theta = [](const Tensor& t, const Tensor& s, const char* name) {
    if (!t.same_shape(s)) {
      throw Error(ErrorCode::kShape,
                  std::string("kd_loss: ") + name + " shapes differ (" +
                      t.shape_string() + " vs " + s.shape_string() +
                      "); teacher and student parameter widths must agree, "
                      "project the student output first");
    }
    return mse(t, s);
  };
  return mse(x_teacher, x_student) +
         theta(theta1_teacher, theta1_student, "theta1") +
         theta(theta2_teacher, theta2_student, "theta2");
}

SparsityReport sparsity_report(const LatentTensor& y) {
  SparsityReport r;
  r.total_channels = y.channels;
  const std::size_t hw = y.plane_size();
  for (int c = 0; c < y.channels; ++c) {
    double s = 0;
    for (std::size_t p = 0; p < hw; ++p) {
      s += std::abs(static_cast<double>(y.data[c * hw + p]));
    }
    r.channel_l1.push_back(s);
    r.zero.push_back(s == 0.0);
    if (s == 0.0) ++r.zero_channels;
  }
  return r;
}

std::string format_key_values(const std::vector<std::pair<std::string, double>>& kv) {
  std::string out;
  char buf[64];
  for (const auto& [k, v] : kv) {
    std::snprintf(buf, sizeof buf, "%.10g", v);
    out += k + "=" + buf + "\n";
  }
  return out;
}

}  // namespace lic::metrics
