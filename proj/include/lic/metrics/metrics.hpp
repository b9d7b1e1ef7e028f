// Copyright (C) 2026 The LIC Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "lic/nn/tensor.hpp"

namespace lic::metrics {

using nn::LatentTensor;
using nn::Tensor;

inline constexpr double kPsnrCap = 100.0;

/// Mean squared difference of two equally shaped tensors.
double mse(const Tensor& a, const Tensor& b);
/// Images in [0, 1]: 10 log10(255^2 / MSE_8bit), capped at 100 dB.
double psnr(const Tensor& a, const Tensor& b);
/// Five-scale MS-SSIM, 11x11 Gaussian window (sigma 1.5), K1 = 0.01,
/// K2 = 0.03, data range 1. Needs min(H, W) >= 160.
double ms_ssim(const Tensor& a, const Tensor& b);

inline constexpr int kMsSsimMinSize = 160;

enum class Distortion { kMse, kMsSsim };

struct LossConfig {
  double lambda1 = 0.0016;
  double lambda2 = 0.0;
  double lambda3 = 0.0;
  Distortion distortion = Distortion::kMse;

  /// Throws kInvalidArgument on negative multipliers.
  void validate() const;
};

inline constexpr double kLambda1Presets[] = {0.0016, 0.0032, 0.0075, 0.015,
                                             0.03,   0.045,  0.06};

struct LossReport {
  double distortion = 0;  // D
  double h_y_bits = 0;
  double h_z_bits = 0;
  double l1 = 0;
  double teacher = 0;     // L_T
  double kd = 0;          // L_KD
  double student = 0;     // L_T + lambda3 L_KD
  double bpp = 0;
};

/// D(x, x_hat): MSE on the 8-bit scale, or 1 - MS-SSIM.
double distortion(const Tensor& x, const Tensor& x_hat, Distortion kind);

/// Sum of |y| over all elements.
double l1_norm(const LatentTensor& y);

/// L_T = lambda1 D + H_y + H_z + lambda2 L1 from precomputed terms.
double teacher_loss(double d, double h_y_bits, double h_z_bits, double l1,
                    const LossConfig& config);
/// Full report; bpp = (H_y + H_z) / pixels of x.
LossReport teacher_loss(const Tensor& x, const Tensor& x_hat, double h_y_bits,
                        double h_z_bits, const LatentTensor& y_hat,
                        const LossConfig& config);

/// Sum of the three MSE distances. Shapes must match pairwise.
double kd_loss(const Tensor& x_teacher, const Tensor& x_student,
               const Tensor& theta1_teacher, const Tensor& theta1_student,
               const Tensor& theta2_teacher, const Tensor& theta2_student);

struct SparsityReport {
  int zero_channels = 0;
  int total_channels = 0;
  std::vector<double> channel_l1;
  std::vector<bool> zero;  // per channel
};

SparsityReport sparsity_report(const LatentTensor& y);

/// "key=value" lines.
std::string format_key_values(const std::vector<std::pair<std::string, double>>& kv);

}  // namespace lic::metrics
