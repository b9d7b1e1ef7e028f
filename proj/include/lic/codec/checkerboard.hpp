// Copyright (C) 2026 The LIC Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "lic/bitstream/container.hpp"
#include "lic/nn/model.hpp"

namespace lic::codec {

using nn::LatentTensor;
using nn::Tensor;

inline bool is_anchor(int row, int col) { return ((row + col) & 1) == 0; }

struct CheckerboardMask {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> anchor;  // H x W, 1 on anchors

  bool is_anchor(int row, int col) const {
    return anchor[static_cast<std::size_t>(row) * width + col] != 0;
  }
  std::size_t anchor_count() const;
  std::size_t nonanchor_count() const;
};

CheckerboardMask make_masks(int height, int width);

/// (y1, y2): y on anchors / non-anchors, zero elsewhere.
std::pair<LatentTensor, LatentTensor> split(const LatentTensor& y,
                                            const CheckerboardMask& mask);
LatentTensor merge(const LatentTensor& y1, const LatentTensor& y2,
                   const CheckerboardMask& mask);

/// conv2d of y1 with the checkerboard-masked 5x5 kernel, padding 2.
Tensor masked_context_conv(const Tensor& y1, const Tensor& weight,
                           std::span<const float> bias,
                           ThreadPool* pool = nullptr);
Tensor masked_context_conv(const nn::Model& model, const Tensor& y1,
                           ThreadPool* pool = nullptr);

/// Raster positions (row * W + col) of one parity class.
std::vector<std::uint32_t> parity_positions(int height, int width, bool anchors);

/// C x 1 x n tensor holding the columns of `t` at `positions`.
Tensor gather_columns(const Tensor& t, std::span<const std::uint32_t> positions);

/// Raw PEN1 output at the anchor positions (30 C_y x 1 x n_anchor). Depends on
/// T1 only; the context half of the input is the zero tensor.
Tensor compute_theta1(const nn::Model& model, const Tensor& t1,
                      ThreadPool* pool = nullptr);
/// Raw PEN2 output at the non-anchor positions (9 C_y x 1 x n_nonanchor).
Tensor compute_theta2(const nn::Model& model, const Tensor& t1,
                      const Tensor& t3, ThreadPool* pool = nullptr);

/// Mixture of latent channel `channel` from column `column` of a raw
/// parameter tensor. Value j of a channel lives in plane j * C_y + channel.
prob::Mixture anchor_mixture(const Tensor& theta1, int latent_channels,
                             int channel, std::size_t column);
prob::Mixture nonanchor_mixture(const Tensor& theta2, int latent_channels,
                                int channel, std::size_t column);

enum class DecodeMode { kTwoPass, kSerial };

struct StageTimings {
  double analysis = 0;       // g_a + h_a
  double hyper_synthesis = 0;
  double z_coding = 0;
  double theta1 = 0;
  double anchor_coding = 0;
  double theta2 = 0;         // masked context conv + PEN2
  double nonanchor_coding = 0;
  double synthesis = 0;
  double total = 0;
};

struct EncodeOptions {
  ThreadPool* pool = nullptr;
  int streams = 1;
  bool skip_zero_channels = true;
};

struct DecodeOptions {
  ThreadPool* pool = nullptr;
  DecodeMode mode = DecodeMode::kTwoPass;
  /// Upper bound on segments entropy-decoded concurrently (0 = no bound).
  int max_parallel_segments = 0;
};

struct LatentEncoding {
  bitstream::Container container;
  /// Model code length in bits per segment (-log2 of the support PMF).
  std::vector<double> estimated_bits;
  StageTimings timings;
};

struct EncodeResult {
  bitstream::Container container;
  std::vector<std::uint8_t> bytes;
  LatentTensor y_hat;
  LatentTensor z_hat;
  std::vector<double> estimated_bits;
  StageTimings timings;
};

struct LatentDecoding {
  LatentTensor y_hat;
  LatentTensor z_hat;
  std::size_t decoded_symbols = 0;  // y symbols pulled from the range decoder
  StageTimings timings;
};

struct DecodeResult {
  Tensor image;  // 3 x true H x true W in [0, 1]
  LatentTensor y_hat;
  LatentTensor z_hat;
  std::size_t decoded_symbols = 0;
  StageTimings timings;
};

/// Codes given latents. y_hat is C_y x h x w with h, w multiples of 4;
/// z_hat is C_z x h/4 x w/4 within the prior support. The container records
/// the true image size, which must fit the padded size 16 h x 16 w.
LatentEncoding encode_latents(const nn::Model& model, const LatentTensor& y_hat,
                              const LatentTensor& z_hat,
                              std::uint32_t true_width, std::uint32_t true_height,
                              const EncodeOptions& options = {});
LatentDecoding decode_latents(const bitstream::Container& container,
                              const nn::Model& model,
                              const DecodeOptions& options = {});

/// Reflection padding to multiples of kInputAlignment.
Tensor pad_to_alignment(const Tensor& image);

/// Full pipeline. x is 3 x H x W in [0, 1].
EncodeResult encode_image(const Tensor& x, const nn::Model& model,
                          const EncodeOptions& options = {});
DecodeResult decode_image(const bitstream::Container& container,
                          const nn::Model& model,
                          const DecodeOptions& options = {});
DecodeResult decode_image(std::span<const std::uint8_t> bytes,
                          const nn::Model& model,
                          const DecodeOptions& options = {});

/// x_hat = clamp(g_s(y_hat), 0, 1) cropped to the true size.
Tensor synthesize(const nn::Model& model, const LatentTensor& y_hat,
                  std::uint32_t true_width, std::uint32_t true_height,
                  ThreadPool* pool = nullptr);

/// Throws Error(kModelMismatch) if the container was not produced for this
/// model's architecture.
void check_model_matches(const bitstream::Container& container,
                         const nn::Model& model);

struct BenchReport {
  DecodeMode mode = DecodeMode::kTwoPass;
  int repeat = 0;
  StageTimings median;
  bool modes_agree = false;
};

/// Decodes `repeat` times in `mode` and reports per-stage medians. The other
/// mode is decoded once first; differing y_hat throws kAssertion.
BenchReport decode_bench(const bitstream::Container& container,
                         const nn::Model& model, DecodeMode mode,
                         ThreadPool* pool, int repeat);

StageTimings median_timings(const std::vector<StageTimings>& runs);

}  // namespace lic::codec
