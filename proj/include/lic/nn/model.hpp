// Copyright (C) 2026 The LIC Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lic/nn/graph.hpp"
#include "lic/prob/quantized_cdf.hpp"

namespace lic::nn {

/// Architecture: decoder configuration id and channel widths.
///   cfg 1: full decoder
///   cfg 2: decoder without attention and residual blocks
///   cfg 3: decoder widths ceil(0.75 N)
///   cfg 4: decoder widths ceil(0.5 N)
/// Encoder, hyper networks, context model and PENs are the same for all.
struct ArchConfig {
  int cfg = 1;
  int width = 128;            // N
  int latent_channels = 128;  // C_y
  int hyper_channels = 128;   // C_z

  int decoder_width() const;
  int context_channels() const { return 2 * latent_channels; }
  int hyper_output_channels() const { return 2 * latent_channels; }
  void validate() const;
  bool operator==(const ArchConfig&) const = default;
};

struct ModelGraphs {
  ModelGraph analysis;         // g_a: 3 -> C_y, /16
  ModelGraph synthesis;        // g_s: C_y -> 3, x16
  ModelGraph hyper_analysis;   // h_a: C_y -> C_z, /4
  ModelGraph hyper_synthesis;  // h_s: C_z -> 2 C_y, x4
  ModelGraph context;          // masked 5x5: C_y -> 2 C_y
  ModelGraph pen1;             // 4 C_y -> 30 C_y (GLLMM)
  ModelGraph pen2;             // 4 C_y -> 9 C_y (GMM)

  std::vector<const ModelGraph*> all() const {
    return {&analysis, &synthesis, &hyper_analysis, &hyper_synthesis,
            &context,  &pen1,      &pen2};
  }
};

ModelGraphs build_config(const ArchConfig& arch);
ModelGraphs build_config(int cfg, int width, int latent_channels,
                         int hyper_channels);

/// Spatial alignment required of codec inputs: 16 for the core transform
/// times 4 for the hyper transform.
inline constexpr int kInputAlignment = 64;

inline constexpr std::string_view kLeakySlopeTensor = "meta.leaky_relu_slope";

/// Contents of a ".licm" file.
struct ModelFile {
  ArchConfig arch;
  WeightStore weights;
  prob::FactorizedPrior prior;
};

/// Immutable, validated model. Safe to share across threads.
class Model {
 public:
  explicit Model(ModelFile file);

  const ArchConfig& arch() const { return file_.arch; }
  const ModelGraphs& graphs() const { return graphs_; }
  const WeightStore& weights() const { return file_.weights; }
  const prob::FactorizedPrior& prior() const { return file_.prior; }
  const ModelFile& file() const { return file_; }
  float leaky_slope() const { return leaky_slope_; }

  const Tensor& tensor(const std::string& name) const;
  /// Context kernel with the checkerboard mask already applied.
  const Tensor& masked_context_weight() const { return masked_context_; }

  RunOptions run_options(ThreadPool* pool) const { return {leaky_slope_, pool}; }

 private:
  ModelFile file_;
  ModelGraphs graphs_;
  float leaky_slope_;
  Tensor masked_context_;
};

struct ParameterReport {
  std::size_t analysis = 0;
  std::size_t synthesis = 0;
  std::size_t hyper_analysis = 0;
  std::size_t hyper_synthesis = 0;
  std::size_t context = 0;
  std::size_t pen1 = 0;
  std::size_t pen2 = 0;
  std::size_t total = 0;
};

ParameterReport parameter_report(const ModelGraphs& graphs);

/// Serialized layout (little-endian): "LICM", u8 version = 1, u8 cfg,
/// u16 N, u16 C_y, u16 C_z, u32 tensor count; per tensor u16 name length,
/// name, u8 rank, rank x u32 dims, raw f32 data; then the prior block.
std::vector<std::uint8_t> save_model(const ModelFile& model);
/// Validates magic, version, tensor names and shapes against the
/// architecture. GDN parameters are clamped (beta >= 1e-6, gamma >= 0).
ModelFile load_model(std::span<const std::uint8_t> bytes);

void save_model_file(const std::string& path, const ModelFile& model);
ModelFile load_model_file(const std::string& path);

struct FixtureOptions {
  std::uint64_t seed = 0;
  ArchConfig arch;
  /// Multiplier on the final analysis convolution; > 1 spreads the latent
  /// over more integer symbols.
  float latent_gain = 1.0f;
};

/// Seeded stand-in weights: kernels uniform in +-sqrt(6 / (fan_in +
/// fan_out)), zero biases, GDN beta = 1 and gamma = 0.1 I, and per-channel
/// logistic priors for the hyper latent over [-32, 32] at 16-bit precision.
ModelFile gen_fixture(const FixtureOptions& options);

}  // namespace lic::nn
