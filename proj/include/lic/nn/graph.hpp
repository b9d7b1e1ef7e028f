// Copyright (C) 2026 The LIC Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "lic/nn/tensor.hpp"
#include "lic/parallel.hpp"

namespace lic::nn {

enum class LayerKind {
  kConv,
  kDeconv,
  kGdn,
  kIgdn,
  kLeakyRelu,
  kResidualBlock,
  kAttentionBlock,
  kDeformConv,
  kDrmDown,
  kDrmUp,
  kMaskedContextConv,
};

std::string_view layer_kind_name(LayerKind kind);

/// Initialization family of a weight tensor (used by fixtures).
enum class WeightRole { kKernel, kBias, kGdnBeta, kGdnGamma };

struct WeightDecl {
  std::string name;
  std::vector<int> dims;
  WeightRole role = WeightRole::kKernel;
  int fan_in = 0;
  int fan_out = 0;
};

/// One node of a graph. Composite kinds (residual, attention, DRM) carry
/// their internal shortcut edges; their weights live under `name` + suffix.
struct LayerSpec {
  LayerKind kind = LayerKind::kConv;
  std::string name;
  int in_channels = 0;
  int out_channels = 0;
  int kernel = 3;
  int stride = 1;
  bool activation = false;  // leaky ReLU after conv / deconv / deform_conv

  std::vector<WeightDecl> weights() const;
  /// Spatial output extent for an input extent.
  int output_extent(int in) const;
};

enum class GraphRole {
  kAnalysis,        // g_a
  kSynthesis,       // g_s
  kHyperAnalysis,   // h_a
  kHyperSynthesis,  // h_s
  kPen1,
  kPen2,
  kContext,         // masked 5x5 context convolution
};

std::string_view graph_role_name(GraphRole role);

struct ModelGraph {
  GraphRole role = GraphRole::kAnalysis;
  std::vector<LayerSpec> layers;

  int in_channels() const { return layers.front().in_channels; }
  int out_channels() const { return layers.back().out_channels; }
  std::vector<WeightDecl> weights() const;
  /// Throws if consecutive layers disagree on channel counts.
  void validate() const;
};

using WeightStore = std::map<std::string, Tensor, std::less<>>;

/// Evaluation-time settings shared by all layers.
struct RunOptions {
  float leaky_slope = 0.01f;
  ThreadPool* pool = nullptr;
};

/// Layer-by-layer evaluation. Errors name the failing layer index and name.
Tensor run_graph(const ModelGraph& graph, const WeightStore& weights,
                 const Tensor& input, const RunOptions& options = {});

/// Evaluates a single layer.
Tensor run_layer(const LayerSpec& layer, const WeightStore& weights,
                 const Tensor& input, const RunOptions& options = {});

/// Sum of element counts of all weights the graph declares.
std::size_t parameter_count(const ModelGraph& graph);

/// Masked 5x5 context kernel: zero every tap (di, dj) whose di + dj is even,
/// which includes the centre. Returns a masked copy.
Tensor apply_checkerboard_mask(const Tensor& weight);

/// Offsets fed to deformable convolutions are clamped to +-(k + 1) pixels.
inline constexpr float kMaxOffset = 4.0f;

}  // namespace lic::nn
