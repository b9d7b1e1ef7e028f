// Copyright (C) 2026 The LIC Authors
// SPDX-License-Identifier: Apache-2.0

#include "lic/nn/graph.hpp"

#include <algorithm>

#include "lic/error.hpp"
#include "lic/nn/ops.hpp"

namespace lic::nn {

std::string_view layer_kind_name(LayerKind kind) {
  switch (kind) {
    case LayerKind::kConv: return "conv";
    case LayerKind::kDeconv: return "deconv";
    case LayerKind::kGdn: return "gdn";
    case LayerKind::kIgdn: return "igdn";
    case LayerKind::kLeakyRelu: return "leaky_relu";
    case LayerKind::kResidualBlock: return "residual_block";
    case LayerKind::kAttentionBlock: return "attention_block";
    case LayerKind::kDeformConv: return "deform_conv";
    case LayerKind::kDrmDown: return "drm_down";
    case LayerKind::kDrmUp: return "drm_up";
    case LayerKind::kMaskedContextConv: return "masked_context_conv";
  }
  return "?";
}

std::string_view graph_role_name(GraphRole role) {
  switch (role) {
    case GraphRole::kAnalysis: return "g_a";
    case GraphRole::kSynthesis: return "g_s";
    case GraphRole::kHyperAnalysis: return "h_a";
    case GraphRole::kHyperSynthesis: return "h_s";
    case GraphRole::kPen1: return "pen1";
    case GraphRole::kPen2: return "pen2";
    case GraphRole::kContext: return "context";
  }
  return "?";
}

namespace {

int bottleneck_width(int channels) { return std::max(1, channels / 2); }

void add_conv(std::vector<WeightDecl>& out, const std::string& name, int c_out,
              int c_in, int k) {
  out.push_back({name + ".weight", {c_out, c_in, k, k}, WeightRole::kKernel,
                 c_in * k * k, c_out * k * k});
  out.push_back({name + ".bias", {c_out}, WeightRole::kBias, 0, 0});
}

void add_deconv(std::vector<WeightDecl>& out, const std::string& name,
                int c_in, int c_out, int k) {
  out.push_back({name + ".weight", {c_in, c_out, k, k}, WeightRole::kKernel,
                 c_in * k * k, c_out * k * k});
  out.push_back({name + ".bias", {c_out}, WeightRole::kBias, 0, 0});
}

void add_gdn(std::vector<WeightDecl>& out, const std::string& name, int c) {
  out.push_back({name + ".beta", {c}, WeightRole::kGdnBeta, 0, 0});
  out.push_back({name + ".gamma", {c, c}, WeightRole::kGdnGamma, 0, 0});
}

const Tensor& weight(const WeightStore& store, const std::string& name) {
  auto it = store.find(name);
  if (it == store.end()) {
    throw Error(ErrorCode::kShape, "missing weight '" + name + "'");
  }
  return it->second;
}

std::span<const float> bias(const WeightStore& store, const std::string& name) {
  return weight(store, name).values();
}

Tensor conv(const WeightStore& w, const std::string& name, const Tensor& x,
            int stride, const RunOptions& opt) {
  const Tensor& k = weight(w, name + ".weight");
  return conv2d(x, k, bias(w, name + ".bias"), stride, k.dim(2) / 2, opt.pool);
}

Tensor deconv(const WeightStore& w, const std::string& name, const Tensor& x,
              int stride, const RunOptions& opt) {
  const Tensor& k = weight(w, name + ".weight");
  return deconv2d(x, k, bias(w, name + ".bias"), stride, k.dim(2) / 2,
                  stride - 1, opt.pool);
}

Tensor gdn_layer(const WeightStore& w, const std::string& name, const Tensor& x,
                 bool inverse, const RunOptions& opt) {
  return gdn(x, bias(w, name + ".beta"), weight(w, name + ".gamma"), inverse,
             opt.pool);
}

Tensor deform(const WeightStore& w, const std::string& name, const Tensor& x,
              int stride, const RunOptions& opt) {
  Tensor offsets = conv(w, name + ".offset", x, stride, opt);
  clamp_inplace(offsets, -kMaxOffset, kMaxOffset);
  const Tensor& k = weight(w, name + ".deform.weight");
  return deform_conv2d(x, offsets, k, bias(w, name + ".deform.bias"), stride,
                       k.dim(2) / 2, opt.pool);
}

Tensor residual_block(const WeightStore& w, const std::string& name,
                      const Tensor& x, const RunOptions& opt) {
  Tensor t = conv(w, name + ".conv1", x, 1, opt);
  leaky_relu_inplace(t, opt.leaky_slope);
  t = conv(w, name + ".conv2", t, 1, opt);
  leaky_relu_inplace(t, opt.leaky_slope);
  add_inplace(t, x);
  return t;
}

// Three 1x1 / 3x3 / 1x1 bottleneck units with identity shortcuts, then a
// 1x1 projection.
Tensor attention_branch(const WeightStore& w, const std::string& name,
                        const Tensor& x, const RunOptions& opt) {
  Tensor cur = x;
  for (int u = 0; u < 3; ++u) {
    const std::string unit = name + "." + std::to_string(u);
    Tensor t = conv(w, unit + ".conv1", cur, 1, opt);
    leaky_relu_inplace(t, opt.leaky_slope);
    t = conv(w, unit + ".conv2", t, 1, opt);
    leaky_relu_inplace(t, opt.leaky_slope);
    t = conv(w, unit + ".conv3", t, 1, opt);
    add_inplace(t, cur);
    cur = std::move(t);
  }
  return conv(w, name + ".proj", cur, 1, opt);
}

Tensor attention_block(const WeightStore& w, const std::string& name,
                       const Tensor& x, const RunOptions& opt) {
  Tensor trunk = attention_branch(w, name + ".trunk", x, opt);
  Tensor mask = attention_branch(w, name + ".mask", x, opt);
  sigmoid_inplace(mask);
  Tensor out = x;
  add_product_inplace(out, trunk, mask);
  return out;
}

Tensor drm_down(const WeightStore& w, const std::string& name, const Tensor& x,
                const RunOptions& opt) {
  Tensor d = deform(w, name, x, 2, opt);
  leaky_relu_inplace(d, opt.leaky_slope);
  Tensor c = conv(w, name + ".conv", d, 1, opt);
  c = gdn_layer(w, name + ".gdn", c, false, opt);
  add_inplace(c, conv(w, name + ".shortcut", x, 2, opt));
  return c;
}

Tensor drm_up(const WeightStore& w, const std::string& name, const Tensor& x,
              const RunOptions& opt) {
  Tensor d = deform(w, name, x, 1, opt);
  leaky_relu_inplace(d, opt.leaky_slope);
  Tensor c = deconv(w, name + ".deconv", d, 2, opt);
  c = gdn_layer(w, name + ".igdn", c, true, opt);
  add_inplace(c, deconv(w, name + ".shortcut", x, 2, opt));
  return c;
}

}  // namespace

std::vector<WeightDecl> LayerSpec::weights() const {
  std::vector<WeightDecl> out;
  const int in = in_channels;
  const int c = out_channels;
  switch (kind) {
    case LayerKind::kConv:
      add_conv(out, name, c, in, kernel);
      break;
    case LayerKind::kDeconv:
      add_deconv(out, name, in, c, kernel);
      break;
    case LayerKind::kGdn:
    case LayerKind::kIgdn:
      add_gdn(out, name, c);
      break;
    case LayerKind::kLeakyRelu:
      break;
    case LayerKind::kResidualBlock:
      add_conv(out, name + ".conv1", c, c, 3);
      add_conv(out, name + ".conv2", c, c, 3);
      break;
    case LayerKind::kAttentionBlock: {
      const int m = bottleneck_width(c);
      for (const char* branch : {".trunk", ".mask"}) {
        for (int u = 0; u < 3; ++u) {
          const std::string unit = name + branch + "." + std::to_string(u);
          add_conv(out, unit + ".conv1", m, c, 1);
          add_conv(out, unit + ".conv2", m, m, 3);
          add_conv(out, unit + ".conv3", c, m, 1);
        }
        add_conv(out, name + branch + ".proj", c, c, 1);
      }
      break;
    }
    case LayerKind::kDeformConv:
      add_conv(out, name + ".offset", 2 * kernel * kernel, in, kernel);
      add_conv(out, name + ".deform", c, in, kernel);
      break;
    case LayerKind::kDrmDown:
      add_conv(out, name + ".offset", 18, in, 3);
      add_conv(out, name + ".deform", c, in, 3);
      add_conv(out, name + ".conv", c, c, 3);
      add_gdn(out, name + ".gdn", c);
      add_conv(out, name + ".shortcut", c, in, 1);
      break;
    case LayerKind::kDrmUp:
      add_conv(out, name + ".offset", 18, in, 3);
      add_conv(out, name + ".deform", in, in, 3);
      add_deconv(out, name + ".deconv", in, c, 3);
      add_gdn(out, name + ".igdn", c);
      add_deconv(out, name + ".shortcut", in, c, 1);
      break;
    case LayerKind::kMaskedContextConv:
      add_conv(out, name, c, in, 5);
      break;
  }
  return out;
}

int LayerSpec::output_extent(int in) const {
  switch (kind) {
    case LayerKind::kConv:
    case LayerKind::kDeformConv:
      return conv_out_size(in, kernel, stride, kernel / 2);
    case LayerKind::kDeconv:
      return (in - 1) * stride - 2 * (kernel / 2) + kernel + (stride - 1);
    case LayerKind::kDrmDown:
      return conv_out_size(in, 3, 2, 1);
    case LayerKind::kDrmUp:
      return 2 * in;
    default:
      return in;
  }
}

std::vector<WeightDecl> ModelGraph::weights() const {
  std::vector<WeightDecl> out;
  for (const LayerSpec& l : layers) {
    auto w = l.weights();
    out.insert(out.end(), w.begin(), w.end());
  }
  return out;
}

void ModelGraph::validate() const {
  if (layers.empty()) {
    throw Error(ErrorCode::kShape,
                std::string(graph_role_name(role)) + ": empty graph");
  }
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const LayerSpec& l = layers[i];
    if (l.stride != 1 && l.stride != 2) {
      throw Error(ErrorCode::kShape, l.name + ": stride must be 1 or 2");
    }
    if (i + 1 < layers.size() &&
        l.out_channels != layers[i + 1].in_channels) {
      throw Error(ErrorCode::kShape,
                  std::string(graph_role_name(role)) + ": layer " +
                      std::to_string(i) + " emits " +
                      std::to_string(l.out_channels) + " channels but layer " +
                      std::to_string(i + 1) + " expects " +
                      std::to_string(layers[i + 1].in_channels));
    }
  }
}

Tensor run_layer(const LayerSpec& layer, const WeightStore& w,
                 const Tensor& x, const RunOptions& opt) {
  if (x.rank() != 3 || x.channels() != layer.in_channels) {
    throw Error(ErrorCode::kShape,
                "input " + x.shape_string() + " has wrong channel count, " +
                    "expected " + std::to_string(layer.in_channels));
  }
  Tensor y;
  switch (layer.kind) {
    case LayerKind::kConv:
      y = conv(w, layer.name, x, layer.stride, opt);
      break;
    case LayerKind::kDeconv:
      y = deconv(w, layer.name, x, layer.stride, opt);
      break;
    case LayerKind::kGdn:
      y = gdn_layer(w, layer.name, x, false, opt);
      break;
    case LayerKind::kIgdn:
      y = gdn_layer(w, layer.name, x, true, opt);
      break;
    case LayerKind::kLeakyRelu:
      y = x;
      leaky_relu_inplace(y, opt.leaky_slope);
      return y;
    case LayerKind::kResidualBlock:
      return residual_block(w, layer.name, x, opt);
    case LayerKind::kAttentionBlock:
      return attention_block(w, layer.name, x, opt);
    case LayerKind::kDeformConv:
      y = deform(w, layer.name, x, layer.stride, opt);
      break;
    case LayerKind::kDrmDown:
      return drm_down(w, layer.name, x, opt);
    case LayerKind::kDrmUp:
      return drm_up(w, layer.name, x, opt);
    case LayerKind::kMaskedContextConv: {
      const Tensor masked = apply_checkerboard_mask(weight(w, layer.name + ".weight"));
      y = conv2d(x, masked, bias(w, layer.name + ".bias"), 1, 2, opt.pool);
      break;
    }
  }
  if (layer.activation) leaky_relu_inplace(y, opt.leaky_slope);
  return y;
}

Tensor run_graph(const ModelGraph& graph, const WeightStore& weights,
                 const Tensor& input, const RunOptions& options) {
  Tensor cur = input;
  for (std::size_t i = 0; i < graph.layers.size(); ++i) {
    const LayerSpec& layer = graph.layers[i];
    try {
      cur = run_layer(layer, weights, cur, options);
    } catch (const Error& e) {
      throw Error(e.code(), std::string(graph_role_name(graph.role)) +
                                " layer " + std::to_string(i) + " (" +
                                layer.name + ", " +
                                std::string(layer_kind_name(layer.kind)) +
                                "): " + e.what());
    }
  }
  return cur;
}

std::size_t parameter_count(const ModelGraph& graph) {
  std::size_t n = 0;
  for (const WeightDecl& d : graph.weights()) {
    std::size_t e = 1;
    for (int v : d.dims) e *= static_cast<std::size_t>(v);
    n += e;
  }
  return n;
}

Tensor apply_checkerboard_mask(const Tensor& weight) {
  if (weight.rank() != 4 || weight.dim(2) != 5 || weight.dim(3) != 5) {
    throw Error(ErrorCode::kShape, "masked context conv needs a 5x5 kernel, got " +
                                       weight.shape_string());
  }
  Tensor out = weight;
  const std::size_t planes = static_cast<std::size_t>(weight.dim(0)) * weight.dim(1);
  for (std::size_t p = 0; p < planes; ++p) {
    float* k = out.data() + p * 25;
    for (int ky = 0; ky < 5; ++ky) {
      for (int kx = 0; kx < 5; ++kx) {
        if (((ky - 2) + (kx - 2)) % 2 == 0) k[ky * 5 + kx] = 0.0f;
      }
    }
  }
  return out;
}

}  // namespace lic::nn
