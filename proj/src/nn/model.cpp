// Copyright (C) 2026 The LIC Authors
// SPDX-License-Identifier: Apache-2.0

#include "lic/nn/model.hpp"

#include <cmath>
#include <random>
#include <set>

#include "lic/bytes.hpp"
#include "lic/error.hpp"
#include "lic/nn/ops.hpp"

namespace lic::nn {

namespace {

constexpr char kMagic[4] = {'L', 'I', 'C', 'M'};
constexpr std::uint8_t kVersion = 1;

LayerSpec layer(LayerKind kind, std::string name, int in, int out,
                int kernel = 3, int stride = 1, bool activation = false) {
  LayerSpec l;
  l.kind = kind;
  l.name = std::move(name);
  l.in_channels = in;
  l.out_channels = out;
  l.kernel = kernel;
  l.stride = stride;
  l.activation = activation;
  return l;
}

ModelGraph analysis_graph(const ArchConfig& a) {
  const int n = a.width;
  const int cy = a.latent_channels;
  ModelGraph g{GraphRole::kAnalysis, {}};
  auto& L = g.layers;
  L.push_back(layer(LayerKind::kDrmDown, "g_a.0", 3, n));
  L.push_back(layer(LayerKind::kResidualBlock, "g_a.1", n, n));
  L.push_back(layer(LayerKind::kDrmDown, "g_a.2", n, n));
  L.push_back(layer(LayerKind::kAttentionBlock, "g_a.3", n, n));
  L.push_back(layer(LayerKind::kResidualBlock, "g_a.4", n, n));
  L.push_back(layer(LayerKind::kDrmDown, "g_a.5", n, n));
  L.push_back(layer(LayerKind::kResidualBlock, "g_a.6", n, n));
  L.push_back(layer(LayerKind::kConv, "g_a.7", n, cy, 3, 2));
  L.push_back(layer(LayerKind::kAttentionBlock, "g_a.8", cy, cy));
  return g;
}

ModelGraph synthesis_graph(const ArchConfig& a) {
  const int m = a.decoder_width();
  const int cy = a.latent_channels;
  ModelGraph g{GraphRole::kSynthesis, {}};
  auto& L = g.layers;
  const bool full = a.cfg != 2;
  int idx = 0;
  auto name = [&] { return "g_s." + std::to_string(idx++); };
  if (full) {
    L.push_back(layer(LayerKind::kAttentionBlock, name(), cy, cy));
    L.push_back(layer(LayerKind::kResidualBlock, name(), cy, cy));
  }
  L.push_back(layer(LayerKind::kDrmUp, name(), cy, m));
  if (full) L.push_back(layer(LayerKind::kResidualBlock, name(), m, m));
  L.push_back(layer(LayerKind::kDrmUp, name(), m, m));
  if (full) {
    L.push_back(layer(LayerKind::kAttentionBlock, name(), m, m));
    L.push_back(layer(LayerKind::kResidualBlock, name(), m, m));
  }
  L.push_back(layer(LayerKind::kDrmUp, name(), m, m));
  if (full) L.push_back(layer(LayerKind::kResidualBlock, name(), m, m));
  L.push_back(layer(LayerKind::kDeconv, name(), m, 3, 3, 2));
  return g;
}

ModelGraph hyper_analysis_graph(const ArchConfig& a) {
  const int n = a.width;
  ModelGraph g{GraphRole::kHyperAnalysis, {}};
  auto& L = g.layers;
  L.push_back(layer(LayerKind::kConv, "h_a.0", a.latent_channels, n, 3, 1, true));
  L.push_back(layer(LayerKind::kConv, "h_a.1", n, n, 3, 2, true));
  L.push_back(layer(LayerKind::kConv, "h_a.2", n, n, 3, 1, true));
  L.push_back(layer(LayerKind::kConv, "h_a.3", n, a.hyper_channels, 3, 2, false));
  return g;
}

ModelGraph hyper_synthesis_graph(const ArchConfig& a) {
  const int n = a.width;
  ModelGraph g{GraphRole::kHyperSynthesis, {}};
  auto& L = g.layers;
  L.push_back(layer(LayerKind::kConv, "h_s.0", a.hyper_channels, n, 3, 1, true));
  L.push_back(layer(LayerKind::kDeconv, "h_s.1", n, n, 3, 2, true));
  L.push_back(layer(LayerKind::kConv, "h_s.2", n, n, 3, 1, true));
  L.push_back(layer(LayerKind::kDeconv, "h_s.3", n, n, 3, 2, true));
  L.push_back(layer(LayerKind::kConv, "h_s.4", n, a.hyper_output_channels(), 3,
                    1, false));
  return g;
}

ModelGraph pen_graph(GraphRole role, const std::string& prefix, int cy,
                     int values_per_element) {
  const int in = 4 * cy;
  const int h1 = (10 * cy + 2) / 3;
  const int h2 = (8 * cy + 2) / 3;
  ModelGraph g{role, {}};
  auto& L = g.layers;
  L.push_back(layer(LayerKind::kConv, prefix + ".0", in, h1, 1, 1, true));
  L.push_back(layer(LayerKind::kConv, prefix + ".1", h1, h2, 1, 1, true));
  L.push_back(layer(LayerKind::kConv, prefix + ".2", h2,
                    values_per_element * cy, 1, 1, false));
  return g;
}

std::vector<WeightDecl> all_weights(const ModelGraphs& graphs) {
  std::vector<WeightDecl> out;
  for (const ModelGraph* g : graphs.all()) {
    auto w = g->weights();
    out.insert(out.end(), w.begin(), w.end());
  }
  return out;
}

}  // namespace

int ArchConfig::decoder_width() const {
  switch (cfg) {
    case 3: return (3 * width + 3) / 4;
    case 4: return (width + 1) / 2;
    default: return width;
  }
}

void ArchConfig::validate() const {
  if (cfg < 1 || cfg > 4) {
    throw Error(ErrorCode::kInvalidArgument,
                "invalid decoder configuration " + std::to_string(cfg) +
                    " (expected 1-4)");
  }
  if (width < 1 || latent_channels < 1 || hyper_channels < 1 ||
      width > 65535 || latent_channels > 2000 || hyper_channels > 65535) {
    throw Error(ErrorCode::kInvalidArgument, "invalid channel widths");
  }
}

ModelGraphs build_config(const ArchConfig& arch) {
  arch.validate();
  ModelGraphs g;
  g.analysis = analysis_graph(arch);
  g.synthesis = synthesis_graph(arch);
  g.hyper_analysis = hyper_analysis_graph(arch);
  g.hyper_synthesis = hyper_synthesis_graph(arch);
  g.context = ModelGraph{GraphRole::kContext,
                         {layer(LayerKind::kMaskedContextConv, "context",
                                arch.latent_channels, arch.context_channels(),
                                5)}};
  g.pen1 = pen_graph(GraphRole::kPen1, "pen1", arch.latent_channels,
                     prob::kGllmmValues);
  g.pen2 = pen_graph(GraphRole::kPen2, "pen2", arch.latent_channels,
                     prob::kGmmValues);
  for (const ModelGraph* graph : g.all()) graph->validate();
  return g;
}

ModelGraphs build_config(int cfg, int width, int latent_channels,
                         int hyper_channels) {
  return build_config(ArchConfig{cfg, width, latent_channels, hyper_channels});
}

ParameterReport parameter_report(const ModelGraphs& g) {
  ParameterReport r;
  r.analysis = parameter_count(g.analysis);
  r.synthesis = parameter_count(g.synthesis);
  r.hyper_analysis = parameter_count(g.hyper_analysis);
  r.hyper_synthesis = parameter_count(g.hyper_synthesis);
  r.context = parameter_count(g.context);
  r.pen1 = parameter_count(g.pen1);
  r.pen2 = parameter_count(g.pen2);
  r.total = r.analysis + r.synthesis + r.hyper_analysis + r.hyper_synthesis +
            r.context + r.pen1 + r.pen2;
  return r;
}

Model::Model(ModelFile file)
    : file_(std::move(file)), graphs_(build_config(file_.arch)) {
  for (const WeightDecl& d : all_weights(graphs_)) {
    auto it = file_.weights.find(d.name);
    if (it == file_.weights.end()) {
      throw Error(ErrorCode::kFormat, "model is missing tensor '" + d.name + "'");
    }
    if (it->second.dims() != d.dims) {
      throw Error(ErrorCode::kFormat,
                  "tensor '" + d.name + "' has shape " +
                      it->second.shape_string() + ", configuration expects " +
                      shape_string(d.dims));
    }
  }
  if (static_cast<int>(file_.prior.channels.size()) != file_.arch.hyper_channels) {
    throw Error(ErrorCode::kFormat, "prior has " +
                                        std::to_string(file_.prior.channels.size()) +
                                        " channels, expected " +
                                        std::to_string(file_.arch.hyper_channels));
  }
  for (const auto& cdf : file_.prior.channels) {
    if (!cdf.valid()) throw Error(ErrorCode::kFormat, "invalid prior CDF table");
  }
  leaky_slope_ = kDefaultLeakySlope;
  if (auto it = file_.weights.find(kLeakySlopeTensor); it != file_.weights.end()) {
    if (it->second.size() != 1) {
      throw Error(ErrorCode::kFormat, "leaky ReLU slope tensor must hold one value");
    }
    leaky_slope_ = it->second.data()[0];
  }
  masked_context_ = apply_checkerboard_mask(tensor("context.weight"));
}

const Tensor& Model::tensor(const std::string& name) const {
  auto it = file_.weights.find(name);
  if (it == file_.weights.end()) {
    throw Error(ErrorCode::kFormat, "model is missing tensor '" + name + "'");
  }
  return it->second;
}

std::vector<std::uint8_t> save_model(const ModelFile& model) {
  ByteWriter w;
  w.bytes({reinterpret_cast<const std::uint8_t*>(kMagic), 4});
  w.u8(kVersion);
  w.u8(static_cast<std::uint8_t>(model.arch.cfg));
  w.u16(static_cast<std::uint16_t>(model.arch.width));
  w.u16(static_cast<std::uint16_t>(model.arch.latent_channels));
  w.u16(static_cast<std::uint16_t>(model.arch.hyper_channels));
  w.u32(static_cast<std::uint32_t>(model.weights.size()));
  for (const auto& [name, t] : model.weights) {
    w.u16(static_cast<std::uint16_t>(name.size()));
    w.str(name);
    w.u8(static_cast<std::uint8_t>(t.rank()));
    for (int d : t.dims()) w.u32(static_cast<std::uint32_t>(d));
    for (float v : t.values()) w.f32(v);
  }
  prob::write_prior(w, model.prior);
  return w.take();
}

ModelFile load_model(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  if (bytes.size() < 4 || r.str(4) != std::string_view(kMagic, 4)) {
    throw Error(ErrorCode::kFormat, "not a model file");
  }
  const int version = r.u8();
  if (version != kVersion) {
    throw Error(ErrorCode::kUnsupported,
                "unsupported model file version " + std::to_string(version));
  }
  ModelFile m;
  m.arch.cfg = r.u8();
  m.arch.width = r.u16();
  m.arch.latent_channels = r.u16();
  m.arch.hyper_channels = r.u16();
  try {
    m.arch.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kFormat, std::string("model header: ") + e.what());
  }
  const ModelGraphs graphs = build_config(m.arch);
  std::set<std::string> expected{std::string(kLeakySlopeTensor)};
  for (const WeightDecl& d : all_weights(graphs)) expected.insert(d.name);

  const std::uint32_t count = r.u32();
  for (std::uint32_t i = 0; i < count; ++i) {
    std::string name = r.str(r.u16());
    const int rank = r.u8();
    std::vector<int> dims(rank);
    std::size_t elements = 1;
    for (int& d : dims) {
      const std::uint32_t v = r.u32();
      if (v > (1u << 28)) throw Error(ErrorCode::kFormat, "tensor '" + name + "' too large");
      d = static_cast<int>(v);
      elements *= v;
    }
    if (elements * 4 > r.remaining()) {
      throw Error(ErrorCode::kTruncated, "unexpected end of file");
    }
    if (!expected.count(name)) {
      throw Error(ErrorCode::kFormat, "unexpected tensor '" + name +
                                          "' for this configuration");
    }
    Tensor t(dims);
    for (float& v : t.values()) v = r.f32();
    if (!m.weights.emplace(name, std::move(t)).second) {
      throw Error(ErrorCode::kFormat, "duplicate tensor '" + name + "'");
    }
  }
  m.prior = prob::read_prior(r);
  if (r.remaining() != 0) {
    throw Error(ErrorCode::kFormat, "trailing bytes after model payload");
  }
  for (const ModelGraph* g : graphs.all()) {
    for (const LayerSpec& l : g->layers) {
      for (const WeightDecl& d : l.weights()) {
        auto it = m.weights.find(d.name);
        if (it == m.weights.end()) continue;  // reported by Model
        if (d.role == WeightRole::kGdnBeta) {
          for (float& v : it->second.values()) v = std::max(v, kGdnBetaMin);
        } else if (d.role == WeightRole::kGdnGamma) {
          for (float& v : it->second.values()) v = std::max(v, 0.0f);
        }
      }
    }
  }
  Model check(m);  // names, shapes, prior
  return m;
}

void save_model_file(const std::string& path, const ModelFile& model) {
  write_file(path, save_model(model));
}

ModelFile load_model_file(const std::string& path) {
  return load_model(read_file(path));
}

namespace {

class FixtureRng {
 public:
  explicit FixtureRng(std::uint64_t seed) : engine_(seed) {}
  // Platform-independent uniform [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double symmetric(double a) { return a * (2.0 * uniform() - 1.0); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace

ModelFile gen_fixture(const FixtureOptions& options) {
  ModelFile m;
  m.arch = options.arch;
  const ModelGraphs graphs = build_config(m.arch);
  FixtureRng rng(options.seed);
  for (const WeightDecl& d : all_weights(graphs)) {
    Tensor t(d.dims);
    switch (d.role) {
      case WeightRole::kKernel: {
        const double bound = std::sqrt(6.0 / (d.fan_in + d.fan_out));
        for (float& v : t.values()) v = static_cast<float>(rng.symmetric(bound));
        break;
      }
      case WeightRole::kBias:
        break;
      case WeightRole::kGdnBeta:
        for (float& v : t.values()) v = 1.0f;
        break;
      case WeightRole::kGdnGamma: {
        const int c = d.dims[0];
        for (int i = 0; i < c; ++i) t.data()[i * c + i] = 0.1f;
        break;
      }
    }
    m.weights.emplace(d.name, std::move(t));
  }
  if (options.latent_gain != 1.0f) {
    for (float& v : m.weights.at("g_a.7.weight").values()) v *= options.latent_gain;
  }
  Tensor slope(std::vector<int>{1});
  slope.data()[0] = kDefaultLeakySlope;
  m.weights.emplace(std::string(kLeakySlopeTensor), std::move(slope));

  for (int c = 0; c < m.arch.hyper_channels; ++c) {
    prob::Mixture mix;
    mix.add({prob::Family::kLogistic, 1.0, 0.0, 0.5 + 2.5 * rng.uniform()});
    m.prior.channels.push_back(prob::build_quantized_cdf(mix, -32, 32, 16));
  }
  return m;
}

}  // namespace lic::nn
