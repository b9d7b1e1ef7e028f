// Copyright (C) 2026 The LIC Authors
// SPDX-License-Identifier: Apache-2.0

#include "lic/codec/checkerboard.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <optional>

#include "lic/error.hpp"
#include "lic/nn/ops.hpp"
#include "lic/rc/range_coder.hpp"

namespace lic::codec {

namespace {

using bitstream::Container;
using bitstream::SymbolBounds;
using Clock = std::chrono::steady_clock;

constexpr int kPrecision = prob::kDefaultPrecision;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void run_tasks(ThreadPool* pool, std::size_t n, int cap,
               const std::function<void(std::size_t)>& fn) {
  if (!pool || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const std::size_t wave = cap > 0 ? static_cast<std::size_t>(cap) : n;
  for (std::size_t b = 0; b < n; b += wave) {
    pool->parallel_for(b, std::min(n, b + wave), fn);
  }
}

// raw[j] = base[(j * C_y + channel) * stride]
prob::Mixture mixture_at(const float* base, std::size_t stride,
                         int latent_channels, int channel, bool gllmm) {
  std::array<float, prob::kGllmmValues> raw{};
  const int values = gllmm ? prob::kGllmmValues : prob::kGmmValues;
  for (int j = 0; j < values; ++j) {
    raw[j] = base[(static_cast<std::size_t>(j) * latent_channels + channel) * stride];
  }
  return gllmm ? prob::gllmm_from_raw({raw.data(), static_cast<std::size_t>(values)})
               : prob::gmm_from_raw({raw.data(), static_cast<std::size_t>(values)});
}

// One 1x1 PEN evaluated on a single input column; same per-element order as
// the batched path.
std::vector<float> pen_column(const nn::ModelGraph& graph,
                              const nn::WeightStore& weights,
                              std::vector<float> x, float slope) {
  for (const nn::LayerSpec& l : graph.layers) {
    const nn::Tensor& w = weights.find(l.name + ".weight")->second;
    const nn::Tensor& b = weights.find(l.name + ".bias")->second;
    const std::size_t in = static_cast<std::size_t>(l.in_channels);
    std::vector<float> y(static_cast<std::size_t>(l.out_channels));
    for (std::size_t o = 0; o < y.size(); ++o) {
      float acc = b.data()[o];
      const float* wk = w.data() + o * in;
      for (std::size_t i = 0; i < in; ++i) acc += wk[i] * x[i];
      y[o] = l.activation ? nn::leaky_relu(acc, slope) : acc;
    }
    x = std::move(y);
  }
  return x;
}

// Scratch tables for one symbol at a time.
struct SymbolTable {
  std::vector<double> pmf;
  std::vector<std::uint32_t> cum;

  void build(const prob::Mixture& m, const SymbolBounds& b) {
    const std::size_t n = static_cast<std::size_t>(b.hi - b.lo) + 1;
    pmf.resize(n);
    cum.resize(n + 1);
    prob::support_pmf(m, b.lo, b.hi, pmf);
    prob::quantize_pmf(pmf, kPrecision, cum);
  }
  double bits(std::size_t index) const {
    return -std::log2(std::max(pmf[index], std::ldexp(1.0, -kPrecision)));
  }
};

std::vector<int> channel_ranks(const std::vector<bool>& present) {
  std::vector<int> rank(present.size(), -1);
  int r = 0;
  for (std::size_t c = 0; c < present.size(); ++c) {
    if (present[c]) rank[c] = r++;
  }
  return rank;
}

Tensor hyper_synthesis(const nn::Model& model, const LatentTensor& z_hat,
                       ThreadPool* pool) {
  return nn::run_graph(model.graphs().hyper_synthesis, model.weights(),
                       nn::dequantize(z_hat), model.run_options(pool));
}

void check_latent_shapes(const nn::Model& model, const LatentTensor& y_hat,
                         const LatentTensor& z_hat) {
  const auto& a = model.arch();
  if (y_hat.channels != a.latent_channels || y_hat.height % 4 != 0 ||
      y_hat.width % 4 != 0 || y_hat.height == 0 || y_hat.width == 0) {
    throw Error(ErrorCode::kShape, "latent must be C_y x h x w with h, w multiples of 4");
  }
  if (z_hat.channels != a.hyper_channels || z_hat.height * 4 != y_hat.height ||
      z_hat.width * 4 != y_hat.width) {
    throw Error(ErrorCode::kShape, "hyper latent shape does not match latent");
  }
}

}  // namespace

std::size_t CheckerboardMask::anchor_count() const {
  return static_cast<std::size_t>(std::count(anchor.begin(), anchor.end(), 1));
}

std::size_t CheckerboardMask::nonanchor_count() const {
  return anchor.size() - anchor_count();
}

CheckerboardMask make_masks(int height, int width) {
  if (height < 1 || width < 1) {
    throw Error(ErrorCode::kInvalidArgument, "mask dimensions must be positive");
  }
  CheckerboardMask m;
  m.height = height;
  m.width = width;
  m.anchor.resize(static_cast<std::size_t>(height) * width);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      m.anchor[static_cast<std::size_t>(r) * width + c] = is_anchor(r, c) ? 1 : 0;
    }
  }
  return m;
}

std::pair<LatentTensor, LatentTensor> split(const LatentTensor& y,
                                            const CheckerboardMask& mask) {
  if (y.height != mask.height || y.width != mask.width) {
    throw Error(ErrorCode::kShape, "split: mask does not match latent size");
  }
  LatentTensor a(y.channels, y.height, y.width);
  LatentTensor b(y.channels, y.height, y.width);
  const std::size_t hw = y.plane_size();
  for (int c = 0; c < y.channels; ++c) {
    for (std::size_t p = 0; p < hw; ++p) {
      const std::size_t i = c * hw + p;
      (mask.anchor[p] ? a : b).data[i] = y.data[i];
    }
  }
  return {std::move(a), std::move(b)};
}

LatentTensor merge(const LatentTensor& y1, const LatentTensor& y2,
                   const CheckerboardMask& mask) {
  if (y1.channels != y2.channels || y1.height != y2.height ||
      y1.width != y2.width || y1.height != mask.height ||
      y1.width != mask.width) {
    throw Error(ErrorCode::kShape, "merge: shapes disagree");
  }
  LatentTensor y(y1.channels, y1.height, y1.width);
  const std::size_t hw = y.plane_size();
  for (int c = 0; c < y.channels; ++c) {
    for (std::size_t p = 0; p < hw; ++p) {
      const std::size_t i = c * hw + p;
      y.data[i] = mask.anchor[p] ? y1.data[i] : y2.data[i];
    }
  }
  return y;
}

Tensor masked_context_conv(const Tensor& y1, const Tensor& weight,
                           std::span<const float> bias, ThreadPool* pool) {
  return nn::conv2d(y1, nn::apply_checkerboard_mask(weight), bias, 1, 2, pool);
}

Tensor masked_context_conv(const nn::Model& model, const Tensor& y1,
                           ThreadPool* pool) {
  return nn::conv2d(y1, model.masked_context_weight(),
                    model.tensor("context.bias").values(), 1, 2, pool);
}

std::vector<std::uint32_t> parity_positions(int height, int width, bool anchors) {
  std::vector<std::uint32_t> out;
  out.reserve((static_cast<std::size_t>(height) * width + 1) / 2);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      if (is_anchor(r, c) == anchors) {
        out.push_back(static_cast<std::uint32_t>(r) * width + c);
      }
    }
  }
  return out;
}

Tensor gather_columns(const Tensor& t, std::span<const std::uint32_t> positions) {
  Tensor out(t.channels(), 1, static_cast<int>(positions.size()));
  for (int c = 0; c < t.channels(); ++c) {
    const float* src = t.plane(c);
    float* dst = out.plane(c);
    for (std::size_t i = 0; i < positions.size(); ++i) dst[i] = src[positions[i]];
  }
  return out;
}

Tensor compute_theta1(const nn::Model& model, const Tensor& t1, ThreadPool* pool) {
  const auto positions = parity_positions(t1.height(), t1.width(), true);
  const Tensor cols = gather_columns(t1, positions);
  const Tensor zeros(model.arch().context_channels(), 1,
                     static_cast<int>(positions.size()));
  return nn::run_graph(model.graphs().pen1, model.weights(),
                       nn::concat_channels(cols, zeros), model.run_options(pool));
}

Tensor compute_theta2(const nn::Model& model, const Tensor& t1, const Tensor& t3,
                      ThreadPool* pool) {
  const auto positions = parity_positions(t1.height(), t1.width(), false);
  return nn::run_graph(model.graphs().pen2, model.weights(),
                       nn::concat_channels(gather_columns(t1, positions),
                                           gather_columns(t3, positions)),
                       model.run_options(pool));
}

prob::Mixture anchor_mixture(const Tensor& theta1, int latent_channels,
                             int channel, std::size_t column) {
  return mixture_at(theta1.data() + column, theta1.plane_size(), latent_channels,
                    channel, true);
}

prob::Mixture nonanchor_mixture(const Tensor& theta2, int latent_channels,
                                int channel, std::size_t column) {
  return mixture_at(theta2.data() + column, theta2.plane_size(), latent_channels,
                    channel, false);
}

void check_model_matches(const Container& c, const nn::Model& model) {
  const auto& a = model.arch();
  if (c.cfg != a.cfg || c.width_n != a.width ||
      c.latent_channels != a.latent_channels ||
      c.hyper_channels != a.hyper_channels) {
    throw Error(ErrorCode::kModelMismatch,
                "bitstream was coded for cfg " + std::to_string(c.cfg) + " N " +
                    std::to_string(c.width_n) + " C_y " +
                    std::to_string(c.latent_channels) + " C_z " +
                    std::to_string(c.hyper_channels) + ", model is cfg " +
                    std::to_string(a.cfg) + " N " + std::to_string(a.width) +
                    " C_y " + std::to_string(a.latent_channels) + " C_z " +
                    std::to_string(a.hyper_channels));
  }
}

LatentEncoding encode_latents(const nn::Model& model, const LatentTensor& y_hat,
                              const LatentTensor& z_hat, std::uint32_t true_width,
                              std::uint32_t true_height,
                              const EncodeOptions& options) {
  check_latent_shapes(model, y_hat, z_hat);
  if (options.streams < 1 || options.streams > bitstream::kMaxStreams) {
    throw Error(ErrorCode::kInvalidArgument,
                "streams must be in [1, " + std::to_string(bitstream::kMaxStreams) + "]");
  }
  const auto& arch = model.arch();
  const int cy = arch.latent_channels;
  const int h = y_hat.height;
  const int w = y_hat.width;
  const std::size_t hw = y_hat.plane_size();
  ThreadPool* pool = options.pool;
  LatentEncoding out;
  Container& c = out.container;
  c.cfg = static_cast<std::uint8_t>(arch.cfg);
  c.streams = static_cast<std::uint8_t>(options.streams);
  c.width_n = static_cast<std::uint16_t>(arch.width);
  c.latent_channels = static_cast<std::uint16_t>(cy);
  c.hyper_channels = static_cast<std::uint16_t>(arch.hyper_channels);
  c.true_width = true_width;
  c.true_height = true_height;
  c.padded_width = static_cast<std::uint32_t>(w) * 16;
  c.padded_height = static_cast<std::uint32_t>(h) * 16;

  c.present.assign(cy, false);
  for (int ch = 0; ch < cy; ++ch) {
    const auto* p = y_hat.data.data() + ch * hw;
    const auto [mn, mx] = std::minmax_element(p, p + hw);
    const bool nonzero = *mn != 0 || *mx != 0;
    c.present[ch] = nonzero || !options.skip_zero_channels;
    if (!c.present[ch]) continue;
    if (static_cast<std::int64_t>(*mx) - *mn >= (1 << kPrecision)) {
      throw Error(ErrorCode::kUnsupported,
                  "latent channel " + std::to_string(ch) + " spans more than 2^16 symbols");
    }
    c.bounds.push_back({*mn, *mx});
  }

  // z segment under the static prior.
  auto t0 = Clock::now();
  const auto& prior = model.prior();
  {
    rc::RangeEncoder enc;
    double bits = 0;
    const std::size_t zhw = z_hat.plane_size();
    for (int ch = 0; ch < z_hat.channels; ++ch) {
      const auto& cdf = prior.channels[ch];
      for (std::size_t p = 0; p < zhw; ++p) {
        const std::int32_t s = z_hat.data[ch * zhw + p];
        if (!cdf.contains(s)) {
          throw Error(ErrorCode::kInvalidArgument,
                      "hyper latent symbol " + std::to_string(s) +
                          " outside prior support of channel " + std::to_string(ch));
        }
        enc.encode(cdf, s);
        bits += prob::quantized_bits(cdf, s);
      }
    }
    c.segments.push_back(enc.finish());
    out.estimated_bits.push_back(bits);
  }
  out.timings.z_coding = seconds_since(t0);

  t0 = Clock::now();
  const Tensor t1 = hyper_synthesis(model, z_hat, pool);
  out.timings.hyper_synthesis = seconds_since(t0);
  t0 = Clock::now();
  const Tensor theta1 = compute_theta1(model, t1, pool);
  out.timings.theta1 = seconds_since(t0);
  t0 = Clock::now();
  const CheckerboardMask mask = make_masks(h, w);
  const Tensor y1 = nn::dequantize(split(y_hat, mask).first);
  const Tensor t3 = masked_context_conv(model, y1, pool);
  const Tensor theta2 = compute_theta2(model, t1, t3, pool);
  out.timings.theta2 = seconds_since(t0);

  const auto blocks = bitstream::stream_channels(c.present, options.streams);
  const auto rank = channel_ranks(c.present);
  const int S = options.streams;
  for (int pass = 0; pass < 2; ++pass) {
    t0 = Clock::now();
    const bool anchors = pass == 0;
    const Tensor& theta = anchors ? theta1 : theta2;
    const auto positions = parity_positions(h, w, anchors);
    std::vector<std::vector<std::uint8_t>> segs(S);
    std::vector<double> bits(S, 0.0);
    run_tasks(pool, S, 0, [&](std::size_t s) {
      rc::RangeEncoder enc;
      SymbolTable table;
      for (int ch : blocks[s]) {
        const SymbolBounds& b = c.bounds[rank[ch]];
        const std::int32_t* plane = y_hat.data.data() + ch * hw;
        for (std::size_t k = 0; k < positions.size(); ++k) {
          table.build(mixture_at(theta.data() + k, theta.plane_size(), cy, ch, anchors), b);
          const std::size_t i = static_cast<std::size_t>(plane[positions[k]] - b.lo);
          enc.encode(table.cum[i], table.cum[i + 1], kPrecision);
          bits[s] += table.bits(i);
        }
      }
      segs[s] = enc.finish();
    });
    for (int s = 0; s < S; ++s) {
      c.segments.push_back(std::move(segs[s]));
      out.estimated_bits.push_back(bits[s]);
    }
    (anchors ? out.timings.anchor_coding : out.timings.nonanchor_coding) =
        seconds_since(t0);
  }
  c.validate();
  return out;
}

namespace {

// Decodes the z segment.
LatentTensor decode_z(const Container& c, const nn::Model& model) {
  LatentTensor z(c.hyper_channels, c.hyper_height(), c.hyper_width());
  rc::RangeDecoder dec(c.z_segment());
  const std::size_t zhw = z.plane_size();
  for (int ch = 0; ch < z.channels; ++ch) {
    const auto& cdf = model.prior().channels[ch];
    for (std::size_t p = 0; p < zhw; ++p) z.data[ch * zhw + p] = dec.decode(cdf);
  }
  dec.finish();
  return z;
}

// Runs one pass over all streams. `mixture(ch, k, position)` supplies the
// parameters of symbol k of channel ch.
template <typename MixtureFn>
void decode_pass(const Container& c, const std::vector<std::vector<int>>& blocks,
                 const std::vector<int>& rank,
                 const std::vector<std::uint32_t>& positions, bool anchors,
                 LatentTensor& y, ThreadPool* pool, int cap, MixtureFn&& mixture) {
  const std::size_t hw = y.plane_size();
  run_tasks(pool, blocks.size(), cap, [&](std::size_t s) {
    rc::RangeDecoder dec(anchors ? c.anchor_segment(static_cast<int>(s))
                                 : c.nonanchor_segment(static_cast<int>(s)));
    SymbolTable table;
    for (int ch : blocks[s]) {
      const SymbolBounds& b = c.bounds[rank[ch]];
      std::int32_t* plane = y.data.data() + ch * hw;
      for (std::size_t k = 0; k < positions.size(); ++k) {
        table.build(mixture(ch, k, positions[k]), b);
        plane[positions[k]] =
            b.lo + static_cast<std::int32_t>(dec.decode_index(table.cum, kPrecision));
      }
    }
    dec.finish();
  });
}

}  // namespace

LatentDecoding decode_latents(const Container& c, const nn::Model& model,
                              const DecodeOptions& options) {
  c.validate();
  check_model_matches(c, model);
  ThreadPool* pool = options.pool;
  const int cy = c.latent_channels;
  const int h = c.latent_height();
  const int w = c.latent_width();
  LatentDecoding out;
  auto t_start = Clock::now();

  auto t0 = Clock::now();
  out.z_hat = decode_z(c, model);
  out.timings.z_coding = seconds_since(t0);
  t0 = Clock::now();
  const Tensor t1 = hyper_synthesis(model, out.z_hat, pool);
  out.timings.hyper_synthesis = seconds_since(t0);

  out.y_hat = LatentTensor(cy, h, w);
  LatentTensor& y = out.y_hat;
  const auto blocks = bitstream::stream_channels(c.present, c.streams);
  const auto rank = channel_ranks(c.present);
  const auto anchor_pos = parity_positions(h, w, true);
  const auto nonanchor_pos = parity_positions(h, w, false);
  const int cap = options.max_parallel_segments;
  const std::size_t hw = static_cast<std::size_t>(h) * w;

  if (options.mode == DecodeMode::kTwoPass) {
    t0 = Clock::now();
    const Tensor theta1 = compute_theta1(model, t1, pool);
    out.timings.theta1 = seconds_since(t0);
    t0 = Clock::now();
    decode_pass(c, blocks, rank, anchor_pos, true, y, pool, cap,
                [&](int ch, std::size_t k, std::uint32_t) {
                  return anchor_mixture(theta1, cy, ch, k);
                });
    out.timings.anchor_coding = seconds_since(t0);
    t0 = Clock::now();
    // y holds anchors only at this point.
    const Tensor t3 = masked_context_conv(model, nn::dequantize(y), pool);
    const Tensor theta2 = compute_theta2(model, t1, t3, pool);
    out.timings.theta2 = seconds_since(t0);
    t0 = Clock::now();
    decode_pass(c, blocks, rank, nonanchor_pos, false, y, pool, cap,
                [&](int ch, std::size_t k, std::uint32_t) {
                  return nonanchor_mixture(theta2, cy, ch, k);
                });
    out.timings.nonanchor_coding = seconds_since(t0);
  } else {
    // Reference decoder: one symbol at a time, parameters computed on demand
    // from the current decoded state.
    const float slope = model.leaky_slope();
    const auto& weights = model.weights();
    const int cc = model.arch().context_channels();
    const Tensor& ctx_w = model.masked_context_weight();
    const auto ctx_b = model.tensor("context.bias").values();
    std::vector<std::optional<std::vector<float>>> cache(hw);
    Tensor y1(cy, h, w);
    auto column = [&](std::uint32_t p) {
      std::vector<float> col(static_cast<std::size_t>(4) * cy, 0.0f);
      for (int i = 0; i < 2 * cy; ++i) col[i] = t1.plane(i)[p];
      return col;
    };
    t0 = Clock::now();
    decode_pass(c, blocks, rank, anchor_pos, true, y, nullptr, 0,
                [&](int ch, std::size_t, std::uint32_t p) {
                  if (!cache[p]) {
                    cache[p] = pen_column(model.graphs().pen1, weights, column(p), slope);
                  }
                  return mixture_at(cache[p]->data(), 1, cy, ch, true);
                });
    out.timings.anchor_coding = seconds_since(t0);
    t0 = Clock::now();
    for (std::size_t i = 0; i < y.data.size(); ++i) {
      y1.data()[i] = static_cast<float>(y.data[i]);
    }
    for (auto& e : cache) e.reset();
    decode_pass(c, blocks, rank, nonanchor_pos, false, y, nullptr, 0,
                [&](int ch, std::size_t, std::uint32_t p) {
                  if (!cache[p]) {
                    auto col = column(p);
                    const int r = static_cast<int>(p) / w;
                    const int q = static_cast<int>(p) % w;
                    for (int i = 0; i < cc; ++i) {
                      col[2 * cy + i] = nn::conv2d_at(y1, ctx_w, ctx_b, 1, 2, i, r, q);
                    }
                    cache[p] = pen_column(model.graphs().pen2, weights, std::move(col), slope);
                  }
                  return mixture_at(cache[p]->data(), 1, cy, ch, false);
                });
    out.timings.nonanchor_coding = seconds_since(t0);
  }
  std::size_t symbols = 0;
  for (const auto& b : blocks) symbols += b.size() * hw;
  out.decoded_symbols = symbols;
  out.timings.total = seconds_since(t_start);
  return out;
}

Tensor pad_to_alignment(const Tensor& image) {
  const int h = image.height();
  const int w = image.width();
  const int a = nn::kInputAlignment;
  const int hp = (h + a - 1) / a * a;
  const int wp = (w + a - 1) / a * a;
  if (hp == h && wp == w) return image;
  auto reflect = [](int i, int n) {
    if (n == 1) return 0;
    const int period = 2 * (n - 1);
    i %= period;
    return i < n ? i : period - i;
  };
  Tensor out(image.channels(), hp, wp);
  for (int c = 0; c < image.channels(); ++c) {
    for (int y = 0; y < hp; ++y) {
      const int sy = reflect(y, h);
      for (int x = 0; x < wp; ++x) out.at(c, y, x) = image.at(c, sy, reflect(x, w));
    }
  }
  return out;
}

EncodeResult encode_image(const Tensor& x, const nn::Model& model,
                          const EncodeOptions& options) {
  if (x.rank() != 3 || x.channels() != 3 || x.height() < 1 || x.width() < 1) {
    throw Error(ErrorCode::kShape, "encoder input must be 3 x H x W, got " + x.shape_string());
  }
  const auto t_start = Clock::now();
  auto t0 = Clock::now();
  const Tensor xp = pad_to_alignment(x);
  const auto run = model.run_options(options.pool);
  const Tensor y = nn::run_graph(model.graphs().analysis, model.weights(), xp, run);
  const Tensor z = nn::run_graph(model.graphs().hyper_analysis, model.weights(), y, run);
  EncodeResult r;
  r.y_hat = nn::quantize(y);
  r.z_hat = nn::quantize(z);
  const std::size_t zhw = r.z_hat.plane_size();
  for (int c = 0; c < r.z_hat.channels; ++c) {
    const auto& cdf = model.prior().channels[c];
    for (std::size_t p = 0; p < zhw; ++p) {
      auto& v = r.z_hat.data[c * zhw + p];
      v = std::clamp(v, cdf.lo, cdf.hi);
    }
  }
  const double analysis = seconds_since(t0);
  LatentEncoding lat =
      encode_latents(model, r.y_hat, r.z_hat, static_cast<std::uint32_t>(x.width()),
                     static_cast<std::uint32_t>(x.height()), options);
  r.container = std::move(lat.container);
  r.estimated_bits = std::move(lat.estimated_bits);
  r.timings = lat.timings;
  r.timings.analysis = analysis;
  r.bytes = bitstream::write_container(r.container);
  r.timings.total = seconds_since(t_start);
  return r;
}

Tensor synthesize(const nn::Model& model, const LatentTensor& y_hat,
                  std::uint32_t true_width, std::uint32_t true_height,
                  ThreadPool* pool) {
  Tensor full = nn::run_graph(model.graphs().synthesis, model.weights(),
                              nn::dequantize(y_hat), model.run_options(pool));
  nn::clamp_inplace(full, 0.0f, 1.0f);
  const int h = static_cast<int>(true_height);
  const int w = static_cast<int>(true_width);
  if (h > full.height() || w > full.width()) {
    throw Error(ErrorCode::kShape, "true size exceeds synthesized size");
  }
  Tensor out(full.channels(), h, w);
  for (int c = 0; c < full.channels(); ++c) {
    for (int y = 0; y < h; ++y) {
      std::copy_n(&full.at(c, y, 0), w, &out.at(c, y, 0));
    }
  }
  return out;
}

DecodeResult decode_image(const Container& container, const nn::Model& model,
                          const DecodeOptions& options) {
  const auto t_start = Clock::now();
  LatentDecoding lat = decode_latents(container, model, options);
  DecodeResult r;
  r.timings = lat.timings;
  auto t0 = Clock::now();
  r.image = synthesize(model, lat.y_hat, container.true_width,
                       container.true_height, options.pool);
  r.timings.synthesis = seconds_since(t0);
  r.y_hat = std::move(lat.y_hat);
  r.z_hat = std::move(lat.z_hat);
  r.decoded_symbols = lat.decoded_symbols;
  r.timings.total = seconds_since(t_start);
  return r;
}

DecodeResult decode_image(std::span<const std::uint8_t> bytes,
                          const nn::Model& model, const DecodeOptions& options) {
  return decode_image(bitstream::parse_container(bytes), model, options);
}

StageTimings median_timings(const std::vector<StageTimings>& runs) {
  StageTimings m;
  if (runs.empty()) return m;
  auto med = [&](double StageTimings::*field) {
    std::vector<double> v;
    for (const auto& r : runs) v.push_back(r.*field);
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  };
  for (auto f : {&StageTimings::analysis, &StageTimings::hyper_synthesis,
                 &StageTimings::z_coding, &StageTimings::theta1,
                 &StageTimings::anchor_coding, &StageTimings::theta2,
                 &StageTimings::nonanchor_coding, &StageTimings::synthesis,
                 &StageTimings::total}) {
    m.*f = med(f);
  }
  return m;
}

BenchReport decode_bench(const Container& container, const nn::Model& model,
                         DecodeMode mode, ThreadPool* pool, int repeat) {
  if (repeat < 1) throw Error(ErrorCode::kInvalidArgument, "repeat must be >= 1");
  DecodeOptions other;
  other.pool = pool;
  other.mode = mode == DecodeMode::kSerial ? DecodeMode::kTwoPass : DecodeMode::kSerial;
  const LatentTensor reference = decode_latents(container, model, other).y_hat;
  DecodeOptions opt;
  opt.pool = pool;
  opt.mode = mode;
  std::vector<StageTimings> runs;
  BenchReport report;
  report.mode = mode;
  report.repeat = repeat;
  for (int i = 0; i < repeat; ++i) {
    DecodeResult r = decode_image(container, model, opt);
    if (!(r.y_hat == reference)) {
      throw Error(ErrorCode::kAssertion,
                  "decode_bench: serial and two-pass decoders disagree on y_hat");
    }
    runs.push_back(r.timings);
  }
  report.modes_agree = true;
  report.median = median_timings(runs);
  return report;
}

}  // namespace lic::codec
