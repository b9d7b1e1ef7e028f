// Copyright (C) 2026 The LIC Authors
// SPDX-License-Identifier: Apache-2.0

#include "lic/prob/quantized_cdf.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>

namespace lic::prob {

namespace {

struct Boundary {
  double cdf;
  double sf;
};

Boundary boundary_tails(const Component& c, double x) {
  const double s = std::max(c.scale, kScaleMin);
  return {family_cdf(c.family, x, c.mean, s), family_sf(c.family, x, c.mean, s)};
}

void check_precision(int precision) {
  if (precision < kMinPrecision || precision > kMaxPrecision) {
    throw Error(ErrorCode::kInvalidArgument,
                "CDF precision " + std::to_string(precision) +
                    " outside [8, 16]");
  }
}

}  // namespace

bool QuantizedCdf::valid() const {
  if (hi < lo || precision < kMinPrecision || precision > kMaxPrecision) {
    return false;
  }
  if (cum.size() != static_cast<std::size_t>(symbols()) + 1) return false;
  if (cum.front() != 0 || cum.back() != (1u << precision)) return false;
  for (std::size_t i = 1; i < cum.size(); ++i) {
    if (cum[i] <= cum[i - 1]) return false;
  }
  return true;
}

void support_pmf(const Mixture& m, std::int32_t lo, std::int32_t hi,
                 std::span<double> out) {
  const std::size_t n = static_cast<std::size_t>(hi - lo) + 1;
  if (hi < lo || out.size() != n) {
    throw Error(ErrorCode::kInvalidArgument, "support_pmf: bad support");
  }
  std::fill(out.begin(), out.end(), 0.0);
  if (n == 1) {
    out[0] = 1.0;
    return;
  }
  // Interior boundaries lo + 1/2, ..., hi - 1/2.
  thread_local std::vector<Boundary> bounds;
  bounds.resize(n - 1);
  for (const Component& c : m.view()) {
    for (std::size_t j = 0; j + 1 < n; ++j) {
      bounds[j] = boundary_tails(c, static_cast<double>(lo) + 0.5 +
                                        static_cast<double>(j));
    }
    double acc = bounds[0].cdf * c.weight;
    out[0] += acc;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double a = static_cast<double>(lo) + static_cast<double>(i) - 0.5;
      const double mass = a >= c.mean ? bounds[i - 1].sf - bounds[i].sf
                                      : bounds[i].cdf - bounds[i - 1].cdf;
      out[i] += c.weight * std::max(mass, 0.0);
    }
    out[n - 1] += c.weight * bounds[n - 2].sf;
  }
}

void quantize_pmf(std::span<const double> pmf, int precision,
                  std::span<std::uint32_t> cum) {
  if (precision < 1 || precision > kMaxPrecision) {
    throw Error(ErrorCode::kInvalidArgument,
                "quantize_pmf: precision " + std::to_string(precision) +
                    " outside [1, 16]");
  }
  const std::size_t n = pmf.size();
  const std::int64_t total = std::int64_t{1} << precision;
  if (n == 0 || static_cast<std::int64_t>(n) > total) {
    throw Error(ErrorCode::kInvalidArgument,
                "support of " + std::to_string(n) +
                    " symbols cannot be coded at precision " +
                    std::to_string(precision));
  }
  if (cum.size() != n + 1) {
    throw Error(ErrorCode::kInvalidArgument, "quantize_pmf: bad output size");
  }

  double sum = 0.0;
  for (double p : pmf) sum += std::max(p, 0.0);
  const double norm = sum > 0.0 ? static_cast<double>(total) / sum : 0.0;

  // Masses are staged in cum[1..n] and prefix-summed at the end.
  std::int64_t assigned = 0;
  std::size_t argmax = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double p = std::max(pmf[i], 0.0);
    if (p > pmf[argmax]) argmax = i;
    std::int64_t m = static_cast<std::int64_t>(std::floor(p * norm));
    m = std::clamp<std::int64_t>(m, 1, total);
    cum[i + 1] = static_cast<std::uint32_t>(m);
    assigned += m;
  }

  if (assigned < total) {
    cum[argmax + 1] += static_cast<std::uint32_t>(total - assigned);
  } else if (assigned > total) {
    auto before = [&](std::size_t a, std::size_t b) {
      // priority_queue pops the greatest; "greater" = larger mass, then
      // smaller probability, then smaller index.
      if (cum[a + 1] != cum[b + 1]) return cum[a + 1] < cum[b + 1];
      if (pmf[a] != pmf[b]) return pmf[a] > pmf[b];
      return a > b;
    };
    std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(before)>
        heap(before);
    for (std::size_t i = 0; i < n; ++i) {
      if (cum[i + 1] > 1) heap.push(i);
    }
    std::int64_t excess = assigned - total;
    while (excess > 0) {
      const std::size_t i = heap.top();
      heap.pop();
      --cum[i + 1];
      --excess;
      if (cum[i + 1] > 1) heap.push(i);
    }
  }

  cum[0] = 0;
  for (std::size_t i = 1; i <= n; ++i) cum[i] += cum[i - 1];
}

QuantizedCdf build_quantized_cdf(std::span<const double> pmf, std::int32_t lo,
                                 int precision) {
  check_precision(precision);
  QuantizedCdf cdf;
  cdf.lo = lo;
  cdf.hi = lo + static_cast<std::int32_t>(pmf.size()) - 1;
  cdf.precision = precision;
  cdf.cum.resize(pmf.size() + 1);
  quantize_pmf(pmf, precision, cdf.cum);
  return cdf;
}

QuantizedCdf build_quantized_cdf(const Mixture& m, std::int32_t lo,
                                 std::int32_t hi, int precision) {
  if (hi < lo) {
    throw Error(ErrorCode::kInvalidArgument, "build_quantized_cdf: lo > hi");
  }
  const std::int64_t n = static_cast<std::int64_t>(hi) - lo + 1;
  if (n > (std::int64_t{1} << kMaxPrecision)) {
    throw Error(ErrorCode::kInvalidArgument,
                "support of " + std::to_string(n) + " symbols is too wide");
  }
  std::vector<double> pmf(static_cast<std::size_t>(n));
  support_pmf(m, lo, hi, pmf);
  return build_quantized_cdf(pmf, lo, precision);
}

double support_bits(const Mixture& m, std::int32_t k, std::int32_t lo,
                    std::int32_t hi) {
  double p;
  if (lo == hi) {
    p = 1.0;
  } else if (k == lo) {
    p = mixture_cdf_upper(m, k);
  } else if (k == hi) {
    p = 0.0;
    for (const Component& c : m.view()) {
      p += c.weight * family_sf(c.family, static_cast<double>(k) - 0.5, c.mean,
                                std::max(c.scale, kScaleMin));
    }
  } else {
    p = mixture_pmf(m, k);
  }
  return -std::log2(std::max(p, 1e-300));
}

double pmf_bits(std::span<const Mixture> params,
                std::span<const std::int32_t> symbols) {
  if (params.size() != symbols.size()) {
    throw Error(ErrorCode::kShape, "pmf_bits: params/symbols length mismatch");
  }
  double bits = 0.0;
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    bits -= std::log2(std::max(mixture_pmf(params[i], symbols[i]), 1e-300));
  }
  return bits;
}

double quantized_bits(const QuantizedCdf& cdf, std::int32_t symbol) {
  return static_cast<double>(cdf.precision) -
         std::log2(static_cast<double>(cdf.mass(symbol)));
}

double pmf_bits(std::span<const QuantizedCdf> cdfs,
                std::span<const std::int32_t> symbols) {
  if (cdfs.size() != symbols.size()) {
    throw Error(ErrorCode::kShape, "pmf_bits: cdfs/symbols length mismatch");
  }
  double bits = 0.0;
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    bits += quantized_bits(cdfs[i], symbols[i]);
  }
  return bits;
}

void write_prior(ByteWriter& out, const FactorizedPrior& prior) {
  out.u16(static_cast<std::uint16_t>(prior.channels.size()));
  for (const QuantizedCdf& cdf : prior.channels) {
    out.i32(cdf.lo);
    out.i32(cdf.hi);
    out.u8(static_cast<std::uint8_t>(cdf.precision));
    for (std::uint32_t v : cdf.cum) out.u32(v);
  }
}

FactorizedPrior read_prior(ByteReader& in) {
  FactorizedPrior prior;
  const int count = in.u16();
  prior.channels.reserve(count);
  for (int c = 0; c < count; ++c) {
    QuantizedCdf cdf;
    cdf.lo = in.i32();
    cdf.hi = in.i32();
    cdf.precision = in.u8();
    if (cdf.hi < cdf.lo ||
        static_cast<std::int64_t>(cdf.hi) - cdf.lo + 1 > (1 << kMaxPrecision)) {
      throw Error(ErrorCode::kFormat,
                  "prior channel " + std::to_string(c) + ": bad support");
    }
    cdf.cum.resize(static_cast<std::size_t>(cdf.symbols()) + 1);
    for (auto& v : cdf.cum) v = in.u32();
    if (!cdf.valid()) {
      throw Error(ErrorCode::kFormat,
                  "prior channel " + std::to_string(c) + ": invalid CDF table");
    }
    prior.channels.push_back(std::move(cdf));
  }
  return prior;
}

}  // namespace lic::prob
