// Copyright (C) 2026 The LIC Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lic/bytes.hpp"
#include "lic/prob/distributions.hpp"

namespace lic::prob {

inline constexpr int kDefaultPrecision = 16;
inline constexpr int kMinPrecision = 8;
inline constexpr int kMaxPrecision = 16;

/// Integer CDF over the symbol support [lo, hi]: cum[0] = 0, strictly
/// increasing, cum[hi - lo + 1] = 2^precision.
struct QuantizedCdf {
  std::int32_t lo = 0;
  std::int32_t hi = 0;
  int precision = kDefaultPrecision;
  std::vector<std::uint32_t> cum;

  int symbols() const { return hi - lo + 1; }
  std::uint32_t mass(std::int32_t symbol) const {
    return cum[symbol - lo + 1] - cum[symbol - lo];
  }
  bool contains(std::int32_t symbol) const {
    return symbol >= lo && symbol <= hi;
  }
  /// Checks every table invariant.
  bool valid() const;
  bool operator==(const QuantizedCdf&) const = default;
};

/// Probabilities over [lo, hi] with the mass below lo folded into lo and the
/// mass above hi folded into hi. out.size() must be hi - lo + 1.
void support_pmf(const Mixture& m, std::int32_t lo, std::int32_t hi,
                 std::span<double> out);

/// Floor-then-redistribute quantization of a PMF to integer masses summing
/// to 2^precision, each >= 1. Any shortfall goes to the most probable
/// symbol; any excess is taken one unit at a time from the largest mass
/// (ties: lower probability first, then lower index). Writes
/// pmf.size() + 1 cumulative values into cum. Accepts precision 1..16;
/// tables for the coder are built with build_quantized_cdf, which needs 8..16.
void quantize_pmf(std::span<const double> pmf, int precision,
                  std::span<std::uint32_t> cum);

QuantizedCdf build_quantized_cdf(std::span<const double> pmf, std::int32_t lo,
                                 int precision = kDefaultPrecision);
QuantizedCdf build_quantized_cdf(const Mixture& m, std::int32_t lo,
                                 std::int32_t hi,
                                 int precision = kDefaultPrecision);

/// -log2 of the folded model probability of symbol k on [lo, hi].
double support_bits(const Mixture& m, std::int32_t k, std::int32_t lo,
                    std::int32_t hi);

/// Sum of -log2 P(symbol) under unfolded per-element mixtures.
double pmf_bits(std::span<const Mixture> params,
                std::span<const std::int32_t> symbols);

/// Sum of -log2(mass / 2^P) under quantized tables. Since every mass is at
/// least 1, each term is floored at probability 2^-P.
double pmf_bits(std::span<const QuantizedCdf> cdfs,
                std::span<const std::int32_t> symbols);
double quantized_bits(const QuantizedCdf& cdf, std::int32_t symbol);

/// Static per-channel tables for the hyper latent.
struct FactorizedPrior {
  std::vector<QuantizedCdf> channels;

  bool operator==(const FactorizedPrior&) const = default;
};

/// Block layout: u16 channel count, then per channel i32 lo, i32 hi,
/// u8 precision, (hi - lo + 2) u32 cumulative values. Little-endian.
void write_prior(ByteWriter& out, const FactorizedPrior& prior);
FactorizedPrior read_prior(ByteReader& in);

}  // namespace lic::prob
