// Copyright (C) 2026 The LIC Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lic/prob/quantized_cdf.hpp"

namespace lic::rc {

/// Bytes of one independently decodable range-coded segment.
struct EncodedSegment {
  std::vector<std::uint8_t> bytes;
  std::size_t symbol_count = 0;
};

/// Byte-oriented range encoder with a 64-bit low / 32-bit range state and
/// carry propagation through a cached byte plus a run of pending 0xFF bytes.
/// Symbols are coded as [cum_lo, cum_hi) intervals out of 2^precision; the
/// top symbol of a table absorbs the rounding remainder of the range.
/// The flush writes the value in [low, low + range) with the most trailing
/// zero bytes and drops those zeros (at most 4); the decoder reads them back
/// as implicit padding.
class RangeEncoder {
 public:
  void encode(std::uint32_t cum_lo, std::uint32_t cum_hi, int precision);
  void encode(const prob::QuantizedCdf& cdf, std::int32_t symbol);
  /// Raw uniform bits (n <= 16).
  void encode_bits(std::uint32_t value, int n);

  std::vector<std::uint8_t> finish();
  std::size_t symbol_count() const { return count_; }

 private:
  void shift_low();

  std::uint64_t low_ = 0;
  std::uint32_t range_ = 0xFFFFFFFFu;
  std::uint8_t cache_ = 0;
  std::uint64_t pending_ = 0;  // 0xFF bytes waiting behind cache_
  bool first_ = true;          // the leading cache byte is always 0; not emitted
  std::size_t count_ = 0;
  std::vector<std::uint8_t> out_;
};

class RangeDecoder {
 public:
  explicit RangeDecoder(std::span<const std::uint8_t> bytes);

  /// Decodes one symbol against cum (size symbols + 1, cum.back() =
  /// 2^precision) and returns its index in [0, symbols).
  std::uint32_t decode_index(std::span<const std::uint32_t> cum, int precision);
  std::int32_t decode(const prob::QuantizedCdf& cdf);
  std::uint32_t decode_bits(int n);

  /// Verifies the segment was consumed exactly: every byte read and no more
  /// than the implicit flush padding beyond the end. Throws on violation.
  void finish() const;

 private:
  std::uint8_t next_byte();
  void normalize();

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
  std::uint32_t code_ = 0;
  std::uint32_t range_ = 0xFFFFFFFFu;
};

/// Encodes symbols[i] under cdfs[i]. Throws kInvalidArgument naming the
/// index when a symbol lies outside its table's support.
EncodedSegment rc_encode(std::span<const std::int32_t> symbols,
                         std::span<const prob::QuantizedCdf> cdfs);

/// Decoding with a different CDF sequence than the encoder used yields
/// unspecified symbols (never out-of-bounds accesses). Truncated input
/// raises kTruncated ("bitstream exhausted").
std::vector<std::int32_t> rc_decode(const EncodedSegment& segment,
                                    std::span<const prob::QuantizedCdf> cdfs);

}  // namespace lic::rc
