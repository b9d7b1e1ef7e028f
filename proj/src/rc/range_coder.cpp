// Copyright (C) 2026 The LIC Authors
// SPDX-License-Identifier: Apache-2.0

#include "lic/rc/range_coder.hpp"

#include <algorithm>
#include <string>

namespace lic::rc {

namespace {

constexpr std::uint32_t kTop = 1u << 24;
constexpr std::size_t kMaxPadding = 4;

}  // namespace

void RangeEncoder::encode(std::uint32_t cum_lo, std::uint32_t cum_hi,
                          int precision) {
  const std::uint32_t r = range_ >> precision;
  low_ += static_cast<std::uint64_t>(r) * cum_lo;
  if (cum_hi == (1u << precision)) {
    range_ -= r * cum_lo;
  } else {
    range_ = r * (cum_hi - cum_lo);
  }
  while (range_ < kTop) {
    range_ <<= 8;
    shift_low();
  }
  ++count_;
}

void RangeEncoder::encode(const prob::QuantizedCdf& cdf, std::int32_t symbol) {
  const std::size_t i = static_cast<std::size_t>(symbol - cdf.lo);
  encode(cdf.cum[i], cdf.cum[i + 1], cdf.precision);
}

void RangeEncoder::encode_bits(std::uint32_t value, int n) {
  encode(value, value + 1, n);
}

void RangeEncoder::shift_low() {
  if (static_cast<std::uint32_t>(low_) < 0xFF000000u || (low_ >> 32) != 0) {
    const auto carry = static_cast<std::uint8_t>(low_ >> 32);
    if (first_) {
      first_ = false;
    } else {
      out_.push_back(static_cast<std::uint8_t>(cache_ + carry));
    }
    for (; pending_ > 0; --pending_) {
      out_.push_back(static_cast<std::uint8_t>(0xFF + carry));
    }
    cache_ = static_cast<std::uint8_t>(low_ >> 24);
  } else {
    ++pending_;
  }
  low_ = (low_ & 0x00FFFFFFu) << 8;
}

std::vector<std::uint8_t> RangeEncoder::finish() {
  // Pick the point of [low, low + range) with the most trailing zero bytes.
  const std::uint64_t end = low_ + range_;
  for (int zeros = 4; zeros >= 0; --zeros) {
    const std::uint64_t mask =
        zeros == 0 ? 0 : (std::uint64_t{1} << (8 * zeros)) - 1;
    const std::uint64_t v = (low_ + mask) & ~mask;
    if (v < end) {
      low_ = v;
      break;
    }
  }
  for (int i = 0; i < 5; ++i) shift_low();
  for (std::size_t i = 0; i < kMaxPadding && !out_.empty() && out_.back() == 0;
       ++i) {
    out_.pop_back();
  }
  std::vector<std::uint8_t> result = std::move(out_);
  *this = RangeEncoder();
  return result;
}

RangeDecoder::RangeDecoder(std::span<const std::uint8_t> bytes)
    : bytes_(bytes) {
  for (int i = 0; i < 4; ++i) code_ = (code_ << 8) | next_byte();
}

std::uint8_t RangeDecoder::next_byte() {
  if (pos_ < bytes_.size()) return bytes_[pos_++];
  if (pos_ - bytes_.size() >= kMaxPadding) {
    throw Error(ErrorCode::kTruncated, "bitstream exhausted");
  }
  ++pos_;
  return 0;
}

void RangeDecoder::normalize() {
  while (range_ < kTop) {
    range_ <<= 8;
    code_ = (code_ << 8) | next_byte();
  }
}

std::uint32_t RangeDecoder::decode_index(std::span<const std::uint32_t> cum,
                                         int precision) {
  const std::uint32_t total = 1u << precision;
  const std::uint32_t r = range_ >> precision;
  const std::uint32_t v = std::min(code_ / r, total - 1);
  // cum[0] = 0 <= v, so the index is at least 0.
  const auto it = std::upper_bound(cum.begin(), cum.end(), v);
  std::size_t s = static_cast<std::size_t>(it - cum.begin()) - 1;
  s = std::min(s, cum.size() - 2);
  const std::uint32_t lo = cum[s];
  const std::uint32_t hi = cum[s + 1];
  code_ -= r * lo;
  if (hi == total) {
    range_ -= r * lo;
  } else {
    range_ = r * (hi - lo);
  }
  normalize();
  return static_cast<std::uint32_t>(s);
}

std::int32_t RangeDecoder::decode(const prob::QuantizedCdf& cdf) {
  return cdf.lo +
         static_cast<std::int32_t>(decode_index(cdf.cum, cdf.precision));
}

std::uint32_t RangeDecoder::decode_bits(int n) {
  const std::uint32_t total = 1u << n;
  const std::uint32_t r = range_ >> n;
  const std::uint32_t v = std::min(code_ / r, total - 1);
  code_ -= r * v;
  if (v + 1 == total) {
    range_ -= r * v;
  } else {
    range_ = r;
  }
  normalize();
  return v;
}

void RangeDecoder::finish() const {
  if (pos_ < bytes_.size()) {
    throw Error(ErrorCode::kFormat,
                "range decoder finished with " +
                    std::to_string(bytes_.size() - pos_) +
                    " unread bytes in segment");
  }
}

EncodedSegment rc_encode(std::span<const std::int32_t> symbols,
                         std::span<const prob::QuantizedCdf> cdfs) {
  if (symbols.size() != cdfs.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "rc_encode: symbol and CDF sequences differ in length");
  }
  RangeEncoder enc;
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    if (!cdfs[i].contains(symbols[i])) {
      throw Error(ErrorCode::kInvalidArgument,
                  "rc_encode: symbol " + std::to_string(symbols[i]) +
                      " at index " + std::to_string(i) +
                      " outside support [" + std::to_string(cdfs[i].lo) + ", " +
                      std::to_string(cdfs[i].hi) + "]");
    }
    enc.encode(cdfs[i], symbols[i]);
  }
  EncodedSegment seg;
  seg.symbol_count = symbols.size();
  seg.bytes = enc.finish();
  return seg;
}

std::vector<std::int32_t> rc_decode(const EncodedSegment& segment,
                                    std::span<const prob::QuantizedCdf> cdfs) {
  if (cdfs.size() != segment.symbol_count) {
    throw Error(ErrorCode::kInvalidArgument,
                "rc_decode: CDF count differs from segment symbol count");
  }
  RangeDecoder dec(segment.bytes);
  std::vector<std::int32_t> out(segment.symbol_count);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = dec.decode(cdfs[i]);
  dec.finish();
  return out;
}

}  // namespace lic::rc
