// Copyright (C) 2026 The LIC Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace lic::bitstream {

inline constexpr std::uint8_t kContainerVersion = 1;
/// Anchors sit where (row + col) is even.
inline constexpr std::uint8_t kParityEvenAnchors = 0;
inline constexpr int kMaxStreams = 64;

struct SymbolBounds {
  std::int32_t lo = 0;
  std::int32_t hi = 0;
  bool operator==(const SymbolBounds&) const = default;
};

/// ".lic" file (little-endian):
///   "LIC1", u8 version, u8 cfg, u8 parity, u8 streams S,
///   u16 N, u16 C_y, u16 C_z,
///   u32 true width, u32 true height, u32 padded width, u32 padded height,
///   channel bitmap, ceil(C_y / 8) bytes, bit c at byte c / 8, bit c % 8,
///   per present channel i32 lo, i32 hi,
///   (1 + 2 S) x u32 segment lengths: z, S anchor, S non-anchor,
///   segment bytes in the same order.
struct Container {
  std::uint8_t version = kContainerVersion;
  std::uint8_t cfg = 1;
  std::uint8_t parity = kParityEvenAnchors;
  std::uint8_t streams = 1;
  std::uint16_t width_n = 0;
  std::uint16_t latent_channels = 0;
  std::uint16_t hyper_channels = 0;
  std::uint32_t true_width = 0;
  std::uint32_t true_height = 0;
  std::uint32_t padded_width = 0;
  std::uint32_t padded_height = 0;
  std::vector<bool> present;          // C_y entries
  std::vector<SymbolBounds> bounds;   // one per present channel, ascending
  std::vector<std::vector<std::uint8_t>> segments;  // 1 + 2 S

  int present_count() const;
  int latent_height() const { return static_cast<int>(padded_height / 16); }
  int latent_width() const { return static_cast<int>(padded_width / 16); }
  int hyper_height() const { return static_cast<int>(padded_height / 64); }
  int hyper_width() const { return static_cast<int>(padded_width / 64); }

  const std::vector<std::uint8_t>& z_segment() const { return segments[0]; }
  const std::vector<std::uint8_t>& anchor_segment(int s) const {
    return segments[1 + s];
  }
  const std::vector<std::uint8_t>& nonanchor_segment(int s) const {
    return segments[1 + streams + s];
  }

  /// Throws Error(kFormat) describing the first violated invariant.
  void validate() const;
  bool operator==(const Container&) const = default;
};

std::vector<std::uint8_t> write_container(const Container& c);
Container parse_container(std::span<const std::uint8_t> bytes);

/// Header size in bytes (everything before the first segment byte).
std::size_t header_size(const Container& c);

/// Present channels split into `streams` contiguous blocks; block s holds
/// present-channel ranks [s * p / S, (s + 1) * p / S).
std::vector<std::vector<int>> stream_channels(const std::vector<bool>& present,
                                              int streams);

/// Number of positions with (row + col) even / odd on an H x W grid.
std::size_t anchor_count(int height, int width);
std::size_t nonanchor_count(int height, int width);

struct SegmentSummary {
  std::string name;
  std::size_t bytes = 0;
  std::size_t symbols = 0;
};

struct ContainerSummary {
  int cfg = 0;
  int width_n = 0;
  int latent_channels = 0;
  int hyper_channels = 0;
  int streams = 0;
  std::uint32_t true_width = 0;
  std::uint32_t true_height = 0;
  std::uint32_t padded_width = 0;
  std::uint32_t padded_height = 0;
  int present_channels = 0;
  int skipped_channels = 0;
  std::size_t header_bytes = 0;
  std::size_t total_bytes = 0;
  double bpp = 0.0;
  std::vector<SegmentSummary> segments;
};

ContainerSummary summarize(const Container& c, std::size_t total_bytes);
ContainerSummary inspect(std::span<const std::uint8_t> bytes);
/// Multi-line human-readable report.
std::string format_summary(const ContainerSummary& s);

}  // namespace lic::bitstream
