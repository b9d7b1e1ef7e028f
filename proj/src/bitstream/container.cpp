// Copyright (C) 2026 The LIC Authors
// SPDX-License-Identifier: Apache-2.0

#include "lic/bitstream/container.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "lic/bytes.hpp"
#include "lic/error.hpp"

namespace lic::bitstream {

namespace {

constexpr char kMagic[4] = {'L', 'I', 'C', '1'};

[[noreturn]] void fail(const std::string& msg) {
  throw Error(ErrorCode::kFormat, msg);
}

}  // namespace

int Container::present_count() const {
  return static_cast<int>(std::count(present.begin(), present.end(), true));
}

void Container::validate() const {
  if (version != kContainerVersion) {
    throw Error(ErrorCode::kUnsupported,
                "unsupported bitstream version " + std::to_string(version));
  }
  if (parity != kParityEvenAnchors) {
    throw Error(ErrorCode::kUnsupported,
                "unsupported anchor parity convention " + std::to_string(parity));
  }
  if (cfg < 1 || cfg > 4) fail("invalid decoder configuration " + std::to_string(cfg));
  if (streams < 1 || streams > kMaxStreams) {
    fail("invalid stream count " + std::to_string(streams));
  }
  if (width_n == 0 || latent_channels == 0 || hyper_channels == 0) {
    fail("zero channel count in header");
  }
  if (true_width == 0 || true_height == 0 || padded_width % 64 != 0 ||
      padded_height % 64 != 0 || padded_width < true_width ||
      padded_height < true_height || padded_width - true_width >= 64 ||
      padded_height - true_height >= 64) {
    fail("inconsistent image dimensions in header");
  }
  if (present.size() != latent_channels) {
    fail("channel bitmap has " + std::to_string(present.size()) +
         " entries, header declares " + std::to_string(latent_channels));
  }
  if (bounds.size() != static_cast<std::size_t>(present_count())) {
    fail("channel bitmap marks " + std::to_string(present_count()) +
         " channels present but " + std::to_string(bounds.size()) +
         " bound records follow");
  }
  for (const SymbolBounds& b : bounds) {
    if (b.lo > b.hi) fail("symbol bounds with lo > hi");
    if (static_cast<std::int64_t>(b.hi) - b.lo >= (1 << 16)) {
      fail("symbol bounds wider than 65536 symbols");
    }
  }
  if (segments.size() != 1 + 2 * static_cast<std::size_t>(streams)) {
    fail("expected " + std::to_string(1 + 2 * streams) + " segments, found " +
         std::to_string(segments.size()));
  }
}

std::size_t header_size(const Container& c) {
  return 4 + 4 + 6 + 16 + (c.latent_channels + 7) / 8 + 8 * c.bounds.size() +
         4 * c.segments.size();
}

std::vector<std::uint8_t> write_container(const Container& c) {
  c.validate();
  ByteWriter w;
  w.str(std::string_view(kMagic, 4));
  w.u8(c.version);
  w.u8(c.cfg);
  w.u8(c.parity);
  w.u8(c.streams);
  w.u16(c.width_n);
  w.u16(c.latent_channels);
  w.u16(c.hyper_channels);
  w.u32(c.true_width);
  w.u32(c.true_height);
  w.u32(c.padded_width);
  w.u32(c.padded_height);
  std::vector<std::uint8_t> bitmap((c.latent_channels + 7) / 8, 0);
  for (std::size_t i = 0; i < c.present.size(); ++i) {
    if (c.present[i]) bitmap[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
  }
  w.bytes(bitmap);
  for (const SymbolBounds& b : c.bounds) {
    w.i32(b.lo);
    w.i32(b.hi);
  }
  for (const auto& s : c.segments) w.u32(static_cast<std::uint32_t>(s.size()));
  for (const auto& s : c.segments) w.bytes(s);
  return w.take();
}

Container parse_container(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || !std::equal(kMagic, kMagic + 4, bytes.begin())) {
    fail("not a LIC bitstream");
  }
  ByteReader r(bytes.subspan(4));
  Container c;
  try {
    c.version = r.u8();
    if (c.version != kContainerVersion) {
      throw Error(ErrorCode::kUnsupported,
                  "unsupported bitstream version " + std::to_string(c.version));
    }
    c.cfg = r.u8();
    c.parity = r.u8();
    c.streams = r.u8();
    c.width_n = r.u16();
    c.latent_channels = r.u16();
    c.hyper_channels = r.u16();
    c.true_width = r.u32();
    c.true_height = r.u32();
    c.padded_width = r.u32();
    c.padded_height = r.u32();
    auto bitmap = r.bytes((c.latent_channels + 7) / 8);
    c.present.resize(c.latent_channels);
    for (std::size_t i = 0; i < bitmap.size() * 8; ++i) {
      const bool bit = (bitmap[i / 8] >> (i % 8)) & 1u;
      if (i < c.present.size()) {
        c.present[i] = bit;
      } else if (bit) {
        fail("channel bitmap has bits set beyond C_y");
      }
    }
    const int present = c.present_count();
    for (int i = 0; i < present; ++i) {
      SymbolBounds b;
      b.lo = r.i32();
      b.hi = r.i32();
      c.bounds.push_back(b);
    }
    if (c.streams < 1 || c.streams > kMaxStreams) {
      fail("invalid stream count " + std::to_string(c.streams));
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kTruncated) throw;
    throw Error(ErrorCode::kTruncated, "container truncated in header");
  }
  const std::size_t count = 1 + 2 * static_cast<std::size_t>(c.streams);
  std::vector<std::uint32_t> lengths(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (r.remaining() < 4) {
      throw Error(ErrorCode::kTruncated, "container truncated in segment table");
    }
    lengths[i] = r.u32();
  }
  for (std::size_t i = 0; i < count; ++i) {
    if (r.remaining() < lengths[i]) {
      throw Error(ErrorCode::kTruncated,
                  "container truncated at segment " + std::to_string(i));
    }
    auto s = r.bytes(lengths[i]);
    c.segments.emplace_back(s.begin(), s.end());
  }
  if (r.remaining() != 0) {
    fail(std::to_string(r.remaining()) + " trailing bytes after last segment");
  }
  c.validate();
  return c;
}

std::vector<std::vector<int>> stream_channels(const std::vector<bool>& present,
                                              int streams) {
  std::vector<int> channels;
  for (std::size_t i = 0; i < present.size(); ++i) {
    if (present[i]) channels.push_back(static_cast<int>(i));
  }
  const std::size_t p = channels.size();
  std::vector<std::vector<int>> blocks(streams);
  for (int s = 0; s < streams; ++s) {
    const std::size_t b = p * s / streams;
    const std::size_t e = p * (s + 1) / streams;
    blocks[s].assign(channels.begin() + b, channels.begin() + e);
  }
  return blocks;
}

std::size_t anchor_count(int height, int width) {
  const std::size_t n = static_cast<std::size_t>(height) * width;
  return (n + 1) / 2;
}

std::size_t nonanchor_count(int height, int width) {
  return static_cast<std::size_t>(height) * width - anchor_count(height, width);
}

ContainerSummary summarize(const Container& c, std::size_t total_bytes) {
  ContainerSummary s;
  s.cfg = c.cfg;
  s.width_n = c.width_n;
  s.latent_channels = c.latent_channels;
  s.hyper_channels = c.hyper_channels;
  s.streams = c.streams;
  s.true_width = c.true_width;
  s.true_height = c.true_height;
  s.padded_width = c.padded_width;
  s.padded_height = c.padded_height;
  s.present_channels = c.present_count();
  s.skipped_channels = c.latent_channels - s.present_channels;
  s.header_bytes = header_size(c);
  s.total_bytes = total_bytes;
  s.bpp = 8.0 * static_cast<double>(total_bytes) /
          (static_cast<double>(c.true_width) * c.true_height);
  const int hy = c.latent_height();
  const int wy = c.latent_width();
  s.segments.push_back({"z", c.segments[0].size(),
                        static_cast<std::size_t>(c.hyper_channels) *
                            c.hyper_height() * c.hyper_width()});
  const auto blocks = stream_channels(c.present, c.streams);
  for (int i = 0; i < c.streams; ++i) {
    s.segments.push_back({"anchor." + std::to_string(i),
                          c.anchor_segment(i).size(),
                          blocks[i].size() * anchor_count(hy, wy)});
  }
  for (int i = 0; i < c.streams; ++i) {
    s.segments.push_back({"nonanchor." + std::to_string(i),
                          c.nonanchor_segment(i).size(),
                          blocks[i].size() * nonanchor_count(hy, wy)});
  }
  return s;
}

ContainerSummary inspect(std::span<const std::uint8_t> bytes) {
  return summarize(parse_container(bytes), bytes.size());
}

std::string format_summary(const ContainerSummary& s) {
  std::ostringstream o;
  char bpp[32];
  std::snprintf(bpp, sizeof bpp, "%.4f", s.bpp);
  o << "image: " << s.true_width << "x" << s.true_height << " (padded "
    << s.padded_width << "x" << s.padded_height << ")\n"
    << "cfg: " << s.cfg << "  N: " << s.width_n << "  C_y: " << s.latent_channels
    << "  C_z: " << s.hyper_channels << "  streams: " << s.streams << "\n"
    << "present channels: " << s.present_channels << "/" << s.latent_channels
    << "\n"
    << "skipped channels: " << s.skipped_channels << "/" << s.latent_channels
    << "\n"
    << "header bytes: " << s.header_bytes << "\n";
  for (const SegmentSummary& seg : s.segments) {
    o << "segment " << seg.name << ": " << seg.bytes << " bytes, "
      << seg.symbols << " symbols\n";
  }
  o << "total bytes: " << s.total_bytes << "\n"
    << "bpp: " << bpp << "\n";
  return o.str();
}

}  // namespace lic::bitstream
