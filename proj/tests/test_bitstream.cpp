// Copyright (C) 2026 The LIC Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "lic/bitstream/container.hpp"
#include "lic/error.hpp"
#include "oracles/oracles.hpp"

using namespace lic;
using namespace lic::bitstream;

namespace {

Container random_container(std::mt19937_64& rng) {
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  Container c;
  c.cfg = static_cast<std::uint8_t>(pick(1, 4));
  c.streams = static_cast<std::uint8_t>(pick(1, 8));
  c.width_n = static_cast<std::uint16_t>(pick(8, 400));
  c.latent_channels = static_cast<std::uint16_t>(pick(1, 40));
  c.hyper_channels = static_cast<std::uint16_t>(pick(1, 300));
  c.true_width = static_cast<std::uint32_t>(pick(1, 2000));
  c.true_height = static_cast<std::uint32_t>(pick(1, 2000));
  c.padded_width = (c.true_width + 63) / 64 * 64;
  c.padded_height = (c.true_height + 63) / 64 * 64;
  const int density = pick(0, 4);
  for (int i = 0; i < c.latent_channels; ++i) {
    c.present.push_back(pick(0, 3) < density);
    if (c.present.back()) {
      const int lo = pick(-5000, 50);
      c.bounds.push_back({lo, lo + pick(0, 1000)});
    }
  }
  for (int s = 0; s < 1 + 2 * c.streams; ++s) {
    std::vector<std::uint8_t> seg(pick(0, 300));
    for (auto& b : seg) b = static_cast<std::uint8_t>(rng());
    c.segments.push_back(std::move(seg));
  }
  return c;
}

Container small_container() {
  Container c;
  c.cfg = 2;
  c.streams = 1;
  c.width_n = 64;
  c.latent_channels = 10;
  c.hyper_channels = 8;
  c.true_width = 100;
  c.true_height = 70;
  c.padded_width = 128;
  c.padded_height = 128;
  c.present = std::vector<bool>(10, false);
  c.present[1] = c.present[4] = c.present[9] = true;
  c.bounds = {{-3, 2}, {0, 0}, {-1, 7}};
  c.segments = {{1, 2, 3}, {4, 5}, {6}};
  return c;
}

template <typename F>
void expect_error(F&& f, ErrorCode code, const std::string& text) {
  try {
    f();
    FAIL("expected an error containing '" << text << "'");
  } catch (const Error& e) {
    CHECK(e.code() == code);
    CHECK_MESSAGE(std::string(e.what()).find(text) != std::string::npos, std::string(e.what()));
  }
}

}  // namespace

TEST_CASE("fuzzed containers roundtrip and agree with the field-by-field reader") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 2000; ++trial) {
    const Container c = random_container(rng);
    const auto bytes = write_container(c);
    const Container back = parse_container(bytes);
    CHECK(back == c);
    CHECK(write_container(back) == bytes);

    const oracle::ParsedContainer o = oracle::parse_lic(bytes);
    CHECK(o.magic == "LIC1");
    CHECK(o.version == c.version);
    CHECK(o.cfg == c.cfg);
    CHECK(o.parity == c.parity);
    CHECK(o.streams == c.streams);
    CHECK(o.n == c.width_n);
    CHECK(o.cy == c.latent_channels);
    CHECK(o.cz == c.hyper_channels);
    CHECK(o.tw == c.true_width);
    CHECK(o.th == c.true_height);
    CHECK(o.pw == c.padded_width);
    CHECK(o.ph == c.padded_height);
    for (int i = 0; i < c.latent_channels; ++i) CHECK((o.present[i] != 0) == c.present[i]);
    REQUIRE(o.bounds.size() == c.bounds.size());
    for (std::size_t i = 0; i < c.bounds.size(); ++i) {
      CHECK(o.bounds[i].first == c.bounds[i].lo);
      CHECK(o.bounds[i].second == c.bounds[i].hi);
    }
    CHECK(o.segments == c.segments);
    std::size_t seg_total = 0;
    for (auto len : o.lengths) seg_total += len;
    CHECK(header_size(c) + seg_total == bytes.size());
  }
}

TEST_CASE("exact bytes of a small container") {
  const auto b = write_container(small_container());
  const std::vector<std::uint8_t> head = {
      'L', 'I', 'C', '1', 1, 2, 0, 1,      // magic, version, cfg, parity, S
      64, 0, 10, 0, 8, 0,                  // N, C_y, C_z
      100, 0, 0, 0, 70, 0, 0, 0,           // true size
      128, 0, 0, 0, 128, 0, 0, 0,          // padded size
      0x12, 0x02,                          // bits 1, 4, 9
      0xFD, 0xFF, 0xFF, 0xFF, 2, 0, 0, 0,  // [-3, 2]
      0, 0, 0, 0, 0, 0, 0, 0,              // [0, 0]
      0xFF, 0xFF, 0xFF, 0xFF, 7, 0, 0, 0,  // [-1, 7]
      3, 0, 0, 0, 2, 0, 0, 0, 1, 0, 0, 0,  // lengths
      1, 2, 3, 4, 5, 6};
  CHECK(b == head);
  CHECK(header_size(small_container()) == head.size() - 6);
}

TEST_CASE("parse errors") {
  const auto good = write_container(small_container());

  auto bad = good;
  bad[0] = bad[1] = bad[2] = bad[3] = 'X';
  expect_error([&] { parse_container(bad); }, ErrorCode::kFormat, "not a LIC bitstream");

  bad = good;
  bad[4] = 2;
  expect_error([&] { parse_container(bad); }, ErrorCode::kUnsupported, "version");

  // Three bitmap bits but two bound records: set one more bit and drop the
  // last record.
  Container three = small_container();
  three.bounds.pop_back();
  three.present[9] = false;
  auto b3 = write_container(three);
  b3[31] |= 0x02;  // channel 9 back on
  // The reader consumes the segment table as a third record, so the
  // mismatch surfaces as a structural or truncation error.
  try {
    parse_container(b3);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK((e.code() == ErrorCode::kFormat || e.code() == ErrorCode::kTruncated));
  }

  Container direct = small_container();
  direct.bounds.pop_back();
  expect_error([&] { write_container(direct); }, ErrorCode::kFormat,
               "3 channels present but 2 bound records");

  bad = good;
  bad.pop_back();
  expect_error([&] { parse_container(bad); }, ErrorCode::kTruncated,
               "container truncated at segment 2");
  bad = good;
  bad.resize(bad.size() - 3);
  expect_error([&] { parse_container(bad); }, ErrorCode::kTruncated,
               "container truncated at segment 1");
  bad = good;
  bad.resize(20);
  expect_error([&] { parse_container(bad); }, ErrorCode::kTruncated, "header");
  bad = good;
  bad.push_back(0);
  expect_error([&] { parse_container(bad); }, ErrorCode::kFormat, "trailing");

  bad = good;
  bad[31] |= 0x04;  // bit 10 of a 10-channel bitmap
  expect_error([&] { parse_container(bad); }, ErrorCode::kFormat, "");

  bad = good;
  bad[5] = 7;
  expect_error([&] { parse_container(bad); }, ErrorCode::kFormat, "configuration");

  bad = good;
  bad[6] = 1;
  expect_error([&] { parse_container(bad); }, ErrorCode::kUnsupported, "parity");

  Container lohi = small_container();
  lohi.bounds[0] = {3, 2};
  expect_error([&] { write_container(lohi); }, ErrorCode::kFormat, "");

  Container segs = small_container();
  segs.segments.pop_back();
  expect_error([&] { write_container(segs); }, ErrorCode::kFormat, "");

  Container pad = small_container();
  pad.padded_width = 100;
  expect_error([&] { write_container(pad); }, ErrorCode::kFormat, "");
}

TEST_CASE("every strict prefix fails to parse") {
  std::mt19937_64 rng(2);
  const auto bytes = write_container(random_container(rng));
  for (std::size_t n = 0; n < bytes.size(); ++n) {
    std::vector<std::uint8_t> prefix(bytes.begin(), bytes.begin() + n);
    CHECK_THROWS_AS(parse_container(prefix), Error);
  }
}

TEST_CASE("inspect: bpp for a 19661-byte 768x512 container") {
  Container c;
  c.latent_channels = 8;
  c.hyper_channels = 8;
  c.width_n = 64;
  c.true_width = c.padded_width = 768;
  c.true_height = c.padded_height = 512;
  c.present = std::vector<bool>(8, true);
  c.bounds = std::vector<SymbolBounds>(8, {-2, 2});
  const std::size_t header = header_size(c) + 12;  // three length fields
  c.segments = {std::vector<std::uint8_t>(1000), std::vector<std::uint8_t>(9000),
                std::vector<std::uint8_t>(19661 - 10000 - header)};
  const auto bytes = write_container(c);
  REQUIRE(bytes.size() == 19661);
  const ContainerSummary s = inspect(bytes);
  CHECK(s.bpp == doctest::Approx(19661.0 * 8 / 393216).epsilon(1e-12));
  CHECK(std::abs(s.bpp - 0.400) < 0.001);
  CHECK(format_summary(s).find("bpp: 0.4000") != std::string::npos);
}

TEST_CASE("inspect: all-zero latent reports every channel skipped") {
  Container c = small_container();
  c.present = std::vector<bool>(10, false);
  c.bounds.clear();
  const ContainerSummary s = inspect(write_container(c));
  CHECK(s.skipped_channels == 10);
  CHECK(s.present_channels == 0);
  CHECK(format_summary(s).find("skipped channels: 10/10") != std::string::npos);
  CHECK(s.segments[1].symbols == 0);
  CHECK(s.segments[2].symbols == 0);
}

TEST_CASE("inspect: segment bytes sum to file size minus header, symbol counts by parity") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    const Container c = random_container(rng);
    const auto bytes = write_container(c);
    const ContainerSummary s = inspect(bytes);
    REQUIRE(s.segments.size() == c.segments.size());
    std::size_t sum = 0, anchors = 0, nonanchors = 0;
    for (std::size_t i = 0; i < s.segments.size(); ++i) {
      sum += s.segments[i].bytes;
      if (i >= 1 && i <= c.streams) anchors += s.segments[i].symbols;
      if (i > c.streams) nonanchors += s.segments[i].symbols;
    }
    CHECK(sum == bytes.size() - s.header_bytes);
    const int h = c.latent_height(), w = c.latent_width();
    const std::size_t p = static_cast<std::size_t>(c.present_count());
    CHECK(anchors == p * anchor_count(h, w));
    CHECK(nonanchors == p * nonanchor_count(h, w));
    CHECK(anchors + nonanchors == p * h * w);
    CHECK(s.segments[0].symbols ==
          static_cast<std::size_t>(c.hyper_channels) * c.hyper_height() * c.hyper_width());
  }
}

TEST_CASE("anchor counts") {
  CHECK(anchor_count(2, 2) == 2);
  CHECK(anchor_count(3, 3) == 5);
  CHECK(nonanchor_count(3, 3) == 4);
  CHECK(anchor_count(1, 1) == 1);
  CHECK(nonanchor_count(1, 1) == 0);
  for (int h = 1; h < 12; ++h) {
    for (int w = 1; w < 12; ++w) {
      std::size_t even = 0;
      for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) even += (r + c) % 2 == 0;
      CHECK(anchor_count(h, w) == even);
      CHECK(anchor_count(h, w) + nonanchor_count(h, w) == static_cast<std::size_t>(h * w));
    }
  }
}

TEST_CASE("stream_channels partitions present channels in order") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 500; ++trial) {
    const int cy = 1 + static_cast<int>(rng() % 64);
    std::vector<bool> present(cy);
    std::vector<int> expect;
    for (int c = 0; c < cy; ++c) {
      present[c] = rng() % 3 != 0;
      if (present[c]) expect.push_back(c);
    }
    const int s = 1 + static_cast<int>(rng() % 8);
    const auto blocks = stream_channels(present, s);
    REQUIRE(blocks.size() == static_cast<std::size_t>(s));
    std::vector<int> joined;
    std::size_t lo = expect.size(), hi = 0;
    for (const auto& b : blocks) {
      joined.insert(joined.end(), b.begin(), b.end());
      lo = std::min(lo, b.size());
      hi = std::max(hi, b.size());
    }
    CHECK(joined == expect);
    CHECK(hi - lo <= 1);
  }
}
