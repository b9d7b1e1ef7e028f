// Copyright (C) 2026 The LIC Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "lic/error.hpp"
#include "lic/prob/distributions.hpp"
#include "lic/prob/quantized_cdf.hpp"
#include "oracles/oracles.hpp"

using namespace lic;
using namespace lic::prob;

namespace {

// Direct closed forms, written independently of the library's tail logic.
double direct_cdf(Family f, double x, double mu, double s) {
  const double z = (x - mu) / s;
  switch (f) {
    case Family::kGaussian: return 0.5 * (1.0 + std::erf(z / std::sqrt(2.0)));
    case Family::kLaplacian: return z < 0 ? 0.5 * std::exp(z) : 1.0 - 0.5 * std::exp(-z);
    case Family::kLogistic: return 1.0 / (1.0 + std::exp(-z));
  }
  return 0.0;
}

double direct_pmf(const Mixture& m, long k) {
  double p = 0;
  for (const Component& c : m.view()) {
    p += c.weight * (direct_cdf(c.family, k + 0.5, c.mean, c.scale) -
                     direct_cdf(c.family, k - 0.5, c.mean, c.scale));
  }
  return p;
}

Mixture random_gllmm(std::mt19937_64& rng, float mean_range = 20.0f) {
  std::uniform_real_distribution<float> logit(-3, 3), mean(-mean_range, mean_range),
      raw_scale(-4, 3);
  std::vector<float> raw(kGllmmValues);
  for (int f = 0; f < kFamilies; ++f) {
    float* b = raw.data() + f * kGmmValues;
    for (int k = 0; k < 3; ++k) {
      b[k] = logit(rng);
      b[3 + k] = mean(rng);
      b[6 + k] = raw_scale(rng);
    }
  }
  for (int f = 0; f < 3; ++f) raw[kFamilies * kGmmValues + f] = logit(rng);
  return gllmm_from_raw(raw);
}

std::vector<std::uint32_t> masses(const QuantizedCdf& q) {
  std::vector<std::uint32_t> m;
  for (int s = q.lo; s <= q.hi; ++s) m.push_back(q.mass(s));
  return m;
}

}  // namespace

TEST_CASE("cdf: symmetry and closed-form points") {
  for (double mu : {0.0, -3.5, 12.25}) {
    CHECK(gaussian_cdf(mu, mu, 2.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(laplacian_cdf(mu, mu, 2.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(logistic_cdf(mu, mu, 2.0) == doctest::Approx(0.5).epsilon(1e-15));
  }
  CHECK(logistic_cdf(1.0 + 0.7 * std::log(3.0), 1.0, 0.7) == doctest::Approx(0.75).epsilon(1e-14));
}

TEST_CASE("cdf: gaussian_cdf(1.96) against numerical integration of the density") {
  const double integrated = oracle::normal_cdf_by_integration(1.96, 0.0, 1.0);
  CHECK(std::abs(integrated - 0.9750) <= 1e-4);
  CHECK(std::abs(gaussian_cdf(1.96, 0, 1) - integrated) <= 1e-9);
  CHECK(std::abs(gaussian_cdf(1.96, 0, 1) - 0.9750) <= 1e-4);
}

TEST_CASE("cdf: monotone with vanishing tails for every family") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> mu(-100, 100), sc(kScaleMin, 50);
  for (int trial = 0; trial < 500; ++trial) {
    const double m = mu(rng), s = sc(rng);
    for (Family f : {Family::kGaussian, Family::kLaplacian, Family::kLogistic}) {
      CHECK(family_cdf(f, m - 1e6 * s, m, s) <= 1e-9);
      CHECK(family_cdf(f, m + 1e6 * s, m, s) >= 1.0 - 1e-9);
      double prev = 0;
      for (int i = -60; i <= 60; ++i) {
        const double c = family_cdf(f, m + 0.25 * i * s, m, s);
        CHECK(c >= prev);
        prev = c;
        CHECK(family_cdf(f, m + 0.25 * i * s, m, s) + family_sf(f, m + 0.25 * i * s, m, s) ==
              doctest::Approx(1.0).epsilon(1e-15));
      }
    }
  }
}

TEST_CASE("cdf: library matches the direct closed forms") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> x(-30, 30), mu(-10, 10), sc(0.01, 8);
  for (int trial = 0; trial < 2000; ++trial) {
    const double a = x(rng), m = mu(rng), s = sc(rng);
    CHECK(std::abs(gaussian_cdf(a, m, s) - direct_cdf(Family::kGaussian, a, m, s)) <= 1e-14);
    CHECK(std::abs(laplacian_cdf(a, m, s) - direct_cdf(Family::kLaplacian, a, m, s)) <= 1e-14);
    CHECK(std::abs(logistic_cdf(a, m, s) - direct_cdf(Family::kLogistic, a, m, s)) <= 1e-14);
  }
}

TEST_CASE("mixture_pmf: examples") {
  Mixture tight;
  tight.add({Family::kGaussian, 1.0, 0.0, kScaleMin});
  CHECK(mixture_pmf(tight, 0) >= 0.999);

  // Hand computation: each component puts erf(5 / sqrt 2) ~ 1 - 5.7e-7 of its
  // mass on its own integer.
  Mixture two;
  two.add({Family::kGaussian, 0.5, 0.0, 0.1});
  two.add({Family::kGaussian, 0.5, 5.0, 0.1});
  CHECK(std::abs(mixture_pmf(two, 0) - 0.5) <= 1e-3);
  CHECK(std::abs(mixture_pmf(two, 5) - 0.5) <= 1e-3);
  CHECK(std::abs(mixture_pmf(two, 0) - 0.5 * std::erf(5.0 / std::sqrt(2.0))) <= 1e-12);
}

TEST_CASE("mixture_pmf: sums to one over [-1000, 1000]") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> w(0.05, 1), mu(-100, 100), sc(kScaleMin, 10);
  std::uniform_int_distribution<int> fam(0, 2);
  for (int trial = 0; trial < 300; ++trial) {
    Mixture m;
    double total = 0;
    for (int i = 0; i < 9; ++i) {
      m.add({static_cast<Family>(fam(rng)), w(rng), mu(rng), sc(rng)});
      total += m.components[i].weight;
    }
    for (int i = 0; i < 9; ++i) m.components[i].weight /= total;
    double sum = 0;
    for (int k = -1000; k <= 1000; ++k) {
      const double p = mixture_pmf(m, k);
      CHECK(p >= 0.0);
      sum += p;
    }
    CHECK(sum >= 1.0 - 1e-6);
    CHECK(sum <= 1.0 + 1e-9);
  }
}

TEST_CASE("raw parameters: normalized weights and clamped scales") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<float> v(-30, 30);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<float> raw(kGllmmValues);
    for (float& r : raw) r = v(rng);
    const Mixture g = gllmm_from_raw(raw);
    REQUIRE(g.count == 9);
    double total = 0;
    for (int f = 0; f < 3; ++f) {
      double fam = 0;
      for (int k = 0; k < 3; ++k) {
        const Component& c = g.components[f * 3 + k];
        CHECK(c.family == static_cast<Family>(f));
        CHECK(c.scale >= kScaleMin);
        fam += c.weight;
      }
      total += fam;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    const Mixture m = gmm_from_raw(std::span<const float>(raw).first(kGmmValues));
    REQUIRE(m.count == 3);
    CHECK(m.components[0].weight + m.components[1].weight + m.components[2].weight ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(scale_from_raw(-50.0) == kScaleMin);
  CHECK(scale_from_raw(0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(scale_from_raw(30.0) == doctest::Approx(30.0).epsilon(1e-12));
}

TEST_CASE("gllmm degenerates to each pure family under one-hot family weights") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<float> v(-3, 3);
  for (int pure = 0; pure < 3; ++pure) {
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<float> raw(kGllmmValues);
      for (float& r : raw) r = v(rng);
      for (int f = 0; f < 3; ++f) raw[27 + f] = f == pure ? 0.0f : -1000.0f;
      const Mixture g = gllmm_from_raw(raw);
      // Pure-family mixture built by hand from the same raw block.
      const float* b = raw.data() + pure * kGmmValues;
      const double mx = std::max({b[0], b[1], b[2]});
      double e[3], sum = 0;
      for (int k = 0; k < 3; ++k) sum += e[k] = std::exp(b[k] - mx);
      Mixture ref;
      for (int k = 0; k < 3; ++k) {
        const double s = std::max(std::log1p(std::exp(double(b[6 + k]))), kScaleMin);
        ref.add({static_cast<Family>(pure), e[k] / sum, b[3 + k], s});
      }
      for (int k = -10; k <= 10; ++k) {
        CHECK(std::abs(mixture_pmf(g, k) - mixture_pmf(ref, k)) <= 1e-12);
        CHECK(std::abs(mixture_pmf(g, k) - direct_pmf(ref, k)) <= 1e-12);
      }
    }
  }
}

TEST_CASE("quantize_pmf: hand-traced examples") {
  const std::vector<double> uniform(4, 0.25);
  std::vector<std::uint32_t> cum(5);
  quantize_pmf(uniform, 4, cum);
  CHECK(cum == std::vector<std::uint32_t>{0, 4, 8, 12, 16});
  CHECK(build_quantized_cdf(uniform, 0, 8).cum == std::vector<std::uint32_t>{0, 64, 128, 192, 256});

  const std::vector<double> spike = {1.0, 0.0, 0.0};
  const QuantizedCdf s = build_quantized_cdf(spike, -1, 8);
  CHECK(masses(s) == std::vector<std::uint32_t>{254, 1, 1});
  CHECK(s.lo == -1);
  CHECK(s.hi == 1);
  CHECK(s.valid());
}

TEST_CASE("build_quantized_cdf: error cases") {
  const std::vector<double> wide(257, 1.0 / 257);
  CHECK_THROWS_AS(build_quantized_cdf(wide, 0, 8), Error);
  const std::vector<double> ok(4, 0.25);
  CHECK_THROWS_AS(build_quantized_cdf(ok, 0, 7), Error);
  CHECK_THROWS_AS(build_quantized_cdf(ok, 0, 17), Error);
  Mixture m;
  m.add({Family::kGaussian, 1.0, 0.0, 1.0});
  CHECK_THROWS_AS(build_quantized_cdf(m, 3, 2), Error);
  const QuantizedCdf full = build_quantized_cdf(std::vector<double>(256, 1.0 / 256), 0, 8);
  CHECK(full.valid());
}

TEST_CASE("build_quantized_cdf: invariants on 10^4 fuzzed mixtures") {
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> lo(-40, 10), width(0, 60), prec(8, 16);
  for (int trial = 0; trial < 10000; ++trial) {
    const Mixture m = random_gllmm(rng);
    const int a = lo(rng);
    const int b = a + width(rng);
    const int p = prec(rng);
    const QuantizedCdf q = build_quantized_cdf(m, a, b, p);
    REQUIRE(q.cum.size() == static_cast<std::size_t>(b - a + 2));
    CHECK(q.cum.front() == 0u);
    CHECK(q.cum.back() == (1u << p));
    for (std::size_t i = 1; i < q.cum.size(); ++i) CHECK(q.cum[i] > q.cum[i - 1]);
    CHECK(q.valid());
  }
}

TEST_CASE("build_quantized_cdf: folded tails and ranking") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 2000; ++trial) {
    const Mixture m = random_gllmm(rng);
    const int lo = -8, hi = 8;
    std::vector<double> pmf(hi - lo + 1);
    support_pmf(m, lo, hi, pmf);
    CHECK(std::accumulate(pmf.begin(), pmf.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    double below = 0, above = 0;
    for (int k = -2000; k < lo; ++k) below += direct_pmf(m, k);
    for (int k = hi + 1; k <= 2000; ++k) above += direct_pmf(m, k);
    CHECK(std::abs(pmf.front() - (direct_pmf(m, lo) + below)) <= 1e-9);
    CHECK(std::abs(pmf.back() - (direct_pmf(m, hi) + above)) <= 1e-9);

    const QuantizedCdf q = build_quantized_cdf(pmf, lo, 16);
    const double unit = std::ldexp(1.0, -16);
    for (int a = lo; a <= hi; ++a) {
      for (int b = lo; b <= hi; ++b) {
        if (pmf[a - lo] > pmf[b - lo] + unit) CHECK(q.mass(a) >= q.mass(b));
      }
    }
  }
}

TEST_CASE("quantized cross-entropy overhead at P = 16 is at most 0.01 bits per symbol") {
  std::mt19937_64 rng(8);
  double worst = 0, mean = 0;
  const int trials = 2000;
  for (int trial = 0; trial < trials; ++trial) {
    const Mixture m = random_gllmm(rng, 6.0f);
    const int lo = -24, hi = 24;
    std::vector<double> pmf(hi - lo + 1);
    support_pmf(m, lo, hi, pmf);
    const QuantizedCdf q = build_quantized_cdf(pmf, lo, 16);
    double overhead = 0;
    for (int k = lo; k <= hi; ++k) {
      const double p = pmf[k - lo];
      if (p <= 0) continue;
      overhead += p * (quantized_bits(q, k) + std::log2(p));
    }
    worst = std::max(worst, overhead);
    mean += overhead / trials;
  }
  MESSAGE("mean overhead " << mean << " bits, worst " << worst);
  CHECK(worst <= 0.01);
}

TEST_CASE("pmf_bits: examples") {
  std::vector<QuantizedCdf> halves(8, build_quantized_cdf(std::vector<double>{0.5, 0.5}, 0, 16));
  const std::vector<std::int32_t> syms = {0, 1, 1, 0, 0, 0, 1, 0};
  CHECK(pmf_bits(halves, syms) == 8.0);

  for (int k = 1; k <= 8; ++k) {
    const int n = 1 << k;
    const QuantizedCdf u = build_quantized_cdf(std::vector<double>(n, 1.0 / n), 0, 16);
    for (int s = 0; s < n; s += std::max(1, n / 7)) CHECK(quantized_bits(u, s) == k);
  }
  // Every mass is at least one unit, so bits never exceed P.
  const QuantizedCdf spike = build_quantized_cdf(std::vector<double>{1.0, 0.0}, 0, 16);
  CHECK(quantized_bits(spike, 1) == 16.0);
}

TEST_CASE("pmf_bits: mixtures against an independent summation") {
  std::mt19937_64 rng(9);
  std::vector<Mixture> params;
  std::vector<std::int32_t> syms;
  double expect = 0;
  for (int i = 0; i < 5000; ++i) {
    const Mixture m = random_gllmm(rng, 4.0f);
    std::uniform_int_distribution<int> s(-3, 3);
    const int k = s(rng);
    params.push_back(m);
    syms.push_back(k);
    expect += -std::log2(direct_pmf(m, k));
  }
  const double got = pmf_bits(params, syms);
  CHECK(std::abs(got - expect) <= 1e-9 * std::max(1.0, expect));
}

TEST_CASE("prior block: byte layout and roundtrip") {
  FactorizedPrior prior;
  prior.channels.push_back(build_quantized_cdf(std::vector<double>{0.25, 0.5, 0.25}, -1, 12));
  prior.channels.push_back(build_quantized_cdf(std::vector<double>{1.0}, 7, 16));
  ByteWriter w;
  write_prior(w, prior);
  const std::vector<std::uint8_t> bytes = w.take();
  // u16 count, then (4 + 4 + 1 + 4 * (n + 1)) per channel.
  CHECK(bytes.size() == 2 + (9 + 4 * 4) + (9 + 4 * 2));
  CHECK(bytes[0] == 2);
  CHECK(bytes[1] == 0);
  CHECK(bytes[2] == 0xFF);  // lo = -1 little-endian
  CHECK(bytes[10] == 12);
  ByteReader r(bytes);
  CHECK(read_prior(r) == prior);
  CHECK(r.remaining() == 0);
}
