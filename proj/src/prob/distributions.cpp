// Copyright (C) 2026 The LIC Authors
// SPDX-License-Identifier: Apache-2.0

#include "lic/prob/distributions.hpp"

#include <algorithm>
#include <cmath>

namespace lic::prob {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

struct Tails {
  double cdf;
  double sf;
};

// CDF and survival at standardized z, each computed without cancellation
// on its small side.
Tails standard_tails(Family f, double z) {
  switch (f) {
    case Family::kGaussian: {
      const double small = 0.5 * std::erfc(std::abs(z) * kInvSqrt2);
      return z < 0 ? Tails{small, 1.0 - small} : Tails{1.0 - small, small};
    }
    case Family::kLaplacian: {
      const double small = 0.5 * std::exp(-std::abs(z));
      return z < 0 ? Tails{small, 1.0 - small} : Tails{1.0 - small, small};
    }
    case Family::kLogistic: {
      const double e = std::exp(-std::abs(z));
      const double small = e / (1.0 + e);
      const double large = 1.0 / (1.0 + e);
      return z < 0 ? Tails{small, large} : Tails{large, small};
    }
  }
  return {0.5, 0.5};
}

Tails tails(const Component& c, double x) {
  return standard_tails(c.family, (x - c.mean) / std::max(c.scale, kScaleMin));
}

// Mass of [a, b] for one component, using whichever tail is accurate.
double interval_mass(const Component& c, double a, double b) {
  const Tails ta = tails(c, a);
  const Tails tb = tails(c, b);
  if (a >= c.mean) return std::max(0.0, ta.sf - tb.sf);
  return std::max(0.0, tb.cdf - ta.cdf);
}

void softmax3(const float* logits, double* out) {
  const double m = std::max({static_cast<double>(logits[0]),
                             static_cast<double>(logits[1]),
                             static_cast<double>(logits[2])});
  double e[3];
  double sum = 0.0;
  for (int i = 0; i < 3; ++i) {
    e[i] = std::exp(static_cast<double>(logits[i]) - m);
    sum += e[i];
  }
  for (int i = 0; i < 3; ++i) out[i] = e[i] / sum;
}

}  // namespace

double gaussian_cdf(double x, double mean, double scale) {
  return standard_tails(Family::kGaussian, (x - mean) / scale).cdf;
}

double laplacian_cdf(double x, double mean, double scale) {
  return standard_tails(Family::kLaplacian, (x - mean) / scale).cdf;
}

double logistic_cdf(double x, double mean, double scale) {
  return standard_tails(Family::kLogistic, (x - mean) / scale).cdf;
}

double family_cdf(Family f, double x, double mean, double scale) {
  return standard_tails(f, (x - mean) / scale).cdf;
}

double family_sf(Family f, double x, double mean, double scale) {
  return standard_tails(f, (x - mean) / scale).sf;
}

double mixture_pmf(const Mixture& m, std::int64_t k) {
  const double a = static_cast<double>(k) - 0.5;
  const double b = static_cast<double>(k) + 0.5;
  double p = 0.0;
  for (const Component& c : m.view()) p += c.weight * interval_mass(c, a, b);
  return p;
}

double mixture_cdf_upper(const Mixture& m, std::int64_t k) {
  const double b = static_cast<double>(k) + 0.5;
  double p = 0.0;
  for (const Component& c : m.view()) p += c.weight * tails(c, b).cdf;
  return p;
}

double scale_from_raw(double raw) {
  // softplus, stable for large |raw|
  const double sp = raw > 20.0 ? raw : std::log1p(std::exp(raw));
  return std::max(sp, kScaleMin);
}

Mixture gmm_from_raw(std::span<const float> raw) {
  Mixture m;
  double w[3];
  softmax3(raw.data(), w);
  for (int k = 0; k < kComponents; ++k) {
    m.add({Family::kGaussian, w[k], raw[kComponents + k],
           scale_from_raw(raw[2 * kComponents + k])});
  }
  return m;
}

Mixture gllmm_from_raw(std::span<const float> raw) {
  Mixture m;
  double fw[3];
  softmax3(raw.data() + kFamilies * kGmmValues, fw);
  for (int f = 0; f < kFamilies; ++f) {
    const float* base = raw.data() + f * kGmmValues;
    double w[3];
    softmax3(base, w);
    for (int k = 0; k < kComponents; ++k) {
      m.add({static_cast<Family>(f), fw[f] * w[k], base[kComponents + k],
             scale_from_raw(base[2 * kComponents + k])});
    }
  }
  return m;
}

}  // namespace lic::prob
