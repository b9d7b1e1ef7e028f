// Copyright (C) 2026 The LIC Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace lic::prob {

inline constexpr double kScaleMin = 1e-3;

enum class Family : std::uint8_t { kGaussian = 0, kLaplacian = 1, kLogistic = 2 };

inline constexpr int kComponents = 3;  // per mixture, per family
inline constexpr int kFamilies = 3;

double gaussian_cdf(double x, double mean, double scale);
double laplacian_cdf(double x, double mean, double scale);
double logistic_cdf(double x, double mean, double scale);

/// CDF and survival function (1 - CDF) of one family. The survival form is
/// evaluated directly so upper-tail differences keep full precision.
double family_cdf(Family f, double x, double mean, double scale);
double family_sf(Family f, double x, double mean, double scale);

struct Component {
  Family family = Family::kGaussian;
  double weight = 0.0;
  double mean = 0.0;
  double scale = 1.0;
};

/// Up to nine weighted components (three families x three). GMM elements use
/// three Gaussian components; GLLMM elements use all nine with weight
/// family_weight * component_weight.
struct Mixture {
  std::array<Component, kFamilies * kComponents> components{};
  int count = 0;

  void add(const Component& c) { components[count++] = c; }
  std::span<const Component> view() const {
    return {components.data(), static_cast<std::size_t>(count)};
  }
};

/// P(k) = C(k + 1/2) - C(k - 1/2) for the mixture CDF C.
double mixture_pmf(const Mixture& m, std::int64_t k);

/// Mass of (-inf, k + 1/2], i.e. everything up to and including symbol k.
double mixture_cdf_upper(const Mixture& m, std::int64_t k);

/// Raw network outputs for one latent element -> normalized mixture.
/// GMM raw layout: 3 weight logits, 3 means, 3 raw scales.
/// GLLMM raw layout: per family (Gaussian, Laplacian, Logistic) the GMM
/// layout (27 values), then 3 family logits.
inline constexpr int kGmmValues = 3 * kComponents;
inline constexpr int kGllmmValues = kFamilies * kGmmValues + kFamilies;

Mixture gmm_from_raw(std::span<const float> raw);
Mixture gllmm_from_raw(std::span<const float> raw);

/// softplus(x) clamped below at kScaleMin.
double scale_from_raw(double raw);

}  // namespace lic::prob
