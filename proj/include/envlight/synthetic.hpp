// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include <Eigen/Core>

#include "envlight/image.hpp"
#include "envlight/tensor.hpp"

namespace envlight {

/// Smooth, strictly positive test panorama: a constant floor plus a handful
/// of broad coloured cosine-power lobes at seeded directions.
EnvironmentMap smooth_env(int width, int height, std::uint64_t seed);

/// Adds a sun disk around `dir`: radiance * (1 - (angle/radius)^2) inside
/// `radius_deg`, so the brightest point sits at the centre.
EnvironmentMap add_sun(const EnvironmentMap& env, const Eigen::Vector3d& dir, double radius_deg,
                       float radiance);

/// Uniform random unit vector.
Eigen::Vector3d random_unit_vector(std::uint64_t seed, std::uint64_t counter);

/// Latent sequence with values uniform in [lo, hi).
LatentSeq random_latents(LatentSeq::Dims dims, std::uint64_t seed, float lo = -1.f,
                         float hi = 1.f);

}  // namespace envlight
