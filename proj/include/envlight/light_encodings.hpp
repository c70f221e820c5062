// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>

#include "envlight/image.hpp"

namespace envlight {

inline constexpr double kDefaultLogNormalization = 60000.0;

/// Per-channel Reinhard curve v / (1 + v), no display gamma.
LdrImage tonemap_reinhard(const EnvironmentMap& env);
Image3f tonemap_reinhard(const Image3f& image);

double encode_log_value(double radiance, double m) noexcept;
double decode_log_value(double encoded, double m) noexcept;

/// log(1 + E) / log(1 + M), elementwise. Radiance above M maps above 1 and is
/// kept; use count_log_overflow to report it.
Image3f encode_log(const EnvironmentMap& env, double m = kDefaultLogNormalization);

/// exp(v * log(1 + M)) - 1, the exact inverse of encode_log. Negative inputs
/// (which no encoder produces) clamp to zero radiance.
EnvironmentMap decode_log(const Image3f& log_image, double m = kDefaultLogNormalization);

/// Number of channel values strictly above 1.
std::size_t count_log_overflow(const Image3f& log_image) noexcept;

/// Per-pixel ray directions in the camera frame, stored negated relative to
/// the panorama convention (e = -d) and packed as RGB = (e + 1) / 2.
LdrImage directional_encoding(int width, int height);

/// Unpacks one directional-encoding pixel back to the stored vector e.
inline void decode_direction(Rgb rgb, double out[3]) noexcept {
    out[0] = 2.0 * rgb.r - 1.0;
    out[1] = 2.0 * rgb.g - 1.0;
    out[2] = 2.0 * rgb.b - 1.0;
}

struct LightBundle {
    LdrImage ldr;
    Image3f log;
    LdrImage dir;
    double m_const = kDefaultLogNormalization;
};

LightBundle encode_bundle(const EnvironmentMap& env, double m = kDefaultLogNormalization);

}  // namespace envlight
