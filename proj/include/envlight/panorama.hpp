// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>

namespace envlight {

// Camera frame: right-handed, +X right, +Y up, looking along -Z.
//
// Pixel (u, v) of a W x H panorama has its centre at
//   azimuth phi = 2*pi*(u + 0.5)/W - pi   (0 looks along -Z, increasing toward +X)
//   polar theta = pi*(v + 0.5)/H          (0 is +Y)
// and shows radiance arriving from
//   d = (sin(theta) sin(phi), cos(theta), -sin(theta) cos(phi)).

/// Direction for continuous pixel coordinates where integer values are
/// pixel centres.
Eigen::Vector3d panorama_direction(double x, double y, int width, int height) noexcept;

/// Direction through the centre of pixel (u, v).
inline Eigen::Vector3d pixel_direction(int u, int v, int width, int height) noexcept {
    return panorama_direction(u, v, width, height);
}

/// Inverse of panorama_direction. Returns continuous coordinates with
/// x in [-0.5, W - 0.5) and y in [-0.5, H - 0.5]. `dir` need not be unit.
Eigen::Vector2d direction_to_pixel(const Eigen::Vector3d& dir, int width, int height) noexcept;

/// Angle between two vectors in radians, robust near 0 and pi.
double angle_between(const Eigen::Vector3d& a, const Eigen::Vector3d& b) noexcept;

inline constexpr double kPi = 3.14159265358979323846;

inline constexpr double deg_to_rad(double deg) noexcept { return deg * kPi / 180.0; }
inline constexpr double rad_to_deg(double rad) noexcept { return rad * 180.0 / kPi; }

}  // namespace envlight
