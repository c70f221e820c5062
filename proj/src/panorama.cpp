// SPDX-License-Identifier: Apache-2.0

#include "envlight/panorama.hpp"

#include <cmath>

#include <Eigen/Geometry>

namespace envlight {

Eigen::Vector3d panorama_direction(double x, double y, int width, int height) noexcept {
    const double phi = 2.0 * kPi * (x + 0.5) / width - kPi;
    const double theta = kPi * (y + 0.5) / height;
    const double st = std::sin(theta);
    return {st * std::sin(phi), std::cos(theta), -st * std::cos(phi)};
}

Eigen::Vector2d direction_to_pixel(const Eigen::Vector3d& dir, int width, int height) noexcept {
    const double horizontal = std::hypot(dir.x(), dir.z());
    const double phi = std::atan2(dir.x(), -dir.z());      // [-pi, pi]
    const double theta = std::atan2(horizontal, dir.y());  // [0, pi]
    double x = (phi + kPi) / (2.0 * kPi) * width - 0.5;
    if (x >= width - 0.5) x -= width;
    return {x, theta / kPi * height - 0.5};
}

double angle_between(const Eigen::Vector3d& a, const Eigen::Vector3d& b) noexcept {
    return std::atan2(a.cross(b).norm(), a.dot(b));
}

}  // namespace envlight
