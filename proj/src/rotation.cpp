// SPDX-License-Identifier: Apache-2.0

#include "envlight/rotation.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Geometry>

#include "envlight/error.hpp"
#include "envlight/panorama.hpp"

namespace envlight {

namespace {
constexpr double kRotationTolerance = 1e-6;
}

Rotation Rotation::from_matrix(const Eigen::Matrix3d& m) {
    if (!m.allFinite()) throw InvariantError("rotation matrix has non-finite entries");
    const double ortho = (m.transpose() * m - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
    if (ortho > kRotationTolerance) {
        throw InvariantError("matrix is not orthonormal (deviation " + std::to_string(ortho) + ")");
    }
    if (std::abs(m.determinant() - 1.0) > kRotationTolerance) {
        throw InvariantError("rotation determinant must be +1");
    }
    return Rotation(m, Unchecked{});
}

Rotation Rotation::from_row_major(const std::array<double, 9>& v) {
    Eigen::Matrix3d m;
    m << v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8];
    return from_matrix(m);
}

std::array<double, 9> Rotation::row_major() const noexcept {
    std::array<double, 9> out{};
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) out[r * 3 + c] = m_(r, c);
    return out;
}

Rotation Rotation::about_axis(const Eigen::Vector3d& axis, double radians) {
    const double n = axis.norm();
    if (!(n > 0.0) || !std::isfinite(radians)) {
        throw InvariantError("rotation axis must be non-zero and the angle finite");
    }
    return Rotation(Eigen::AngleAxisd(radians, axis / n).toRotationMatrix(), Unchecked{});
}

Rotation Rotation::yaw(double radians) { return about_axis(Eigen::Vector3d::UnitY(), radians); }
Rotation Rotation::pitch(double radians) { return about_axis(Eigen::Vector3d::UnitX(), radians); }
Rotation Rotation::roll(double radians) { return about_axis(Eigen::Vector3d::UnitZ(), radians); }

Rotation Rotation::from_euler_deg(double yaw_deg, double pitch_deg, double roll_deg) {
    return yaw(deg_to_rad(yaw_deg)) * pitch(deg_to_rad(pitch_deg)) * roll(deg_to_rad(roll_deg));
}

double Rotation::angle() const noexcept {
    // Same robust route as Eigen::AngleAxis: sin from the skew part, cos from the trace.
    const Eigen::Vector3d skew(m_(2, 1) - m_(1, 2), m_(0, 2) - m_(2, 0), m_(1, 0) - m_(0, 1));
    const double c = std::clamp((m_.trace() - 1.0) * 0.5, -1.0, 1.0);
    return std::atan2(0.5 * skew.norm(), c);
}

}  // namespace envlight
