// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>

#include <Eigen/Core>

namespace envlight {

/// Proper rotation: orthonormal with determinant +1 (both within 1e-6).
class Rotation {
public:
    Rotation() : m_(Eigen::Matrix3d::Identity()) {}

    /// Throws InvariantError if `m` is not a rotation within tolerance.
    static Rotation from_matrix(const Eigen::Matrix3d& m);
    static Rotation from_row_major(const std::array<double, 9>& values);
    static Rotation identity() { return Rotation(); }

    /// Right-handed rotation by `radians` about `axis` (normalized internally).
    static Rotation about_axis(const Eigen::Vector3d& axis, double radians);

    /// About +Y. Positive yaw turns the forward axis (-Z) toward -X (left).
    static Rotation yaw(double radians);
    /// About +X. Positive pitch tilts the forward axis toward +Y (up).
    static Rotation pitch(double radians);
    /// About +Z.
    static Rotation roll(double radians);
    /// yaw * pitch * roll, angles in degrees.
    static Rotation from_euler_deg(double yaw_deg, double pitch_deg, double roll_deg);

    const Eigen::Matrix3d& matrix() const noexcept { return m_; }
    std::array<double, 9> row_major() const noexcept;

    Rotation transposed() const { return Rotation(m_.transpose(), Unchecked{}); }
    Eigen::Vector3d apply(const Eigen::Vector3d& v) const noexcept { return m_ * v; }

    /// Rotation angle in radians, in [0, pi].
    double angle() const noexcept;

    bool is_exact_identity() const noexcept { return m_ == Eigen::Matrix3d::Identity(); }

    friend Rotation operator*(const Rotation& a, const Rotation& b) {
        return Rotation(a.m_ * b.m_, Unchecked{});
    }
    friend bool operator==(const Rotation& a, const Rotation& b) { return a.m_ == b.m_; }

private:
    struct Unchecked {};
    Rotation(const Eigen::Matrix3d& m, Unchecked) : m_(m) {}

    Eigen::Matrix3d m_;
};

}  // namespace envlight
