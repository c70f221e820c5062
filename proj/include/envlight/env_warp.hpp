// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "envlight/image.hpp"
#include "envlight/rotation.hpp"

namespace envlight {

/// Bilinear lookup at continuous pixel coordinates (integers are pixel
/// centres). Azimuth wraps, polar coordinate clamps at the poles. Fractions
/// within 1e-6 of a pixel centre snap to it, so integer shifts are exact.
Rgb sample_bilinear(const Image3f& image, double x, double y) noexcept;

/// Radiance arriving from `dir` (any length > 0).
Rgb sample_direction(const Image3f& image, const Eigen::Vector3d& dir) noexcept;

/// out(d) = env(rel * d) for every output pixel direction d.
EnvironmentMap warp_env(const EnvironmentMap& env, const Rotation& rel);

enum class MotionPattern {
    CameraRotationFixedLight,
    LightRotationFixedCamera,
    BothRotate,
};

std::string_view to_string(MotionPattern p) noexcept;
/// Accepts the canonical names ("camera-rot-fixed-light", ...).
MotionPattern parse_motion_pattern(std::string_view name);

/// Per-frame camera-to-world rotations R_i and world light rotations L_i.
/// Frame 0 is the identity for both.
struct CameraTrajectory {
    MotionPattern pattern = MotionPattern::CameraRotationFixedLight;
    std::vector<Rotation> camera;
    std::vector<Rotation> light;

    std::size_t n_frames() const noexcept { return camera.size(); }

    /// Throws InvariantError on length mismatch, emptiness, or non-identity
    /// frame 0.
    void validate() const;

    /// Rotation mapping frame-i panorama directions into the frame-0 map:
    /// R_0^T * L_i^T * R_i.
    Rotation relative_rotation(std::size_t i) const;
};

nlohmann::json trajectory_to_json(const CameraTrajectory& traj);
CameraTrajectory trajectory_from_json(const nlohmann::json& j);

/// Frame i is warp_env(env0, traj.relative_rotation(i)); frame 0 equals env0.
std::vector<EnvironmentMap> make_environment_video(const EnvironmentMap& env0,
                                                   const CameraTrajectory& traj);

inline constexpr int kVelocityResampleFrames = 24;

/// Random smooth trajectory. Angular velocity is piecewise constant and
/// redrawn every 24 frames; its magnitude never exceeds `max_deg_per_frame`.
/// Camera motion uses a random axis in the camera frame; light motion turns
/// about world +Y.
CameraTrajectory gen_trajectory(MotionPattern pattern, int n_frames, std::uint64_t seed,
                                double max_deg_per_frame);

/// Per-row solid angle of a W x H panorama, (2pi/W)(pi/H) sin(theta_v).
std::vector<double> solid_angle_rows(int width, int height);

/// Full per-pixel solid-angle image (all channels equal).
Image3f solid_angle_map(int width, int height);

/// Sum of L * dOmega over the sphere, per channel.
std::array<double, 3> total_radiance(const EnvironmentMap& env);

}  // namespace envlight
