// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <string>

#include "envlight/env_warp.hpp"
#include "envlight/error.hpp"
#include "envlight/panorama.hpp"
#include "envlight/rng.hpp"

namespace envlight {

namespace {

constexpr std::uint64_t kCameraStream = 0xC0FFEEull;
constexpr std::uint64_t kLightStream = 0x11647ull;

Eigen::Vector3d random_axis(std::uint64_t seed, std::uint64_t segment) {
    const double z = 2.0 * to_unit(hash_draw(seed, segment * 4 + 0, kCameraStream)) - 1.0;
    const double a = 2.0 * kPi * to_unit(hash_draw(seed, segment * 4 + 1, kCameraStream));
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    return {r * std::cos(a), r * std::sin(a), z};
}

// Speeds are drawn in [0.25, 1) of the cap so motion never stalls entirely.
double random_speed(std::uint64_t seed, std::uint64_t counter, std::uint64_t stream,
                    double max_rad) {
    return max_rad * (0.25 + 0.75 * to_unit(hash_draw(seed, counter, stream)));
}

}  // namespace

std::string_view to_string(MotionPattern p) noexcept {
    switch (p) {
        case MotionPattern::CameraRotationFixedLight: return "camera-rot-fixed-light";
        case MotionPattern::LightRotationFixedCamera: return "light-rot-fixed-camera";
        case MotionPattern::BothRotate: return "both";
    }
    return "unknown";
}

MotionPattern parse_motion_pattern(std::string_view name) {
    for (MotionPattern p : {MotionPattern::CameraRotationFixedLight,
                            MotionPattern::LightRotationFixedCamera, MotionPattern::BothRotate}) {
        if (name == to_string(p)) return p;
    }
    throw UsageError("unknown motion pattern '" + std::string(name) +
                     "' (expected camera-rot-fixed-light, light-rot-fixed-camera or both)");
}

CameraTrajectory gen_trajectory(MotionPattern pattern, int n_frames, std::uint64_t seed,
                                double max_deg_per_frame) {
    if (n_frames < 1) throw InvariantError("trajectory needs at least one frame");
    if (!(max_deg_per_frame >= 0.0) || !std::isfinite(max_deg_per_frame)) {
        throw InvariantError("max angular speed must be finite and non-negative");
    }
    const double max_rad = deg_to_rad(max_deg_per_frame);
    const bool camera_moves = pattern != MotionPattern::LightRotationFixedCamera;
    const bool light_moves = pattern != MotionPattern::CameraRotationFixedLight;

    CameraTrajectory traj;
    traj.pattern = pattern;
    traj.camera.reserve(static_cast<std::size_t>(n_frames));
    traj.light.reserve(static_cast<std::size_t>(n_frames));
    traj.camera.push_back(Rotation::identity());
    traj.light.push_back(Rotation::identity());

    Rotation cam_step, light_step;
    for (int i = 1; i < n_frames; ++i) {
        const auto segment = static_cast<std::uint64_t>((i - 1) / kVelocityResampleFrames);
        if ((i - 1) % kVelocityResampleFrames == 0) {
            if (camera_moves && max_rad > 0.0) {
                cam_step = Rotation::about_axis(random_axis(seed, segment),
                                                random_speed(seed, segment * 4 + 2, kCameraStream,
                                                             max_rad));
            }
            if (light_moves && max_rad > 0.0) {
                const double sign = to_unit(hash_draw(seed, segment * 2 + 1, kLightStream)) < 0.5
                                        ? -1.0
                                        : 1.0;
                light_step = Rotation::yaw(sign * random_speed(seed, segment * 2, kLightStream,
                                                               max_rad));
            }
        }
        // Camera turns in its own frame; the light turns about world up.
        traj.camera.push_back(traj.camera.back() * cam_step);
        traj.light.push_back(light_step * traj.light.back());
    }
    return traj;
}

nlohmann::json trajectory_to_json(const CameraTrajectory& traj) {
    nlohmann::json frames = nlohmann::json::array();
    for (std::size_t i = 0; i < traj.n_frames(); ++i) {
        frames.push_back({{"camera", traj.camera[i].row_major()},
                          {"light", traj.light[i].row_major()}});
    }
    return {{"pattern", to_string(traj.pattern)},
            {"n_frames", traj.n_frames()},
            {"frames", std::move(frames)}};
}

CameraTrajectory trajectory_from_json(const nlohmann::json& j) {
    try {
        CameraTrajectory traj;
        traj.pattern = parse_motion_pattern(j.at("pattern").get<std::string>());
        const auto n = j.at("n_frames").get<std::size_t>();
        const auto& frames = j.at("frames");
        if (frames.size() != n) throw InvariantError("trajectory n_frames disagrees with frames");
        for (const auto& f : frames) {
            traj.camera.push_back(Rotation::from_row_major(f.at("camera").get<std::array<double, 9>>()));
            traj.light.push_back(Rotation::from_row_major(f.at("light").get<std::array<double, 9>>()));
        }
        traj.validate();
        return traj;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed trajectory JSON: ") + e.what(), 0);
    }
}

}  // namespace envlight
