// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "envlight/image.hpp"
#include "envlight/rotation.hpp"

namespace envlight {

enum class SphereMode { Mirror, Diffuse };

/// Orthographic view of a unit sphere at the origin from +Z, looking along
/// -Z. The image spans [-1, 1] in x and y.
struct SphereRenderConfig {
    int image_size = 256;
    SphereMode mode = SphereMode::Mirror;
    Rgb albedo{1.f, 1.f, 1.f};
    /// Camera-to-world rotation; the environment is expressed in world axes.
    Rotation camera;
    /// Diffuse shading box-filters the environment down to at most this many
    /// rows before summing. 0 keeps full resolution.
    int diffuse_max_env_height = 32;

    void validate() const;
};

struct SphereRender {
    Image3f radiance;
    /// 255 where the pixel centre hits the sphere, 0 elsewhere.
    std::vector<std::uint8_t> mask;
};

/// Sum over pixels of L(w) * max(0, n.w) * dOmega. `normal` must be unit
/// length within 1e-6.
Rgb irradiance(const EnvironmentMap& env, const Eigen::Vector3d& normal);

/// Solid-angle-weighted 2x2 box reduction, repeated until height <= max_height
/// or a dimension turns odd. Constant maps stay constant; total radiance
/// moves only by the difference between fine and coarse quadrature.
EnvironmentMap downsample_env(const EnvironmentMap& env, int max_height);

SphereRender render_sphere(const EnvironmentMap& env, const SphereRenderConfig& cfg);

}  // namespace envlight
