// SPDX-License-Identifier: Apache-2.0

#include "envlight/sphere_oracle.hpp"

#include <cmath>
#include <string>

#include "envlight/env_warp.hpp"
#include "envlight/error.hpp"
#include "envlight/panorama.hpp"
#include "envlight/parallel.hpp"

namespace envlight {

namespace {

// Radiance-weighted texel directions, flattened for the diffuse inner loop.
struct WeightedTexels {
    std::vector<Eigen::Vector3d> dirs;
    std::vector<std::array<double, 3>> weights;  // L * dOmega
};

WeightedTexels weighted_texels(const EnvironmentMap& env) {
    const int w = env.width(), h = env.height();
    const auto rows = solid_angle_rows(w, h);
    WeightedTexels t;
    t.dirs.reserve(env.image().pixel_count());
    t.weights.reserve(env.image().pixel_count());
    for (int v = 0; v < h; ++v) {
        for (int u = 0; u < w; ++u) {
            const Rgb c = env.at(u, v);
            if (c.r == 0.f && c.g == 0.f && c.b == 0.f) continue;
            const double s = rows[static_cast<std::size_t>(v)];
            t.dirs.push_back(pixel_direction(u, v, w, h));
            t.weights.push_back({c.r * s, c.g * s, c.b * s});
        }
    }
    return t;
}

std::array<double, 3> cosine_sum(const WeightedTexels& t, const Eigen::Vector3d& n) {
    std::array<double, 3> e{};
    for (std::size_t i = 0; i < t.dirs.size(); ++i) {
        const double cos_term = n.dot(t.dirs[i]);
        if (cos_term <= 0.0) continue;
        e[0] += t.weights[i][0] * cos_term;
        e[1] += t.weights[i][1] * cos_term;
        e[2] += t.weights[i][2] * cos_term;
    }
    return e;
}

}  // namespace

void SphereRenderConfig::validate() const {
    if (image_size < 8) {
        throw InvariantError("sphere image size must be at least 8, got " +
                             std::to_string(image_size));
    }
    for (float a : {albedo.r, albedo.g, albedo.b}) {
        if (!(a >= 0.f && a <= 1.f)) throw InvariantError("albedo must lie in [0, 1]");
    }
    if (diffuse_max_env_height < 0) throw InvariantError("diffuse_max_env_height must be >= 0");
}

Rgb irradiance(const EnvironmentMap& env, const Eigen::Vector3d& normal) {
    if (!normal.allFinite() || std::abs(normal.norm() - 1.0) > 1e-6) {
        throw InvariantError("irradiance normal must be unit length");
    }
    const auto e = cosine_sum(weighted_texels(env), normal);
    return {static_cast<float>(e[0]), static_cast<float>(e[1]), static_cast<float>(e[2])};
}

EnvironmentMap downsample_env(const EnvironmentMap& env, int max_height) {
    EnvironmentMap cur = env;
    while (max_height > 0 && cur.height() > max_height && cur.height() % 2 == 0 &&
           cur.width() % 2 == 0) {
        const int w = cur.width() / 2, h = cur.height() / 2;
        const auto rows = solid_angle_rows(cur.width(), cur.height());
        Image3f next(w, h);
        for (int v = 0; v < h; ++v) {
            const double s0 = rows[static_cast<std::size_t>(2 * v)];
            const double s1 = rows[static_cast<std::size_t>(2 * v + 1)];
            const double norm = 2.0 * (s0 + s1);
            for (int u = 0; u < w; ++u) {
                const Rgb a = cur.at(2 * u, 2 * v), b = cur.at(2 * u + 1, 2 * v);
                const Rgb c = cur.at(2 * u, 2 * v + 1), d = cur.at(2 * u + 1, 2 * v + 1);
                next.set(u, v,
                         {static_cast<float>((s0 * (a.r + b.r) + s1 * (c.r + d.r)) / norm),
                          static_cast<float>((s0 * (a.g + b.g) + s1 * (c.g + d.g)) / norm),
                          static_cast<float>((s0 * (a.b + b.b) + s1 * (c.b + d.b)) / norm)});
            }
        }
        cur = EnvironmentMap(std::move(next));
    }
    return cur;
}

SphereRender render_sphere(const EnvironmentMap& env, const SphereRenderConfig& cfg) {
    cfg.validate();
    const int size = cfg.image_size;
    SphereRender out{Image3f(size, size),
                     std::vector<std::uint8_t>(static_cast<std::size_t>(size) * size, 0)};
    const Eigen::Matrix3d& cam = cfg.camera.matrix();

    WeightedTexels texels;
    if (cfg.mode == SphereMode::Diffuse) {
        texels = weighted_texels(downsample_env(env, cfg.diffuse_max_env_height));
    }

    parallel_for(0, static_cast<std::size_t>(size), [&](std::size_t row) {
        const int j = static_cast<int>(row);
        const double y = 1.0 - 2.0 * (j + 0.5) / size;
        for (int i = 0; i < size; ++i) {
            const double x = 2.0 * (i + 0.5) / size - 1.0;
            const double r2 = x * x + y * y;
            if (r2 > 1.0) continue;
            out.mask[static_cast<std::size_t>(j) * size + i] = 255;
            const Eigen::Vector3d n(x, y, std::sqrt(1.0 - r2));
            Rgb c;
            if (cfg.mode == SphereMode::Mirror) {
                const Eigen::Vector3d view(0.0, 0.0, -1.0);
                const Eigen::Vector3d refl = view - 2.0 * view.dot(n) * n;
                c = sample_direction(env.image(), cam * refl);
            } else {
                const auto e = cosine_sum(texels, cam * n);
                c = {static_cast<float>(cfg.albedo.r * e[0] / kPi),
                     static_cast<float>(cfg.albedo.g * e[1] / kPi),
                     static_cast<float>(cfg.albedo.b * e[2] / kPi)};
            }
            out.radiance.set(i, j, c);
        }
    });
    return out;
}

}  // namespace envlight
