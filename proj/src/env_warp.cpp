// SPDX-License-Identifier: Apache-2.0

#include "envlight/env_warp.hpp"

#include <algorithm>
#include <cmath>

#include "envlight/error.hpp"
#include "envlight/panorama.hpp"
#include "envlight/parallel.hpp"

namespace envlight {

namespace {

constexpr double kSnap = 1e-6;

// Splits a continuous coordinate into a base index and a fraction, snapping
// fractions that are within kSnap of a pixel centre.
void split(double c, long& base, double& frac) noexcept {
    const double f = std::floor(c);
    base = static_cast<long>(f);
    frac = c - f;
    if (frac < kSnap) {
        frac = 0.0;
    } else if (frac > 1.0 - kSnap) {
        frac = 0.0;
        ++base;
    }
}

}  // namespace

Rgb sample_bilinear(const Image3f& image, double x, double y) noexcept {
    const long w = image.width();
    const long h = image.height();
    long x0, y0;
    double fx, fy;
    split(x, x0, fx);
    split(y, y0, fy);

    const auto wrap = [w](long i) { return static_cast<int>(((i % w) + w) % w); };
    const auto clamp = [h](long i) { return static_cast<int>(std::clamp(i, 0L, h - 1)); };
    const int xa = wrap(x0), xb = wrap(x0 + 1);
    const int ya = clamp(y0), yb = clamp(y0 + 1);

    if (fx == 0.0 && fy == 0.0) return image.at(xa, ya);

    const Rgb p00 = image.at(xa, ya), p10 = image.at(xb, ya);
    const Rgb p01 = image.at(xa, yb), p11 = image.at(xb, yb);
    const double w00 = (1 - fx) * (1 - fy), w10 = fx * (1 - fy);
    const double w01 = (1 - fx) * fy, w11 = fx * fy;
    return {static_cast<float>(w00 * p00.r + w10 * p10.r + w01 * p01.r + w11 * p11.r),
            static_cast<float>(w00 * p00.g + w10 * p10.g + w01 * p01.g + w11 * p11.g),
            static_cast<float>(w00 * p00.b + w10 * p10.b + w01 * p01.b + w11 * p11.b)};
}

Rgb sample_direction(const Image3f& image, const Eigen::Vector3d& dir) noexcept {
    const Eigen::Vector2d p = direction_to_pixel(dir, image.width(), image.height());
    return sample_bilinear(image, p.x(), p.y());
}

EnvironmentMap warp_env(const EnvironmentMap& env, const Rotation& rel) {
    const int w = env.width();
    const int h = env.height();
    const Eigen::Matrix3d& m = rel.matrix();
    Image3f out(w, h);
    parallel_for(0, static_cast<std::size_t>(h), [&](std::size_t row) {
        const int v = static_cast<int>(row);
        for (int u = 0; u < w; ++u) {
            out.set(u, v, sample_direction(env.image(), m * pixel_direction(u, v, w, h)));
        }
    });
    return EnvironmentMap(std::move(out));
}

void CameraTrajectory::validate() const {
    if (camera.empty()) throw InvariantError("trajectory has no frames");
    if (camera.size() != light.size()) {
        throw InvariantError("trajectory camera/light lists differ in length");
    }
    if (!camera.front().is_exact_identity() || !light.front().is_exact_identity()) {
        throw InvariantError("trajectory frame 0 must be the identity");
    }
}

Rotation CameraTrajectory::relative_rotation(std::size_t i) const {
    if (i >= n_frames()) throw InvariantError("trajectory frame index out of range");
    return camera.front().transposed() * light[i].transposed() * camera[i];
}

std::vector<EnvironmentMap> make_environment_video(const EnvironmentMap& env0,
                                                   const CameraTrajectory& traj) {
    traj.validate();
    std::vector<EnvironmentMap> frames;
    frames.reserve(traj.n_frames());
    for (std::size_t i = 0; i < traj.n_frames(); ++i) {
        const Rotation rel = traj.relative_rotation(i);
        frames.push_back(rel.is_exact_identity() ? env0 : warp_env(env0, rel));
    }
    return frames;
}

std::vector<double> solid_angle_rows(int width, int height) {
    require_panorama_dims(width, height);
    std::vector<double> rows(static_cast<std::size_t>(height));
    const double cell = (2.0 * kPi / width) * (kPi / height);
    for (int v = 0; v < height; ++v) {
        rows[static_cast<std::size_t>(v)] = cell * std::sin(kPi * (v + 0.5) / height);
    }
    return rows;
}

Image3f solid_angle_map(int width, int height) {
    const auto rows = solid_angle_rows(width, height);
    Image3f out(width, height);
    for (int v = 0; v < height; ++v) {
        const float s = static_cast<float>(rows[static_cast<std::size_t>(v)]);
        for (int u = 0; u < width; ++u) out.set(u, v, {s, s, s});
    }
    return out;
}

std::array<double, 3> total_radiance(const EnvironmentMap& env) {
    const auto rows = solid_angle_rows(env.width(), env.height());
    std::array<double, 3> total{};
    for (int v = 0; v < env.height(); ++v) {
        std::array<double, 3> row_sum{};
        const float* p = env.image().row(v);
        for (int u = 0; u < env.width(); ++u) {
            row_sum[0] += p[u * 3];
            row_sum[1] += p[u * 3 + 1];
            row_sum[2] += p[u * 3 + 2];
        }
        for (int c = 0; c < 3; ++c) total[c] += row_sum[c] * rows[static_cast<std::size_t>(v)];
    }
    return total;
}

}  // namespace envlight
