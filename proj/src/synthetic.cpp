// SPDX-License-Identifier: Apache-2.0

#include "envlight/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "envlight/panorama.hpp"
#include "envlight/parallel.hpp"
#include "envlight/rng.hpp"

namespace envlight {

Eigen::Vector3d random_unit_vector(std::uint64_t seed, std::uint64_t counter) {
    const double z = 2.0 * to_unit(hash_draw(seed, 2 * counter, 0xD1Bull)) - 1.0;
    const double a = 2.0 * kPi * to_unit(hash_draw(seed, 2 * counter + 1, 0xD1Bull));
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    return {r * std::cos(a), r * std::sin(a), z};
}

EnvironmentMap smooth_env(int width, int height, std::uint64_t seed) {
    struct Lobe {
        Eigen::Vector3d dir;
        double power;
        double rgb[3];
    };
    SplitMix rng(mix64(seed));
    std::vector<Lobe> lobes;
    for (int i = 0; i < 5; ++i) {
        Lobe l;
        l.dir = random_unit_vector(seed, static_cast<std::uint64_t>(i));
        l.power = rng.uniform(1.0, 6.0);
        for (double& c : l.rgb) c = rng.uniform(0.2, 2.0);
        lobes.push_back(l);
    }
    const double floor_level = rng.uniform(0.05, 0.2);

    Image3f img(width, height);
    parallel_for(0, static_cast<std::size_t>(height), [&](std::size_t row) {
        const int v = static_cast<int>(row);
        for (int u = 0; u < width; ++u) {
            const Eigen::Vector3d d = pixel_direction(u, v, width, height);
            double c[3] = {floor_level, floor_level, floor_level};
            for (const Lobe& l : lobes) {
                const double k = std::pow(0.5 * (1.0 + d.dot(l.dir)), l.power);
                for (int ch = 0; ch < 3; ++ch) c[ch] += l.rgb[ch] * k;
            }
            img.set(u, v, {static_cast<float>(c[0]), static_cast<float>(c[1]),
                           static_cast<float>(c[2])});
        }
    });
    return EnvironmentMap(std::move(img));
}

EnvironmentMap add_sun(const EnvironmentMap& env, const Eigen::Vector3d& dir, double radius_deg,
                       float radiance) {
    Image3f img = env.image();
    const Eigen::Vector3d n = dir.normalized();
    const double radius = deg_to_rad(radius_deg);
    for (int v = 0; v < img.height(); ++v) {
        for (int u = 0; u < img.width(); ++u) {
            const double a = angle_between(pixel_direction(u, v, img.width(), img.height()), n);
            if (a >= radius) continue;
            const double t = a / radius;
            const auto add = static_cast<float>(radiance * (1.0 - t * t));
            const Rgb c = img.at(u, v);
            img.set(u, v, {c.r + add, c.g + add, c.b + add});
        }
    }
    return EnvironmentMap(std::move(img));
}

LatentSeq random_latents(LatentSeq::Dims dims, std::uint64_t seed, float lo, float hi) {
    LatentSeq out(dims);
    SplitMix rng(mix64(seed ^ 0x1A7E47ull));
    for (float& v : out.mutable_data()) v = static_cast<float>(rng.uniform(lo, hi));
    return out;
}

}  // namespace envlight
