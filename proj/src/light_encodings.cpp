// SPDX-License-Identifier: Apache-2.0

#include "envlight/light_encodings.hpp"

#include <cmath>
#include <string>

#include "envlight/error.hpp"
#include "envlight/panorama.hpp"
#include "envlight/parallel.hpp"

namespace envlight {

namespace {

void require_positive_m(double m) {
    if (!(m > 0.0) || !std::isfinite(m)) {
        throw InvariantError("log normalization constant must be positive and finite, got " +
                             std::to_string(m));
    }
}

}  // namespace

Image3f tonemap_reinhard(const Image3f& image) {
    Image3f out(image.width(), image.height());
    const auto src = image.data();
    auto dst = out.data();
    for (std::size_t i = 0; i < src.size(); ++i) {
        const double v = src[i];
        dst[i] = static_cast<float>(v / (1.0 + v));
    }
    return out;
}

LdrImage tonemap_reinhard(const EnvironmentMap& env) {
    return LdrImage(tonemap_reinhard(env.image()));
}

double encode_log_value(double radiance, double m) noexcept {
    return std::log1p(radiance) / std::log1p(m);
}

double decode_log_value(double encoded, double m) noexcept {
    return std::expm1(encoded * std::log1p(m));
}

Image3f encode_log(const EnvironmentMap& env, double m) {
    require_positive_m(m);
    const double denom = std::log1p(m);
    Image3f out(env.width(), env.height());
    const auto src = env.data();
    auto dst = out.data();
    for (std::size_t i = 0; i < src.size(); ++i) {
        dst[i] = static_cast<float>(std::log1p(static_cast<double>(src[i])) / denom);
    }
    return out;
}

EnvironmentMap decode_log(const Image3f& log_image, double m) {
    require_positive_m(m);
    require_panorama_dims(log_image.width(), log_image.height());
    const double scale = std::log1p(m);
    Image3f out(log_image.width(), log_image.height());
    const auto src = log_image.data();
    auto dst = out.data();
    for (std::size_t i = 0; i < src.size(); ++i) {
        if (!std::isfinite(src[i])) {
            throw InvariantError("log image value at float index " + std::to_string(i) +
                                 " is not finite");
        }
        const double v = std::expm1(static_cast<double>(src[i]) * scale);
        if (!std::isfinite(static_cast<float>(v))) {
            throw InvariantError("log image value at float index " + std::to_string(i) +
                                 " decodes beyond float range");
        }
        dst[i] = static_cast<float>(std::max(0.0, v));
    }
    return EnvironmentMap(std::move(out));
}

std::size_t count_log_overflow(const Image3f& log_image) noexcept {
    std::size_t n = 0;
    for (float v : log_image.data()) n += v > 1.f;
    return n;
}

LdrImage directional_encoding(int width, int height) {
    require_panorama_dims(width, height);
    Image3f out(width, height);
    parallel_for(0, static_cast<std::size_t>(height), [&](std::size_t row) {
        const int v = static_cast<int>(row);
        for (int u = 0; u < width; ++u) {
            const Eigen::Vector3d e = -pixel_direction(u, v, width, height);
            out.set(u, v, {static_cast<float>((e.x() + 1.0) * 0.5),
                           static_cast<float>((e.y() + 1.0) * 0.5),
                           static_cast<float>((e.z() + 1.0) * 0.5)});
        }
    });
    return LdrImage(std::move(out));
}

LightBundle encode_bundle(const EnvironmentMap& env, double m) {
    LightBundle b;
    b.ldr = tonemap_reinhard(env);
    b.log = encode_log(env, m);
    b.dir = directional_encoding(env.width(), env.height());
    b.m_const = m;
    return b;
}

}  // namespace envlight
