// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace envlight {

struct Rgb {
    float r = 0.f;
    float g = 0.f;
    float b = 0.f;

    friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Row-major interleaved RGB float image. No value-range constraints; the
/// typed wrappers below add them.
class Image3f {
public:
    Image3f() = default;
    Image3f(int width, int height, Rgb fill = {});
    Image3f(int width, int height, std::vector<float> data);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t pixel_count() const noexcept {
        return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
    }

    Rgb at(int x, int y) const noexcept {
        const float* p = &data_[index(x, y)];
        return {p[0], p[1], p[2]};
    }
    void set(int x, int y, Rgb c) noexcept {
        float* p = &data_[index(x, y)];
        p[0] = c.r;
        p[1] = c.g;
        p[2] = c.b;
    }
    float* row(int y) noexcept { return &data_[index(0, y)]; }
    const float* row(int y) const noexcept { return &data_[index(0, y)]; }

    std::span<float> data() noexcept { return data_; }
    std::span<const float> data() const noexcept { return data_; }

    friend bool operator==(const Image3f&, const Image3f&) = default;

private:
    std::size_t index(int x, int y) const noexcept {
        return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                static_cast<std::size_t>(x)) * 3;
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<float> data_;
};

/// Equirectangular linear-radiance panorama: width == 2 * height, every
/// channel finite and non-negative. Construction enforces both.
class EnvironmentMap {
public:
    EnvironmentMap() = default;
    explicit EnvironmentMap(Image3f image);
    EnvironmentMap(int width, int height, Rgb fill = {});

    int width() const noexcept { return image_.width(); }
    int height() const noexcept { return image_.height(); }
    Rgb at(int x, int y) const noexcept { return image_.at(x, y); }
    const Image3f& image() const noexcept { return image_; }
    std::span<const float> data() const noexcept { return image_.data(); }

    friend bool operator==(const EnvironmentMap&, const EnvironmentMap&) = default;

private:
    Image3f image_;
};

/// Display-referred RGB image with all values in [0, 1].
class LdrImage {
public:
    LdrImage() = default;
    explicit LdrImage(Image3f image);

    int width() const noexcept { return image_.width(); }
    int height() const noexcept { return image_.height(); }
    Rgb at(int x, int y) const noexcept { return image_.at(x, y); }
    const Image3f& image() const noexcept { return image_; }
    std::span<const float> data() const noexcept { return image_.data(); }

    friend bool operator==(const LdrImage&, const LdrImage&) = default;

private:
    Image3f image_;
};

/// Throws InvariantError unless the dimensions describe a 2:1 panorama.
void require_panorama_dims(int width, int height);

}  // namespace envlight
