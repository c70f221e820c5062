// SPDX-License-Identifier: Apache-2.0

#include "envlight/image.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "envlight/error.hpp"
#include "envlight/tensor.hpp"

namespace envlight {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::Usage: return "usage";
        case ErrorKind::Parse: return "parse";
        case ErrorKind::Io: return "io";
        case ErrorKind::Invariant: return "invariant";
    }
    return "unknown";
}

namespace {

std::size_t checked_area(int width, int height) {
    if (width <= 0 || height <= 0) {
        throw InvariantError("image dimensions must be positive, got " + std::to_string(width) +
                             "x" + std::to_string(height));
    }
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
}

}  // namespace

Image3f::Image3f(int width, int height, Rgb fill)
    : width_(width), height_(height), data_(checked_area(width, height) * 3) {
    for (std::size_t i = 0; i < data_.size(); i += 3) {
        data_[i] = fill.r;
        data_[i + 1] = fill.g;
        data_[i + 2] = fill.b;
    }
}

Image3f::Image3f(int width, int height, std::vector<float> data)
    : width_(width), height_(height), data_(std::move(data)) {
    if (data_.size() != checked_area(width, height) * 3) {
        throw InvariantError("image buffer holds " + std::to_string(data_.size()) +
                             " floats, expected " + std::to_string(pixel_count() * 3));
    }
}

void require_panorama_dims(int width, int height) {
    if (width <= 0 || height <= 0 || width != 2 * height) {
        throw InvariantError("equirectangular map needs width == 2 * height, got " +
                             std::to_string(width) + "x" + std::to_string(height));
    }
}

EnvironmentMap::EnvironmentMap(Image3f image) : image_(std::move(image)) {
    require_panorama_dims(image_.width(), image_.height());
    const auto d = image_.data();
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (!std::isfinite(d[i]) || d[i] < 0.f) {
            throw InvariantError("environment map value at float index " + std::to_string(i) +
                                 " is negative or not finite");
        }
    }
}

EnvironmentMap::EnvironmentMap(int width, int height, Rgb fill)
    : EnvironmentMap(Image3f(width, height, fill)) {}

LdrImage::LdrImage(Image3f image) : image_(std::move(image)) {
    const auto d = image_.data();
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (!(d[i] >= 0.f && d[i] <= 1.f)) {
            throw InvariantError("LDR value at float index " + std::to_string(i) +
                                 " is outside [0, 1]");
        }
    }
}

// ---------------------------------------------------------------------------

std::size_t Tensor::element_count(std::span<const std::uint64_t> dims) {
    if (dims.empty()) throw InvariantError("tensor needs at least one dimension");
    std::size_t count = 1;
    for (std::uint64_t d : dims) {
        if (d == 0) throw InvariantError("tensor extents must be positive");
        if (d > std::numeric_limits<std::size_t>::max() / count) {
            throw InvariantError("tensor extents overflow the address space");
        }
        count *= static_cast<std::size_t>(d);
    }
    return count;
}

Tensor::Tensor(std::vector<std::uint64_t> dims, std::vector<float> data)
    : dims_(std::move(dims)), data_(std::move(data)) {
    const std::size_t n = element_count(dims_);
    if (n != data_.size()) {
        throw InvariantError("tensor payload holds " + std::to_string(data_.size()) +
                             " values, dims imply " + std::to_string(n));
    }
    for (float v : data_) {
        if (!std::isfinite(v)) throw InvariantError("tensor values must be finite");
    }
}

Tensor::Tensor(std::vector<std::uint64_t> dims, float fill)
    : dims_(std::move(dims)), data_(element_count(dims_), fill) {
    if (!std::isfinite(fill)) throw InvariantError("tensor values must be finite");
}

namespace {

std::size_t latent_count(const LatentSeq::Dims& dims) {
    const std::uint64_t d[4] = {dims[0], dims[1], dims[2], dims[3]};
    return Tensor::element_count(d);
}

}  // namespace

LatentSeq::LatentSeq(Dims dims, std::vector<float> data) : dims_(dims), data_(std::move(data)) {
    if (data_.size() != latent_count(dims_)) {
        throw InvariantError("latent payload holds " + std::to_string(data_.size()) +
                             " values, dims imply " + std::to_string(latent_count(dims_)));
    }
    for (float v : data_) {
        if (!std::isfinite(v)) throw InvariantError("latent values must be finite");
    }
}

LatentSeq::LatentSeq(Dims dims, float fill) : dims_(dims), data_(latent_count(dims), fill) {
    if (!std::isfinite(fill)) throw InvariantError("latent values must be finite");
}

std::span<const float> LatentSeq::frame(std::size_t i) const {
    if (i >= frames()) {
        throw InvariantError("frame " + std::to_string(i) + " out of range for " +
                             std::to_string(frames()) + " frames");
    }
    return std::span<const float>(data_).subspan(i * frame_size(), frame_size());
}

Tensor LatentSeq::to_tensor() const {
    return Tensor({dims_[0], dims_[1], dims_[2], dims_[3]}, data_);
}

LatentSeq LatentSeq::from_tensor(const Tensor& t) {
    if (t.rank() != 4) {
        throw InvariantError("latent sequences are rank 4, tensor has rank " +
                             std::to_string(t.rank()));
    }
    const auto d = t.dims();
    return LatentSeq({static_cast<std::size_t>(d[0]), static_cast<std::size_t>(d[1]),
                      static_cast<std::size_t>(d[2]), static_cast<std::size_t>(d[3])},
                     std::vector<float>(t.data().begin(), t.data().end()));
}

}  // namespace envlight
