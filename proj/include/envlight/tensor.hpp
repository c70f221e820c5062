// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace envlight {

/// Dense row-major float tensor of arbitrary rank (>= 1). All extents are
/// positive and every value is finite.
class Tensor {
public:
    Tensor() = default;
    Tensor(std::vector<std::uint64_t> dims, std::vector<float> data);
    explicit Tensor(std::vector<std::uint64_t> dims, float fill = 0.f);

    std::span<const std::uint64_t> dims() const noexcept { return dims_; }
    std::size_t rank() const noexcept { return dims_.size(); }
    std::size_t size() const noexcept { return data_.size(); }
    std::span<const float> data() const noexcept { return data_; }

    /// Element count implied by `dims`, or InvariantError on empty dims, a
    /// zero extent, or size_t overflow.
    static std::size_t element_count(std::span<const std::uint64_t> dims);

    friend bool operator==(const Tensor&, const Tensor&) = default;

private:
    std::vector<std::uint64_t> dims_;
    std::vector<float> data_;
};

/// Rank-4 latent sequence [frames, height, width, channels], frame-major.
class LatentSeq {
public:
    using Dims = std::array<std::size_t, 4>;

    LatentSeq() = default;
    LatentSeq(Dims dims, std::vector<float> data);
    explicit LatentSeq(Dims dims, float fill = 0.f);

    const Dims& dims() const noexcept { return dims_; }
    std::size_t frames() const noexcept { return dims_[0]; }
    std::size_t frame_size() const noexcept { return dims_[1] * dims_[2] * dims_[3]; }
    std::size_t size() const noexcept { return data_.size(); }

    std::span<const float> data() const noexcept { return data_; }
    std::span<float> mutable_data() noexcept { return data_; }
    std::span<const float> frame(std::size_t i) const;

    /// True when both sequences have the same H, W, C (frame counts may differ).
    bool same_frame_shape(const LatentSeq& other) const noexcept {
        return dims_[1] == other.dims_[1] && dims_[2] == other.dims_[2] &&
               dims_[3] == other.dims_[3];
    }

    Tensor to_tensor() const;
    static LatentSeq from_tensor(const Tensor& t);

    friend bool operator==(const LatentSeq&, const LatentSeq&) = default;

private:
    Dims dims_{};
    std::vector<float> data_;
};

}  // namespace envlight
