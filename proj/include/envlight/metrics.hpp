// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "envlight/image.hpp"
#include "envlight/tensor.hpp"

namespace envlight {

inline constexpr double kPsnrCap = 99.0;

/// 10 log10(peak^2 / MSE) over all channels, capped at 99 dB (MSE = 0 hits
/// the cap).
double psnr(const Image3f& a, const Image3f& b, double peak = 1.0);

/// Mean SSIM with an 11x11 Gaussian window (sigma 1.5), K1 = 0.01,
/// K2 = 0.03, dynamic range 1. Only windows fully inside the image count;
/// the result is the mean over the three channels. Both sides need at least
/// 11 pixels in each dimension.
double ssim(const Image3f& a, const Image3f& b);

/// 1 - (1/2N) * sum(1 - cos(src_i, gen_i)). Inputs are [N, D] tensors; rows
/// must be non-zero.
double material_consistency(const Tensor& src, const Tensor& gen);

struct Peak {
    Eigen::Vector3d direction;
    double luminance = 0.0;
    int u = 0;
    int v = 0;
};

/// Peaks sorted by luminance, descending.
using PeakSet = std::vector<Peak>;

inline constexpr double kDefaultNmsRadiusDeg = 10.0;

/// Rec. 709 luminance.
inline double luminance(Rgb c) noexcept {
    return 0.2126 * c.r + 0.7152 * c.g + 0.0722 * c.b;
}

/// Greedy non-maximum suppression over pixel luminance: take the brightest
/// remaining pixel (lowest index on ties), drop everything within
/// `nms_radius_deg` of it, repeat up to k times.
PeakSet extract_peaks(const EnvironmentMap& env, std::size_t k,
                      double nms_radius_deg = kDefaultNmsRadiusDeg);

/// Mean angle in degrees after greedy matching: ground-truth peaks, in order,
/// each claim the nearest unmatched predicted peak. At most k ground-truth
/// peaks take part.
double angular_error(const PeakSet& pred, const PeakSet& gt, std::size_t k);

struct Summary {
    double mean = 0.0;
    double median = 0.0;  // lower middle for even counts
    double std = 0.0;     // population
};

Summary summarize(const std::vector<double>& values);

struct MetricsReport {
    std::string metric;
    /// "per-frame" or "per-video".
    std::string unit;
    std::vector<double> values;
    Summary summary;
    nlohmann::json parameters = nlohmann::json::object();

    nlohmann::json to_json() const;
    std::string to_csv() const;
};

/// Flat aggregation of one list.
MetricsReport aggregate(const std::string& metric, const std::vector<double>& values);

/// Table-style aggregation across videos: mean and median over all pooled
/// frame values, std as the mean of per-video population stds. `values`
/// holds the pooled per-frame list.
MetricsReport aggregate_videos(const std::string& metric,
                               const std::vector<std::vector<double>>& per_video);

}  // namespace envlight
