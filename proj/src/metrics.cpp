// SPDX-License-Identifier: Apache-2.0

#include "envlight/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <string>

#include "envlight/error.hpp"
#include "envlight/panorama.hpp"

namespace envlight {

namespace {

void require_same_size(const Image3f& a, const Image3f& b, const char* metric) {
    if (a.width() != b.width() || a.height() != b.height()) {
        throw InvariantError(std::string(metric) + ": image sizes differ (" +
                             std::to_string(a.width()) + "x" + std::to_string(a.height()) +
                             " vs " + std::to_string(b.width()) + "x" +
                             std::to_string(b.height()) + ")");
    }
}

constexpr int kSsimRadius = 5;
constexpr double kSsimSigma = 1.5;
constexpr double kSsimC1 = 0.01 * 0.01;
constexpr double kSsimC2 = 0.03 * 0.03;

std::array<double, 2 * kSsimRadius + 1> gaussian_taps() {
    std::array<double, 2 * kSsimRadius + 1> g{};
    double sum = 0.0;
    for (int i = -kSsimRadius; i <= kSsimRadius; ++i) {
        g[i + kSsimRadius] = std::exp(-(i * i) / (2.0 * kSsimSigma * kSsimSigma));
        sum += g[i + kSsimRadius];
    }
    for (double& v : g) v /= sum;
    return g;
}

// Separable Gaussian over the windows that fit entirely inside the image.
std::vector<double> filter_valid(const std::vector<double>& src, int w, int h) {
    static const auto taps = gaussian_taps();
    const int ow = w - 2 * kSsimRadius, oh = h - 2 * kSsimRadius;
    std::vector<double> tmp(static_cast<std::size_t>(ow) * h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < ow; ++x) {
            double s = 0.0;
            for (int k = 0; k < 2 * kSsimRadius + 1; ++k) s += taps[k] * src[y * w + x + k];
            tmp[y * ow + x] = s;
        }
    }
    std::vector<double> out(static_cast<std::size_t>(ow) * oh);
    for (int y = 0; y < oh; ++y) {
        for (int x = 0; x < ow; ++x) {
            double s = 0.0;
            for (int k = 0; k < 2 * kSsimRadius + 1; ++k) s += taps[k] * tmp[(y + k) * ow + x];
            out[y * ow + x] = s;
        }
    }
    return out;
}

}  // namespace

double psnr(const Image3f& a, const Image3f& b, double peak) {
    require_same_size(a, b, "psnr");
    if (!(peak > 0.0)) throw InvariantError("psnr peak must be positive");
    const auto x = a.data(), y = b.data();
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = static_cast<double>(x[i]) - y[i];
        sum += d * d;
    }
    const double mse = sum / static_cast<double>(x.size());
    if (mse == 0.0) return kPsnrCap;
    return std::min(kPsnrCap, 10.0 * std::log10(peak * peak / mse));
}

double ssim(const Image3f& a, const Image3f& b) {
    require_same_size(a, b, "ssim");
    const int w = a.width(), h = a.height();
    if (w < 2 * kSsimRadius + 1 || h < 2 * kSsimRadius + 1) {
        throw InvariantError("ssim needs images of at least 11x11 pixels");
    }
    const std::size_t n = a.pixel_count();
    double total = 0.0;
    for (int c = 0; c < 3; ++c) {
        std::vector<double> x(n), y(n), xx(n), yy(n), xy(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = a.data()[i * 3 + c];
            y[i] = b.data()[i * 3 + c];
            xx[i] = x[i] * x[i];
            yy[i] = y[i] * y[i];
            xy[i] = x[i] * y[i];
        }
        const auto mx = filter_valid(x, w, h), my = filter_valid(y, w, h);
        const auto mxx = filter_valid(xx, w, h), myy = filter_valid(yy, w, h);
        const auto mxy = filter_valid(xy, w, h);
        double sum = 0.0;
        for (std::size_t i = 0; i < mx.size(); ++i) {
            const double vx = mxx[i] - mx[i] * mx[i];
            const double vy = myy[i] - my[i] * my[i];
            const double cov = mxy[i] - mx[i] * my[i];
            sum += ((2 * mx[i] * my[i] + kSsimC1) * (2 * cov + kSsimC2)) /
                   ((mx[i] * mx[i] + my[i] * my[i] + kSsimC1) * (vx + vy + kSsimC2));
        }
        total += sum / static_cast<double>(mx.size());
    }
    return total / 3.0;
}

double material_consistency(const Tensor& src, const Tensor& gen) {
    if (src.rank() != 2 || gen.rank() != 2) {
        throw InvariantError("feature tensors must be rank 2 [N, D]");
    }
    if (src.dims()[0] != gen.dims()[0] || src.dims()[1] != gen.dims()[1]) {
        throw InvariantError("feature tensors differ in shape");
    }
    const std::size_t n = src.dims()[0], d = src.dims()[1];
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double dot = 0.0, na = 0.0, nb = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            const double p = src.data()[i * d + j], q = gen.data()[i * d + j];
            dot += p * q;
            na += p * p;
            nb += q * q;
        }
        if (na == 0.0 || nb == 0.0) {
            throw InvariantError("feature row " + std::to_string(i) + " is a zero vector");
        }
        const double cos = std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
        sum += 1.0 - cos;
    }
    return 1.0 - sum / (2.0 * static_cast<double>(n));
}

PeakSet extract_peaks(const EnvironmentMap& env, std::size_t k, double nms_radius_deg) {
    if (k < 1) throw InvariantError("peak extraction needs k >= 1");
    if (!(nms_radius_deg >= 0.0)) throw InvariantError("NMS radius must be non-negative");
    const int w = env.width(), h = env.height();
    const std::size_t n = env.image().pixel_count();
    std::vector<double> lum(n);
    std::vector<Eigen::Vector3d> dirs(n);
    for (int v = 0; v < h; ++v) {
        for (int u = 0; u < w; ++u) {
            const std::size_t i = static_cast<std::size_t>(v) * w + u;
            lum[i] = luminance(env.at(u, v));
            dirs[i] = pixel_direction(u, v, w, h);
        }
    }
    std::vector<bool> suppressed(n, false);
    const double cos_radius = std::cos(deg_to_rad(nms_radius_deg));

    PeakSet peaks;
    while (peaks.size() < k) {
        std::size_t best = n;
        for (std::size_t i = 0; i < n; ++i) {
            if (!suppressed[i] && (best == n || lum[i] > lum[best])) best = i;
        }
        if (best == n) break;
        peaks.push_back({dirs[best], lum[best], static_cast<int>(best % w),
                         static_cast<int>(best / w)});
        for (std::size_t i = 0; i < n; ++i) {
            if (!suppressed[i] && dirs[i].dot(dirs[best]) >= cos_radius) suppressed[i] = true;
        }
    }
    return peaks;
}

double angular_error(const PeakSet& pred, const PeakSet& gt, std::size_t k) {
    if (pred.empty() || gt.empty()) throw InvariantError("angular error needs non-empty peak sets");
    if (k < 1) throw InvariantError("angular error needs k >= 1");
    std::vector<bool> used(pred.size(), false);
    double sum = 0.0;
    std::size_t matched = 0;
    for (std::size_t g = 0; g < std::min(k, gt.size()); ++g) {
        std::size_t best = pred.size();
        double best_angle = 0.0;
        for (std::size_t p = 0; p < pred.size(); ++p) {
            if (used[p]) continue;
            const double a = angle_between(gt[g].direction, pred[p].direction);
            if (best == pred.size() || a < best_angle) {
                best = p;
                best_angle = a;
            }
        }
        if (best == pred.size()) break;
        used[best] = true;
        sum += best_angle;
        ++matched;
    }
    return rad_to_deg(sum / static_cast<double>(matched));
}

Summary summarize(const std::vector<double>& values) {
    if (values.empty()) throw InvariantError("cannot summarize an empty list");
    Summary s;
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());
    double sq = 0.0;
    for (double v : values) sq += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(sq / static_cast<double>(values.size()));
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    s.median = sorted[(sorted.size() - 1) / 2];
    return s;
}

MetricsReport aggregate(const std::string& metric, const std::vector<double>& values) {
    MetricsReport r;
    r.metric = metric;
    r.unit = "per-frame";
    r.values = values;
    r.summary = summarize(values);
    return r;
}

MetricsReport aggregate_videos(const std::string& metric,
                               const std::vector<std::vector<double>>& per_video) {
    if (per_video.empty()) throw InvariantError("cannot aggregate zero videos");
    MetricsReport r;
    r.metric = metric;
    r.unit = "per-video";
    nlohmann::json videos = nlohmann::json::array();
    double std_sum = 0.0;
    for (const auto& v : per_video) {
        const Summary s = summarize(v);
        std_sum += s.std;
        videos.push_back({{"frames", v.size()}, {"mean", s.mean}, {"median", s.median}, {"std", s.std}});
        r.values.insert(r.values.end(), v.begin(), v.end());
    }
    r.summary = summarize(r.values);
    r.summary.std = std_sum / static_cast<double>(per_video.size());
    r.parameters["videos"] = std::move(videos);
    r.parameters["std_rule"] = "mean of per-video population std";
    return r;
}

nlohmann::json MetricsReport::to_json() const {
    return {{"metric", metric},
            {"unit", unit},
            {"values", values},
            {"summary", {{"mean", summary.mean}, {"median", summary.median}, {"std", summary.std}}},
            {"parameters", parameters}};
}

std::string MetricsReport::to_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "metric,unit,index,value\n";
    for (std::size_t i = 0; i < values.size(); ++i) {
        os << metric << ',' << unit << ',' << i << ',' << values[i] << '\n';
    }
    os << metric << ',' << unit << ",mean," << summary.mean << '\n';
    os << metric << ',' << unit << ",median," << summary.median << '\n';
    os << metric << ',' << unit << ",std," << summary.std << '\n';
    return os.str();
}

}  // namespace envlight
