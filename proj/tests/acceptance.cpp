// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Each criterion also has a wall-clock budget.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "envlight/env_warp.hpp"
#include "envlight/error.hpp"
#include "envlight/hdr_io.hpp"
#include "envlight/light_encodings.hpp"
#include "envlight/metrics.hpp"
#include "envlight/panorama.hpp"
#include "envlight/relight_math.hpp"
#include "envlight/rng.hpp"
#include "envlight/sphere_oracle.hpp"
#include "envlight/stream_scheduler.hpp"
#include "envlight/synthetic.hpp"
#include "test_util.hpp"

using namespace envlight;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool passed = false;
    std::string detail;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

Rotation random_rotation(std::uint64_t seed) {
    return Rotation::about_axis(random_unit_vector(seed, 0),
                                to_unit(hash_draw(seed, 1)) * 2.0 * kPi - kPi);
}

double tonemapped_psnr(const Image3f& a, const Image3f& b) {
    return psnr(tonemap_reinhard(a), tonemap_reinhard(b));
}

bool bit_equal(const LatentSeq& a, const LatentSeq& b) {
    return a.dims() == b.dims() &&
           std::memcmp(a.data().data(), b.data().data(), a.size() * sizeof(float)) == 0;
}

// --- 1 ---------------------------------------------------------------------

Outcome log_round_trip() {
    Image3f img(2, 1);
    img.set(0, 0, {0.f, 60000.f, 0.f});
    const Image3f ends = encode_log(EnvironmentMap(img));
    const EnvironmentMap ends_back = decode_log(ends);
    const bool endpoints = std::abs(ends.at(0, 0).r) <= 1e-9 &&
                           std::abs(ends.at(0, 0).g - 1.0) <= 1e-9 &&
                           std::abs(ends_back.at(0, 0).r) <= 1e-9;

    // 1000 values as a 2:1 map (1024 slots, the rest mid-range).
    SplitMix rng(2024);
    Image3f vals(32, 16);
    auto d = vals.data();
    for (std::size_t i = 0; i < 1000; ++i) d[i] = static_cast<float>(rng.uniform(0.0, 60000.0));
    for (std::size_t i = 1000; i < d.size(); ++i) d[i] = 1.f;
    const EnvironmentMap env(vals);
    const EnvironmentMap back = decode_log(encode_log(env));
    double worst = 0.0;
    for (std::size_t i = 0; i < 1000; ++i) {
        const double e = env.data()[i];
        if (e > 0) worst = std::max(worst, std::abs(back.data()[i] - e) / e);
    }
    return {endpoints && worst < 1e-5,
            "max rel err " + fmt("%.3g", worst) + (endpoints ? ", endpoints exact" : ", endpoints off")};
}

// --- 2 ---------------------------------------------------------------------

Outcome hdr_parser() {
    testing::TempDir dir("accept_hdr");
    std::vector<fs::path> corpus;
    const int sizes[][2] = {{2, 1}, {8, 4}, {16, 8}, {30, 15}, {64, 32}, {128, 64},
                            {200, 100}, {7, 3}, {512, 256}, {33, 17}, {96, 48}, {256, 128}};
    int idx = 0;
    for (const auto& s : sizes) {
        for (HdrEncoding enc : {HdrEncoding::Rle, HdrEncoding::Flat}) {
            Image3f img(s[0], s[1]);
            std::uint64_t c = 0;
            for (float& v : img.data()) {
                const double u = to_unit(hash_draw(idx, c++));
                v = u < 0.05 ? 0.f : static_cast<float>(std::pow(u, 6.0) * 5e4);
            }
            // Flat runs so the RLE path emits runs as well as literals.
            if (s[0] >= 16) {
                for (int x = 0; x < s[0] / 2; ++x) img.set(x, 0, {1.f, 2.f, 3.f});
            }
            const fs::path p = dir / ("c" + std::to_string(idx++) + ".hdr");
            write_hdr_image(img, p, enc);
            corpus.push_back(p);
        }
    }
    int round_trip_failures = 0;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const auto bytes = read_file(corpus[i]);
        const Image3f once = parse_hdr(bytes);
        const HdrEncoding enc = i % 2 == 0 ? HdrEncoding::Rle : HdrEncoding::Flat;
        const auto again = encode_hdr(once, enc);
        if (again != bytes || parse_hdr(again) != once) ++round_trip_failures;
    }

    int rejected = 0, accepted = 0, escaped = 0;
    SplitMix rng(77);
    for (int i = 0; i < 10000; ++i) {
        auto buf = read_file(corpus[rng.next() % 12]);  // small files keep fuzzing fast
        const int mode = static_cast<int>(rng.next() % 4);
        if (mode == 0) {
            buf.resize(rng.next() % buf.size());
        } else if (mode == 1) {
            for (int e = 0; e < 1 + static_cast<int>(rng.next() % 16); ++e) {
                buf[rng.next() % buf.size()] = static_cast<std::uint8_t>(rng.next());
            }
        } else if (mode == 2) {
            // Damage the header region specifically.
            const std::size_t n = std::min<std::size_t>(buf.size(), 80);
            buf[rng.next() % n] = static_cast<std::uint8_t>(rng.next());
        } else {
            std::vector<std::uint8_t> junk(rng.next() % 256);
            for (auto& b : junk) b = static_cast<std::uint8_t>(rng.next());
            buf = junk;
        }
        try {
            (void)parse_hdr(buf);
            ++accepted;
        } catch (const ParseError&) {
            ++rejected;
        } catch (...) {
            ++escaped;
        }
    }
    return {round_trip_failures == 0 && escaped == 0,
            std::to_string(corpus.size()) + " files, " + std::to_string(round_trip_failures) +
                " round-trip failures; fuzz: " + std::to_string(rejected) + " rejected, " +
                std::to_string(accepted) + " decoded, " + std::to_string(escaped) +
                " other exceptions"};
}

// --- 3 ---------------------------------------------------------------------

Outcome warp_oracle() {
    const EnvironmentMap env = smooth_env(512, 256, 31);
    const bool identity = warp_env(env, Rotation::identity()) == env;

    bool roll = true;
    for (int k : {1, 17, -40, 256}) {
        const EnvironmentMap w = warp_env(env, Rotation::yaw(2.0 * kPi * k / 512.0));
        for (int v = 0; v < 256 && roll; ++v) {
            for (int u = 0; u < 512; ++u) {
                if (!(w.at(u, v) == env.at(((u - k) % 512 + 512) % 512, v))) {
                    roll = false;
                    break;
                }
            }
        }
    }
    const Rotation a = random_rotation(5), b = random_rotation(6);
    const double inverse = tonemapped_psnr(warp_env(warp_env(env, a), a.transposed()).image(), env.image());
    const double compose =
        tonemapped_psnr(warp_env(warp_env(env, a), b).image(), warp_env(env, a * b).image());
    return {identity && roll && inverse > 40.0 && compose > 40.0,
            std::string("identity ") + (identity ? "exact" : "DIFFERS") + ", roll " +
                (roll ? "exact" : "DIFFERS") + ", inverse " + fmt("%.1f dB", inverse) +
                ", composition " + fmt("%.1f dB", compose)};
}

// --- 4 ---------------------------------------------------------------------

Outcome alignment() {
    const EnvironmentMap env = smooth_env(512, 256, 41);
    double worst = 1e9;
    for (std::uint64_t s = 0; s < 10; ++s) {
        const Rotation r = random_rotation(1000 + s);
        SphereRenderConfig fixed;
        fixed.image_size = 256;
        SphereRenderConfig moved = fixed;
        moved.camera = r;
        const SphereRender a = render_sphere(warp_env(env, r), fixed);
        const SphereRender b = render_sphere(env, moved);
        worst = std::min(worst, tonemapped_psnr(a.radiance, b.radiance));
    }
    return {worst > 35.0, "worst of 10 rotations " + fmt("%.1f dB", worst)};
}

// --- 5 ---------------------------------------------------------------------

Outcome white_furnace() {
    SphereRenderConfig cfg;
    cfg.mode = SphereMode::Diffuse;
    cfg.image_size = 128;
    const SphereRender r = render_sphere(EnvironmentMap(64, 32, {1.f, 1.f, 1.f}), cfg);
    double worst = 0.0;
    for (int y = 0; y < cfg.image_size; ++y) {
        for (int x = 0; x < cfg.image_size; ++x) {
            if (!r.mask[static_cast<std::size_t>(y) * cfg.image_size + x]) continue;
            const Rgb c = r.radiance.at(x, y);
            worst = std::max({worst, std::abs(c.r - 1.0), std::abs(c.g - 1.0), std::abs(c.b - 1.0)});
        }
    }
    return {worst < 0.01, "max deviation " + fmt("%.2e", worst)};
}

// --- 6 ---------------------------------------------------------------------

Outcome peak_tracking() {
    const Eigen::Vector3d sun = Eigen::Vector3d(0.4, 0.6, -0.7).normalized();
    const EnvironmentMap env = add_sun(smooth_env(256, 128, 61), sun, 3.0, 2000.f);
    const CameraTrajectory traj =
        gen_trajectory(MotionPattern::CameraRotationFixedLight, 57, 61, 3.0);
    const auto video = make_environment_video(env, traj);

    std::vector<double> errors, baseline;
    for (std::size_t i = 0; i < video.size(); ++i) {
        // Frame i shows env0(M_i d), so the sun sits at M_i^T sun.
        const Eigen::Vector3d truth = traj.relative_rotation(i).transposed().apply(sun);
        const PeakSet p = extract_peaks(video[i], 1);
        errors.push_back(rad_to_deg(angle_between(p.front().direction, truth)));
        baseline.push_back(rad_to_deg(angle_between(random_unit_vector(6161, i), truth)));
    }
    const Summary s = summarize(errors), b = summarize(baseline);
    return {s.median < 1.5, "median " + fmt("%.3f deg", s.median) + ", mean " +
                                fmt("%.3f deg", s.mean) + " (random baseline median " +
                                fmt("%.1f deg)", b.median)};
}

// --- 7 ---------------------------------------------------------------------

Outcome interpolation() {
    const LatentSeq a = random_latents({4, 8, 8, 4}, 71), b = random_latents({4, 8, 8, 4}, 72);
    const bool w0 = bit_equal(interpolate_latents(a, b, 0.0), a);
    const LatentSeq far = interpolate_latents(a, b, 1e9);
    double far_err = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        far_err = std::max(far_err, std::abs(double(far.data()[i]) - b.data()[i]));
    }
    int violations = 0;
    SplitMix rng(7);
    for (std::uint64_t t = 0; t < 100; ++t) {
        const LatentSeq x = random_latents({2, 4, 4, 4}, 700 + 2 * t, -50.f, 50.f);
        const LatentSeq y = random_latents({2, 4, 4, 4}, 701 + 2 * t, -50.f, 50.f);
        const double w = rng.uniform(0.0, 100.0);
        const LatentSeq z = interpolate_latents(x, y, w);
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double lo = std::min(x.data()[i], y.data()[i]);
            const double hi = std::max(x.data()[i], y.data()[i]);
            // One float rounding of slack at the magnitude of the inputs.
            const double eps = 1e-6 * std::max(std::abs(lo), std::abs(hi));
            if (z.data()[i] < lo - eps || z.data()[i] > hi + eps) ++violations;
        }
    }
    return {w0 && far_err < 1e-6 && violations == 0,
            std::string("w=0 ") + (w0 ? "exact" : "DIFFERS") + ", w=1e9 max err " +
                fmt("%.2e", far_err) + ", convexity violations " + std::to_string(violations)};
}

// --- 8 ---------------------------------------------------------------------

Outcome layout() {
    // Values on a 1/64 grid, where adding and subtracting c_E is exact.
    auto grid = [](LatentSeq::Dims d, std::uint64_t seed) {
        LatentSeq z(d);
        std::uint64_t i = 0;
        for (float& v : z.mutable_data()) {
            v = static_cast<float>(static_cast<int>(to_range(hash_draw(seed, i++), 1024)) - 512) / 64.f;
        }
        return z;
    };
    const LatentSeq::Dims d{57, 4, 6, 4};
    const LatentSeq ref = grid({1, 4, 6, 4}, 1), zt = grid(d, 2), el = grid(d, 3), adm = grid(d, 4),
                    nr = grid(d, 5), ce = grid(d, 6);
    const ConditionSequence seq = assemble_sequence(ref, zt, el, adm, nr, ce);
    const DisassembledSequence back = disassemble_sequence(seq, ce);
    const bool exact = bit_equal(back.reference, ref) && bit_equal(back.target, zt) &&
                       bit_equal(back.env_log, el) && bit_equal(back.adm, adm) &&
                       bit_equal(back.nr, nr);
    return {seq.data.frames() == 229 && exact,
            std::to_string(seq.data.frames()) + " frames, recovery " + (exact ? "exact" : "DIFFERS")};
}

// --- 9 ---------------------------------------------------------------------

Outcome sic_involution() {
    bool ok = true;
    for (std::size_t n : {1u, 9u, 57u}) {
        std::vector<Image3f> video;
        for (std::size_t i = 0; i < n; ++i) video.emplace_back(2, 1, Rgb{float(i), 0.f, 0.f});
        const SicPair p = build_sic_pair(n, video);
        for (std::size_t i = 0; i < n; ++i) ok = ok && p.correspondence[p.correspondence[i]] == i;
        // 0-based index n-1 is the n-th (last) frame.
        ok = ok && p.condition_frame == n - 1 && p.condition == video.back();
    }
    return {ok, "n in {1, 9, 57}, conditioned on the last frame"};
}

// --- 10 --------------------------------------------------------------------

Outcome stream_plan() {
    const ClipPlan a = plan_clips(169);
    const bool three = a.clips.size() == 3 && a.clips[0] == Clip{0, 57, std::nullopt} &&
                       a.clips[1] == Clip{56, 57, ConditionSource{0, 56}} &&
                       a.clips[2] == Clip{112, 57, ConditionSource{1, 112}};
    const ClipPlan b = plan_clips(100);
    const bool tail = b.clips.size() == 2 && b.clips[1].start == 51 && b.clips[1].length == 49;
    bool lengths = true;
    for (std::size_t total = 9; total <= 600; ++total) {
        for (const Clip& c : plan_clips(total).clips) lengths = lengths && is_valid_clip_length(c.length);
    }
    return {three && tail && lengths,
            std::string("169 ") + (three ? "ok" : "WRONG") + ", 100 tail " +
                std::to_string(b.clips.back().start) + "+" + std::to_string(b.clips.back().length) +
                ", 8n+1 lengths " + (lengths ? "ok" : "WRONG")};
}

// --- 11 --------------------------------------------------------------------

Outcome metrics() {
    const Tensor src({2, 3}, std::vector<float>{1, 0, 0, 0, 1, 0});
    const Tensor orth({2, 3}, std::vector<float>{0, 1, 0, 0, 0, 1});
    const Tensor anti({2, 3}, std::vector<float>{-1, 0, 0, 0, -1, 0});
    const double mc1 = material_consistency(src, src), mc5 = material_consistency(src, orth),
                 mc0 = material_consistency(src, anti);
    const double p = psnr(Image3f(8, 8), Image3f(8, 8, Rgb{0.1f, 0.1f, 0.1f}));
    const Image3f img = tonemap_reinhard(smooth_env(64, 32, 11).image());
    const double s = ssim(img, img);
    const double agg = aggregate_videos("x", {{0, 8}, {10, 22}}).summary.std;
    const bool ok = std::abs(mc1 - 1) < 1e-12 && std::abs(mc5 - 0.5) < 1e-12 && std::abs(mc0) < 1e-12 &&
                    std::abs(p - 20.0) < 1e-4 && std::abs(s - 1.0) < 1e-12 && std::abs(agg - 5.0) < 1e-12;
    return {ok, "MC " + fmt("%.3f", mc1) + "/" + fmt("%.3f", mc5) + "/" + fmt("%.3f", mc0) + ", PSNR " +
                    fmt("%.4f dB", p) + ", SSIM " + fmt("%.6f", s) + ", std agg " + fmt("%.3f", agg)};
}

// --- 12 --------------------------------------------------------------------

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

Outcome determinism() {
    testing::TempDir dir("accept_det");
    const std::string cmd = std::string(ENVLIGHT_CLI_PATH) + " selfcheck --seed 12 --out-dir '" +
                            dir.path().string() + "' > /dev/null";
    const int first = std::system(cmd.c_str());
    const std::string a = slurp(dir / "selfcheck.json");
    fs::remove(dir / "selfcheck.json");
    const int second = std::system(cmd.c_str());
    const std::string b = slurp(dir / "selfcheck.json");
    const bool ran = WIFEXITED(first) && WEXITSTATUS(first) == 0 && WIFEXITED(second) &&
                     WEXITSTATUS(second) == 0;
    return {ran && !a.empty() && a == b,
            std::string(ran ? "both runs passed" : "selfcheck FAILED") + ", manifests " +
                (a == b && !a.empty() ? "byte-identical (" + std::to_string(a.size()) + " bytes)"
                                      : "DIFFER")};
}

struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "log round trip", 1, log_round_trip},
        {2, "HDR parser corpus and fuzz", 30, hdr_parser},
        {3, "warp oracle", 10, warp_oracle},
        {4, "geometry-illumination alignment", 60, alignment},
        {5, "white furnace", 5, white_furnace},
        {6, "peak light tracking", 60, peak_tracking},
        {7, "latent interpolation endpoints", 5, interpolation},
        {8, "conditioning sequence layout", 5, layout},
        {9, "SIC involution", 1, sic_involution},
        {10, "streaming plan", 1, stream_plan},
        {11, "metric identities", 5, metrics},
        {12, "selfcheck determinism", 120, determinism},
    };
    int failed = 0;
    const auto suite_start = std::chrono::steady_clock::now();
    for (const Criterion& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs < c.budget_s;
        const bool pass = o.passed && in_time;
        failed += !pass;
        std::printf("[%s] %2d %-34s %7.3fs  %s%s\n", pass ? "PASS" : "FAIL", c.id, c.name, secs,
                    o.detail.c_str(), in_time ? "" : " (over time budget)");
        std::fflush(stdout);
    }
    const double total =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - suite_start).count();
    std::printf("%d/%zu criteria passed in %.2fs\n", static_cast<int>(criteria.size()) - failed,
                criteria.size(), total);
    return failed == 0 && total < 120.0 ? 0 : 1;
}
