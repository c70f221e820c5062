// SPDX-License-Identifier: Apache-2.0

#include "envlight/selfcheck.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

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

namespace envlight {

namespace {

using Check = std::function<CheckResult(std::uint64_t)>;

CheckResult at_most(std::string name, double value, double threshold) {
    return {std::move(name), value <= threshold, value, threshold, "value <= threshold"};
}

CheckResult at_least(std::string name, double value, double threshold) {
    return {std::move(name), value >= threshold, value, threshold, "value >= threshold"};
}

CheckResult holds(std::string name, bool ok) {
    return {std::move(name), ok, ok ? 1.0 : 0.0, 1.0, "boolean"};
}

CheckResult log_roundtrip(std::uint64_t seed) {
    SplitMix rng(hash_draw(seed, 1));
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const double e = rng.uniform(0.0, kDefaultLogNormalization);
        const double back = decode_log_value(encode_log_value(e, 60000.0), 60000.0);
        if (e > 0.0) worst = std::max(worst, std::abs(back - e) / e);
    }
    return at_most("log_roundtrip_max_rel_error", worst, 1e-5);
}

CheckResult hdr_fixed_point(std::uint64_t seed) {
    const EnvironmentMap env = smooth_env(64, 32, hash_draw(seed, 2));
    const auto first = encode_hdr(env.image());
    const Image3f decoded = parse_hdr(first);
    const auto second = encode_hdr(decoded);
    return holds("hdr_requantization_fixed_point",
                 first == second && parse_hdr(second) == decoded);
}

CheckResult tensor_roundtrip(std::uint64_t seed) {
    const LatentSeq z = random_latents({3, 4, 5, 2}, hash_draw(seed, 3));
    return holds("tensor_roundtrip_bit_exact",
                 LatentSeq::from_tensor(parse_tensor(encode_tensor(z.to_tensor()))) == z);
}

CheckResult warp_identity(std::uint64_t seed) {
    const EnvironmentMap env = smooth_env(128, 64, hash_draw(seed, 4));
    return holds("warp_identity_bit_exact", warp_env(env, Rotation::identity()) == env);
}

CheckResult warp_integer_yaw(std::uint64_t seed) {
    const EnvironmentMap env = smooth_env(128, 64, hash_draw(seed, 5));
    const int k = 1 + static_cast<int>(to_range(hash_draw(seed, 6), 127));
    const EnvironmentMap out = warp_env(env, Rotation::yaw(2.0 * kPi * k / env.width()));
    bool ok = true;
    for (int v = 0; v < env.height() && ok; ++v) {
        for (int u = 0; u < env.width() && ok; ++u) {
            ok = out.at(u, v) == env.at(((u - k) % env.width() + env.width()) % env.width(), v);
        }
    }
    return holds("warp_integer_yaw_is_column_roll", ok);
}

Rotation random_rotation(std::uint64_t seed, std::uint64_t counter) {
    const double angle = to_unit(hash_draw(seed, counter, 0xA9)) * kPi;
    return Rotation::about_axis(random_unit_vector(seed, counter), angle);
}

CheckResult warp_inverse(std::uint64_t seed) {
    const EnvironmentMap env = smooth_env(256, 128, hash_draw(seed, 7));
    const Rotation r = random_rotation(seed, 8);
    const EnvironmentMap back = warp_env(warp_env(env, r), r.transposed());
    return at_least("warp_inverse_psnr_db",
                    psnr(tonemap_reinhard(env.image()), tonemap_reinhard(back.image())), 40.0);
}

CheckResult warp_composition(std::uint64_t seed) {
    const EnvironmentMap env = smooth_env(256, 128, hash_draw(seed, 9));
    const Rotation r1 = random_rotation(seed, 10), r2 = random_rotation(seed, 11);
    const EnvironmentMap chained = warp_env(warp_env(env, r1), r2);
    const EnvironmentMap direct = warp_env(env, r1 * r2);
    return at_least("warp_composition_psnr_db",
                    psnr(tonemap_reinhard(chained.image()), tonemap_reinhard(direct.image())),
                    40.0);
}

CheckResult radiance_conservation(std::uint64_t seed) {
    const EnvironmentMap env = smooth_env(256, 128, hash_draw(seed, 12));
    const auto before = total_radiance(env);
    const auto after = total_radiance(warp_env(env, random_rotation(seed, 13)));
    double worst = 0.0;
    for (int c = 0; c < 3; ++c) worst = std::max(worst, std::abs(after[c] / before[c] - 1.0));
    return at_most("warp_radiance_rel_change", worst, 0.01);
}

CheckResult white_furnace(std::uint64_t) {
    const EnvironmentMap env(64, 32, {1.f, 1.f, 1.f});
    SphereRenderConfig cfg;
    cfg.image_size = 32;
    cfg.mode = SphereMode::Diffuse;
    const SphereRender r = render_sphere(env, cfg);
    double worst = 0.0;
    for (int j = 0; j < cfg.image_size; ++j) {
        for (int i = 0; i < cfg.image_size; ++i) {
            if (!r.mask[static_cast<std::size_t>(j) * cfg.image_size + i]) continue;
            const Rgb c = r.radiance.at(i, j);
            for (float v : {c.r, c.g, c.b}) worst = std::max(worst, std::abs(v - 1.0));
        }
    }
    return at_most("white_furnace_rel_error", worst, 0.01);
}

CheckResult mirror_alignment(std::uint64_t seed) {
    const EnvironmentMap env = smooth_env(256, 128, hash_draw(seed, 14));
    const Rotation r = random_rotation(seed, 15);
    SphereRenderConfig fixed;
    fixed.image_size = 96;
    SphereRenderConfig moved = fixed;
    moved.camera = r;
    const auto a = render_sphere(warp_env(env, r), fixed);
    const auto b = render_sphere(env, moved);
    return at_least("mirror_alignment_psnr_db",
                    psnr(tonemap_reinhard(a.radiance), tonemap_reinhard(b.radiance)), 35.0);
}

CheckResult interp_endpoints(std::uint64_t seed) {
    const LatentSeq a = random_latents({2, 3, 3, 4}, hash_draw(seed, 16));
    const LatentSeq b = random_latents({2, 3, 3, 4}, hash_draw(seed, 17));
    const LatentSeq far = interpolate_latents(a, b, 1e9);
    double worst = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) {
        worst = std::max(worst, static_cast<double>(std::abs(far.data()[i] - b.data()[i])));
    }
    return holds("interpolation_endpoints",
                 interpolate_latents(a, b, 0.0) == a && worst <= 1e-6);
}

CheckResult assemble_layout(std::uint64_t seed) {
    const std::size_t n = 57;
    const LatentSeq::Dims d{n, 2, 2, 2};
    // Values on a 1/64 grid keep the z_nr + c_E round trip exact.
    auto grid = [&](std::uint64_t s) {
        LatentSeq z = random_latents(d, hash_draw(seed, s));
        for (float& v : z.mutable_data()) v = std::round(v * 64.f) / 64.f;
        return z;
    };
    LatentSeq ref = grid(18);
    ref = LatentSeq({1, 2, 2, 2}, std::vector<float>(ref.frame(0).begin(), ref.frame(0).end()));
    const LatentSeq t = grid(19), e = grid(20), adm = grid(21), nr = grid(22), c = grid(23);
    const ConditionSequence seq = assemble_sequence(ref, t, e, adm, nr, c);
    const auto parts = disassemble_sequence(seq, c);
    return holds("assemble_layout_229_frames_and_inverse",
                 seq.data.frames() == 1 + 4 * n && parts.reference == ref && parts.target == t &&
                     parts.env_log == e && parts.adm == adm && parts.nr == nr);
}

CheckResult sic_involution(std::uint64_t) {
    bool ok = true;
    for (std::size_t n : {1u, 9u, 57u}) {
        std::vector<Image3f> video(n, Image3f(4, 2));
        for (std::size_t i = 0; i < n; ++i) video[i].set(0, 0, {static_cast<float>(i), 0.f, 0.f});
        const SicPair p = build_sic_pair(n, video);
        for (std::size_t i = 0; i < n; ++i) ok = ok && p.correspondence[p.correspondence[i]] == i;
        ok = ok && p.condition == video[n - 1];
    }
    return holds("sic_correspondence_involution", ok);
}

CheckResult stream_plan(std::uint64_t) {
    const ClipPlan p = plan_clips(169);
    const bool ok = p.clips.size() == 3 && p.clips[1].start == 56 && p.clips[2].start == 112 &&
                    p.clips[2].end() == 169 && p.clips[1].condition->frame == 56 &&
                    p.clips[2].condition->frame == 112;
    const ClipPlan tail = plan_clips(100);
    return holds("stream_plan_169_and_tail",
                 ok && tail.clips.size() == 2 && tail.clips[1].start == 51 &&
                     tail.clips[1].length == 49);
}

CheckResult mc_identities(std::uint64_t) {
    const Tensor x({2, 2}, {1.f, 0.f, 0.f, 1.f});
    const Tensor orth({2, 2}, {0.f, 1.f, 1.f, 0.f});
    const Tensor anti({2, 2}, {-1.f, 0.f, 0.f, -1.f});
    return holds("material_consistency_identities",
                 material_consistency(x, x) == 1.0 && material_consistency(x, orth) == 0.5 &&
                     material_consistency(x, anti) == 0.0);
}

CheckResult peak_tracking(std::uint64_t seed) {
    const Eigen::Vector3d sun = random_unit_vector(seed, 24);
    const EnvironmentMap env = add_sun(smooth_env(256, 128, hash_draw(seed, 25)), sun, 3.0, 500.f);
    const CameraTrajectory traj =
        gen_trajectory(MotionPattern::CameraRotationFixedLight, 9, hash_draw(seed, 26), 4.0);
    const auto video = make_environment_video(env, traj);
    std::vector<double> errors;
    for (std::size_t i = 0; i < video.size(); ++i) {
        const Eigen::Vector3d expected = traj.relative_rotation(i).transposed().apply(sun);
        const PeakSet peaks = extract_peaks(video[i], 1);
        errors.push_back(rad_to_deg(angle_between(peaks.front().direction, expected)));
    }
    return at_most("peak_tracking_median_deg", summarize(errors).median, 1.5);
}

}  // namespace

std::vector<CheckResult> run_selfcheck(std::uint64_t seed) {
    const std::vector<Check> checks = {
        log_roundtrip,    hdr_fixed_point,  tensor_roundtrip,      warp_identity,
        warp_integer_yaw, warp_inverse,     warp_composition,      radiance_conservation,
        white_furnace,    mirror_alignment, interp_endpoints,      assemble_layout,
        sic_involution,   stream_plan,      mc_identities,         peak_tracking,
    };
    std::vector<CheckResult> results;
    for (const Check& check : checks) {
        try {
            results.push_back(check(seed));
        } catch (const std::exception& e) {
            results.push_back({"exception", false, 0.0, 0.0, e.what()});
        }
    }
    return results;
}

nlohmann::json selfcheck_manifest(const std::vector<CheckResult>& results, std::uint64_t seed) {
    nlohmann::json checks = nlohmann::json::array();
    bool all = true;
    for (const CheckResult& r : results) {
        all = all && r.passed;
        checks.push_back({{"name", r.name},
                          {"passed", r.passed},
                          {"value", r.value},
                          {"threshold", r.threshold},
                          {"rule", r.detail}});
    }
    return {{"seed", seed}, {"passed", all}, {"checks", std::move(checks)}};
}

}  // namespace envlight
