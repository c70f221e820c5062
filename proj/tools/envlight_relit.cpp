// SPDX-License-Identifier: Apache-2.0
//
// envlight-relit: command-line front end for the environment-lighting
// toolkit. Every subcommand is deterministic given its flags and --seed.
//
// Exit codes: 0 ok, 2 usage, 3 parse/IO, 4 invariant violation. Errors are
// reported on stderr as a single JSON object.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "envlight/env_warp.hpp"
#include "envlight/error.hpp"
#include "envlight/hdr_io.hpp"
#include "envlight/light_encodings.hpp"
#include "envlight/metrics.hpp"
#include "envlight/relight_math.hpp"
#include "envlight/selfcheck.hpp"
#include "envlight/sphere_oracle.hpp"
#include "envlight/stream_scheduler.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace envlight;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitParse = 3;
constexpr int kExitInvariant = 4;

struct RunConfig {
    std::uint64_t seed = 0;
    double m = kDefaultLogNormalization;
    std::size_t clip_len = kDefaultClipLength;
    std::size_t overlap = kDefaultClipOverlap;
    double nms_radius_deg = kDefaultNmsRadiusDeg;
    std::string out_dir = ".";

    json to_json() const {
        return {{"seed", seed},         {"M", m},
                {"clip_len", clip_len}, {"overlap", overlap},
                {"nms_radius_deg", nms_radius_deg}, {"out_dir", out_dir}};
    }
};

void load_config_file(const std::string& path, RunConfig& cfg) {
    const auto bytes = read_file(path);
    json j;
    try {
        j = json::parse(bytes.begin(), bytes.end());
        cfg.seed = j.value("seed", cfg.seed);
        cfg.m = j.value("M", cfg.m);
        cfg.clip_len = j.value("clip_len", cfg.clip_len);
        cfg.overlap = j.value("overlap", cfg.overlap);
        cfg.nms_radius_deg = j.value("nms_radius_deg", cfg.nms_radius_deg);
        cfg.out_dir = j.value("out_dir", cfg.out_dir);
    } catch (const json::exception& e) {
        throw ParseError("malformed config " + path + ": " + e.what(), 0);
    }
}

fs::path out_path(const RunConfig& cfg, const std::string& name) {
    fs::create_directories(cfg.out_dir);
    return fs::path(cfg.out_dir) / name;
}

void write_text(const fs::path& path, const std::string& text) {
    write_file(path, std::span<const std::uint8_t>(
                         reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

std::string stem_of(const std::string& path) { return fs::path(path).stem().string(); }

/// Loads .hdr, .png or .eten ([H,W,3] or [1,H,W,3]) as an RGB float image.
Image3f load_image(const fs::path& path) {
    const std::string ext = path.extension().string();
    if (ext == ".hdr") return read_hdr_image(path);
    if (ext == ".png") return read_png(path).image();
    if (ext == ".eten") {
        const Tensor t = read_tensor(path);
        const auto d = t.dims();
        const bool rank3 = t.rank() == 3 && d[2] == 3;
        const bool rank4 = t.rank() == 4 && d[0] == 1 && d[3] == 3;
        if (!rank3 && !rank4) {
            throw InvariantError(path.string() + ": image tensors must be [H,W,3] or [1,H,W,3]");
        }
        const std::size_t h = rank3 ? d[0] : d[1], w = rank3 ? d[1] : d[2];
        return Image3f(static_cast<int>(w), static_cast<int>(h),
                       std::vector<float>(t.data().begin(), t.data().end()));
    }
    throw UsageError("unsupported image extension '" + ext + "' for " + path.string());
}

Tensor image_tensor(const Image3f& img) {
    return Tensor({1, static_cast<std::uint64_t>(img.height()),
                   static_cast<std::uint64_t>(img.width()), 3},
                  std::vector<float>(img.data().begin(), img.data().end()));
}

/// Files of a directory sorted by name, or the single file itself.
std::vector<fs::path> expand(const fs::path& p, const std::vector<std::string>& exts) {
    if (!fs::exists(p)) throw IoError("no such file or directory: " + p.string());
    if (!fs::is_directory(p)) return {p};
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(p)) {
        if (!e.is_regular_file()) continue;
        if (std::find(exts.begin(), exts.end(), e.path().extension().string()) != exts.end()) {
            out.push_back(e.path());
        }
    }
    std::sort(out.begin(), out.end());
    if (out.empty()) throw IoError("no matching files in " + p.string());
    return out;
}

std::string frame_name(std::size_t i, const std::string& ext) {
    std::ostringstream os;
    os << "frame_" << std::setw(4) << std::setfill('0') << i << ext;
    return os.str();
}

void write_report(const RunConfig& cfg, const std::string& stem, MetricsReport report) {
    report.parameters["config"] = cfg.to_json();
    write_json(out_path(cfg, stem + ".json"), report.to_json());
    write_text(out_path(cfg, stem + ".csv"), report.to_csv());
    std::printf("%s: mean %.6g median %.6g std %.6g over %zu values\n", report.metric.c_str(),
                report.summary.mean, report.summary.median, report.summary.std,
                report.values.size());
}

// --- subcommands -----------------------------------------------------------

void cmd_encode(const RunConfig& cfg, const std::string& input) {
    const EnvironmentMap env = read_hdr(input);
    const LightBundle b = encode_bundle(env, cfg.m);
    const std::string stem = stem_of(input);
    write_png_ldr(b.ldr, out_path(cfg, stem + ".ldr.png"));
    write_tensor(image_tensor(b.log), out_path(cfg, stem + ".log.eten"));
    write_png_ldr(b.dir, out_path(cfg, stem + ".dir.png"));
    const std::size_t overflow = count_log_overflow(b.log);
    if (overflow > 0) {
        std::fprintf(stderr, "warning: %zu log values exceed 1 (radiance above M = %g)\n",
                     overflow, cfg.m);
    }
    write_json(out_path(cfg, stem + ".bundle.json"),
               {{"input", input},
                {"width", env.width()},
                {"height", env.height()},
                {"files",
                 {{"ldr", stem + ".ldr.png"}, {"log", stem + ".log.eten"}, {"dir", stem + ".dir.png"}}},
                {"log_overflow_count", overflow},
                {"config", cfg.to_json()}});
}

void cmd_decode_log(const RunConfig& cfg, const std::string& input, std::string out) {
    const Image3f log_image = load_image(input);
    const EnvironmentMap env = decode_log(log_image, cfg.m);
    if (out.empty()) out = out_path(cfg, stem_of(input) + ".hdr").string();
    write_hdr(env, out);
}

void cmd_warp(const RunConfig& cfg, const std::string& input, double yaw, double pitch,
              double roll, const std::string& traj_path, std::string out) {
    const EnvironmentMap env = read_hdr(input);
    if (traj_path.empty()) {
        const Rotation r = Rotation::from_euler_deg(yaw, pitch, roll);
        if (out.empty()) out = out_path(cfg, stem_of(input) + ".warped.hdr").string();
        write_hdr(warp_env(env, r), out);
        return;
    }
    const auto bytes = read_file(traj_path);
    json j;
    try {
        j = json::parse(bytes.begin(), bytes.end());
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed trajectory: ") + e.what(), 0);
    }
    const CameraTrajectory traj = trajectory_from_json(j);
    const auto video = make_environment_video(env, traj);
    json frames = json::array();
    for (std::size_t i = 0; i < video.size(); ++i) {
        const std::string name = frame_name(i, ".hdr");
        write_hdr(video[i], out_path(cfg, name));
        frames.push_back({{"index", i},
                          {"file", name},
                          {"relative_rotation", traj.relative_rotation(i).row_major()}});
    }
    write_json(out_path(cfg, "environment_video.json"),
               {{"input", input}, {"trajectory", traj_path}, {"pattern", to_string(traj.pattern)},
                {"frames", std::move(frames)}, {"config", cfg.to_json()}});
}

void cmd_trajgen(const RunConfig& cfg, const std::string& pattern, int frames, double max_speed,
                 std::string out) {
    const CameraTrajectory traj =
        gen_trajectory(parse_motion_pattern(pattern), frames, cfg.seed, max_speed);
    json j = trajectory_to_json(traj);
    j["seed"] = cfg.seed;
    j["max_angular_speed_deg"] = max_speed;
    if (out.empty()) out = out_path(cfg, "traj.json").string();
    write_json(out, j);
}

void cmd_render_sphere(const RunConfig& cfg, const std::string& input, const std::string& mode,
                       int size, const std::vector<float>& albedo, double yaw, double pitch,
                       double roll) {
    const EnvironmentMap env = read_hdr(input);
    SphereRenderConfig rc;
    rc.image_size = size;
    if (mode == "mirror") {
        rc.mode = SphereMode::Mirror;
    } else if (mode == "diffuse") {
        rc.mode = SphereMode::Diffuse;
    } else {
        throw UsageError("--mode must be mirror or diffuse");
    }
    if (albedo.size() != 3) throw UsageError("--albedo takes three values");
    rc.albedo = {albedo[0], albedo[1], albedo[2]};
    rc.camera = Rotation::from_euler_deg(yaw, pitch, roll);
    const SphereRender r = render_sphere(env, rc);
    const std::string stem = stem_of(input) + ".sphere_" + mode;
    write_hdr_image(r.radiance, out_path(cfg, stem + ".hdr"));
    write_png_ldr(LdrImage(tonemap_reinhard(r.radiance)), out_path(cfg, stem + ".png"));
    write_png_mask(size, size, r.mask, out_path(cfg, stem + ".mask.png"));
}

void cmd_interp(const RunConfig& cfg, const std::string& a, const std::string& b, double w,
                std::string out) {
    const LatentSeq za = LatentSeq::from_tensor(read_tensor(a));
    const LatentSeq zb = LatentSeq::from_tensor(read_tensor(b));
    if (out.empty()) out = out_path(cfg, "interp.eten").string();
    write_tensor(interpolate_latents(za, zb, w).to_tensor(), out);
}

void cmd_sic_pairs(const RunConfig& cfg, std::size_t frames, const std::string& env_dir,
                   std::string out) {
    const auto files = expand(env_dir, {".eten", ".hdr"});
    std::vector<Image3f> video;
    video.reserve(files.size());
    for (const auto& f : files) video.push_back(load_image(f));
    const SicPair pair = build_sic_pair(frames, video);
    json corr = json::array();
    for (std::size_t i = 0; i < frames; ++i) {
        corr.push_back({{"forward", pair.forward_frames[i]},
                        {"reversed", pair.correspondence[i]},
                        {"forward_file", files[i].filename().string()}});
    }
    if (out.empty()) out = out_path(cfg, "sic_pair.json").string();
    write_json(out, {{"n_frames", frames},
                     {"forward_frames", pair.forward_frames},
                     {"reversed_frames", pair.reversed_frames},
                     {"correspondence", std::move(corr)},
                     {"condition_frame", pair.condition_frame},
                     {"condition_file", files[pair.condition_frame].string()},
                     {"index_base", 0},
                     {"config", cfg.to_json()}});
}

void cmd_stream_plan(const RunConfig& cfg, std::size_t frames, std::string out) {
    const ClipPlan plan = plan_clips(frames, cfg.clip_len, cfg.overlap);
    std::printf("%-6s %-8s %-8s %-8s %s\n", "clip", "start", "end", "length", "condition");
    for (std::size_t k = 0; k < plan.clips.size(); ++k) {
        const Clip& c = plan.clips[k];
        std::string cond = "user";
        if (c.condition) {
            cond = "clip " + std::to_string(c.condition->prev_clip) + " frame " +
                   std::to_string(c.condition->frame);
        }
        std::printf("%-6zu %-8zu %-8zu %-8zu %s\n", k, c.start, c.end(), c.length, cond.c_str());
    }
    json j = clip_plan_to_json(plan);
    j["config"] = cfg.to_json();
    if (out.empty()) out = out_path(cfg, "clip_plan.json").string();
    write_json(out, j);
}

template <typename Metric>
MetricsReport pairwise_images(const std::string& name, const std::string& a, const std::string& b,
                              Metric metric) {
    const std::vector<std::string> exts = {".hdr", ".png", ".eten"};
    const auto fa = expand(a, exts), fb = expand(b, exts);
    if (fa.size() != fb.size()) {
        throw InvariantError("inputs hold " + std::to_string(fa.size()) + " and " +
                             std::to_string(fb.size()) + " frames");
    }
    std::vector<double> values;
    for (std::size_t i = 0; i < fa.size(); ++i) {
        values.push_back(metric(load_image(fa[i]), load_image(fb[i])));
    }
    return aggregate(name, values);
}

void cmd_eval_angular(const RunConfig& cfg, const std::vector<std::string>& preds,
                      const std::vector<std::string>& gts, std::size_t k) {
    if (preds.size() != gts.size() || preds.empty()) {
        throw UsageError("--pred and --gt must be given the same number of times");
    }
    std::vector<std::vector<double>> per_video;
    for (std::size_t v = 0; v < preds.size(); ++v) {
        const auto fp = expand(preds[v], {".hdr"}), fg = expand(gts[v], {".hdr"});
        if (fp.size() != fg.size()) throw InvariantError("prediction/GT frame counts differ");
        std::vector<double> errors;
        for (std::size_t i = 0; i < fp.size(); ++i) {
            const PeakSet p = extract_peaks(read_hdr(fp[i]), k, cfg.nms_radius_deg);
            const PeakSet g = extract_peaks(read_hdr(fg[i]), k, cfg.nms_radius_deg);
            errors.push_back(angular_error(p, g, k));
        }
        per_video.push_back(std::move(errors));
    }
    MetricsReport report = aggregate_videos("angular_error_top" + std::to_string(k), per_video);
    report.parameters["k"] = k;
    report.parameters["nms_radius_deg"] = cfg.nms_radius_deg;
    write_report(cfg, "angular_error", std::move(report));
}

int cmd_selfcheck(const RunConfig& cfg) {
    const auto results = run_selfcheck(cfg.seed);
    bool all = true;
    for (const CheckResult& r : results) {
        all = all && r.passed;
        std::printf("[%s] %-42s %.6g (threshold %.6g)\n", r.passed ? "PASS" : "FAIL",
                    r.name.c_str(), r.value, r.threshold);
    }
    json manifest = selfcheck_manifest(results, cfg.seed);
    manifest["config"] = cfg.to_json();
    write_json(out_path(cfg, "selfcheck.json"), manifest);
    return all ? kExitOk : kExitInvariant;
}

void report_error(const char* kind, const std::string& message) {
    std::cerr << json{{"error", kind}, {"message", message}}.dump() << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"envlight-relit: environment-map encodings, warping, and relighting metrics"};
    app.require_subcommand(1);
    app.fallthrough();

    RunConfig cfg;
    std::string config_path;
    app.add_option("--config", config_path, "JSON file with seed, M, clip_len, overlap, "
                                            "nms_radius_deg, out_dir");
    auto* seed_opt = app.add_option("--seed", cfg.seed, "Seed for all randomness");
    auto* m_opt = app.add_option("--M", cfg.m, "Log-intensity normalization constant");
    auto* out_dir_opt = app.add_option("--out-dir", cfg.out_dir, "Output directory");
    auto* nms_opt = app.add_option("--nms-radius", cfg.nms_radius_deg, "Peak NMS radius, degrees");

    std::string input, input_b, out, traj_path, pattern = "camera-rot-fixed-light", mode = "mirror",
                                                env_dir;
    double yaw = 0, pitch = 0, roll = 0, max_speed = 2.0, w = 1.0, peak = 1.0;
    int frames = 57, size = 256;
    std::size_t k = 5;
    std::vector<float> albedo = {1.f, 1.f, 1.f};
    std::vector<std::string> preds, gts;
    std::size_t clip_len = kDefaultClipLength, overlap = kDefaultClipOverlap;

    auto* encode = app.add_subcommand("encode", "Write the LDR / log / direction bundle of a map");
    encode->add_option("input", input, "Equirectangular .hdr")->required();

    auto* decode = app.add_subcommand("decode-log", "Invert a log-intensity map back to .hdr");
    decode->add_option("input", input, ".eten log map")->required();
    decode->add_option("--out", out);

    auto* warp = app.add_subcommand("warp", "Rotate a map, or render an environment video");
    warp->add_option("input", input, "Equirectangular .hdr")->required();
    warp->add_option("--yaw", yaw, "Degrees about +Y");
    warp->add_option("--pitch", pitch, "Degrees about +X");
    warp->add_option("--roll", roll, "Degrees about +Z");
    warp->add_option("--traj", traj_path, "Trajectory JSON; writes one frame per entry");
    warp->add_option("--out", out);

    auto* trajgen = app.add_subcommand("trajgen", "Generate a random camera/light trajectory");
    trajgen->add_option("--pattern", pattern,
                        "camera-rot-fixed-light | light-rot-fixed-camera | both");
    trajgen->add_option("--frames", frames)->required();
    trajgen->add_option("--max-speed", max_speed, "Degrees per frame");
    trajgen->add_option("--out", out);

    auto* render = app.add_subcommand("render-sphere", "Render a mirror or diffuse probe sphere");
    render->add_option("input", input, "Equirectangular .hdr")->required();
    render->add_option("--mode", mode, "mirror | diffuse");
    render->add_option("--size", size);
    render->add_option("--albedo", albedo)->expected(3);
    render->add_option("--yaw", yaw);
    render->add_option("--pitch", pitch);
    render->add_option("--roll", roll);

    auto* interp = app.add_subcommand("interp", "Blend two latent sequences");
    interp->add_option("with", input, "Latents with the reference image")->required();
    interp->add_option("without", input_b, "Latents with the reference zeroed")->required();
    interp->add_option("--w", w, "Interpolation weight >= 0");
    interp->add_option("--out", out);

    auto* sic = app.add_subcommand("sic-pairs", "Build a forward/reverse relighting pair");
    sic->add_option("--frames", frames)->required();
    sic->add_option("--env-video", env_dir, "Directory of per-frame log maps")->required();
    sic->add_option("--out", out);

    auto* plan = app.add_subcommand("stream-plan", "Split a long video into chained clips");
    plan->add_option("--frames", frames)->required();
    auto* clip_len_opt = plan->add_option("--clip-len", clip_len);
    auto* overlap_opt = plan->add_option("--overlap", overlap);
    plan->add_option("--out", out);

    auto* eval_psnr = app.add_subcommand("eval-psnr", "PSNR between two images or frame folders");
    eval_psnr->add_option("a", input)->required();
    eval_psnr->add_option("b", input_b)->required();
    eval_psnr->add_option("--peak", peak);

    auto* eval_ssim = app.add_subcommand("eval-ssim", "SSIM between two images or frame folders");
    eval_ssim->add_option("a", input)->required();
    eval_ssim->add_option("b", input_b)->required();

    auto* eval_mc = app.add_subcommand("eval-mc", "Material consistency of [N, D] features");
    eval_mc->add_option("src", input)->required();
    eval_mc->add_option("gen", input_b)->required();

    auto* eval_ang = app.add_subcommand("eval-angular", "Peak-light angular error");
    eval_ang->add_option("--pred", preds, "Predicted .hdr or frame folder (one per video)")
        ->required();
    eval_ang->add_option("--gt", gts, "Ground-truth .hdr or frame folder (one per video)")
        ->required();
    eval_ang->add_option("--k", k);

    auto* selfcheck = app.add_subcommand("selfcheck", "Run the invariant suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        report_error("usage", e.what());
        return kExitUsage;
    }

    try {
        if (!config_path.empty()) {
            // Explicit flags win over the config file.
            RunConfig flags = cfg;
            load_config_file(config_path, cfg);
            if (seed_opt->count()) cfg.seed = flags.seed;
            if (m_opt->count()) cfg.m = flags.m;
            if (out_dir_opt->count()) cfg.out_dir = flags.out_dir;
            if (nms_opt->count()) cfg.nms_radius_deg = flags.nms_radius_deg;
        }
        if (clip_len_opt->count()) cfg.clip_len = clip_len;
        if (overlap_opt->count()) cfg.overlap = overlap;
        if (frames < 0) throw UsageError("--frames must be non-negative");

        if (*encode) {
            cmd_encode(cfg, input);
        } else if (*decode) {
            cmd_decode_log(cfg, input, out);
        } else if (*warp) {
            cmd_warp(cfg, input, yaw, pitch, roll, traj_path, out);
        } else if (*trajgen) {
            cmd_trajgen(cfg, pattern, frames, max_speed, out);
        } else if (*render) {
            cmd_render_sphere(cfg, input, mode, size, albedo, yaw, pitch, roll);
        } else if (*interp) {
            cmd_interp(cfg, input, input_b, w, out);
        } else if (*sic) {
            cmd_sic_pairs(cfg, static_cast<std::size_t>(frames), env_dir, out);
        } else if (*plan) {
            cmd_stream_plan(cfg, static_cast<std::size_t>(frames), out);
        } else if (*eval_psnr) {
            MetricsReport r = pairwise_images("psnr", input, input_b,
                                              [&](const Image3f& a, const Image3f& b) {
                                                  return psnr(a, b, peak);
                                              });
            r.parameters["peak"] = peak;
            write_report(cfg, "psnr", std::move(r));
        } else if (*eval_ssim) {
            write_report(cfg, "ssim", pairwise_images("ssim", input, input_b,
                                                      [](const Image3f& a, const Image3f& b) {
                                                          return ssim(a, b);
                                                      }));
        } else if (*eval_mc) {
            const double mc = material_consistency(read_tensor(input), read_tensor(input_b));
            MetricsReport r = aggregate("material_consistency", {mc});
            r.unit = "per-video";
            write_report(cfg, "material_consistency", std::move(r));
        } else if (*eval_ang) {
            cmd_eval_angular(cfg, preds, gts, k);
        } else if (*selfcheck) {
            return cmd_selfcheck(cfg);
        }
    } catch (const Error& e) {
        report_error(to_string(e.kind()), e.what());
        switch (e.kind()) {
            case ErrorKind::Usage: return kExitUsage;
            case ErrorKind::Parse:
            case ErrorKind::Io: return kExitParse;
            case ErrorKind::Invariant: return kExitInvariant;
        }
    } catch (const fs::filesystem_error& e) {
        report_error("io", e.what());
        return kExitParse;
    }
    return kExitOk;
}
