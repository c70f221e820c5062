// SPDX-License-Identifier: Apache-2.0

#include "envlight/relight_math.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "envlight/env_warp.hpp"
#include "envlight/error.hpp"
#include "envlight/rng.hpp"

namespace envlight {

namespace {

constexpr std::uint64_t kReferenceIndexStream = 0x5EFull;
constexpr std::uint64_t kReferenceDropStream = 0xD209ull;

std::string dims_string(const LatentSeq::Dims& d) {
    return "[" + std::to_string(d[0]) + "," + std::to_string(d[1]) + "," + std::to_string(d[2]) +
           "," + std::to_string(d[3]) + "]";
}

void require_same_dims(const LatentSeq& a, const LatentSeq& b, const char* what) {
    if (a.dims() != b.dims()) {
        throw InvariantError(std::string(what) + ": shape " + dims_string(a.dims()) +
                             " does not match " + dims_string(b.dims()));
    }
}

}  // namespace

LatentSeq add(const LatentSeq& a, const LatentSeq& b) {
    require_same_dims(a, b, "add");
    std::vector<float> out(a.size());
    const auto x = a.data(), y = b.data();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] + y[i];
    return LatentSeq(a.dims(), std::move(out));
}

FusedLatents group_fuse(const GBufferLatents& g) {
    for (const LatentSeq* z : {&g.normal, &g.depth, &g.roughness, &g.metallic}) {
        require_same_dims(g.albedo, *z, "group_fuse");
    }
    return {add(add(g.albedo, g.depth), g.metallic), add(g.normal, g.roughness)};
}

ConditionSequence assemble_sequence(const LatentSeq& reference, const LatentSeq& target,
                                    const LatentSeq& env_log, const LatentSeq& adm,
                                    const LatentSeq& nr, const LatentSeq& light_condition) {
    if (reference.frames() != 1) {
        throw InvariantError("reference latent must hold exactly one frame, got " +
                             std::to_string(reference.frames()));
    }
    require_same_dims(target, env_log, "assemble_sequence(z_Elog)");
    require_same_dims(target, adm, "assemble_sequence(z_adm)");
    require_same_dims(target, nr, "assemble_sequence(z_nr)");
    require_same_dims(target, light_condition, "assemble_sequence(c_E)");
    if (!reference.same_frame_shape(target)) {
        throw InvariantError("assemble_sequence: reference frame shape " +
                             dims_string(reference.dims()) + " does not match " +
                             dims_string(target.dims()));
    }

    const std::size_t n = target.frames();
    const LatentSeq lit = add(nr, light_condition);
    std::vector<float> data;
    data.reserve(reference.size() + 4 * target.size());

    ConditionSequence seq;
    std::size_t frame = 0;
    for (const auto& [label, part] :
         {std::pair<const char*, const LatentSeq*>{kSegmentReference, &reference},
          {kSegmentTarget, &target},
          {kSegmentEnvLog, &env_log},
          {kSegmentAdm, &adm},
          {kSegmentNrLight, &lit}}) {
        seq.layout.push_back({label, frame, part->frames()});
        frame += part->frames();
        data.insert(data.end(), part->data().begin(), part->data().end());
    }
    const auto& d = target.dims();
    seq.data = LatentSeq({1 + 4 * n, d[1], d[2], d[3]}, std::move(data));
    return seq;
}

LatentSeq ConditionSequence::segment(const std::string& label) const {
    for (const Segment& s : layout) {
        if (s.label != label) continue;
        const std::size_t fs = data.frame_size();
        const auto first = data.data().begin() + static_cast<std::ptrdiff_t>(s.first_frame * fs);
        const auto& d = data.dims();
        return LatentSeq({s.n_frames, d[1], d[2], d[3]},
                         std::vector<float>(first, first + static_cast<std::ptrdiff_t>(s.n_frames * fs)));
    }
    throw InvariantError("no segment labelled '" + label + "'");
}

DisassembledSequence disassemble_sequence(const ConditionSequence& seq,
                                          const LatentSeq& light_condition) {
    DisassembledSequence out;
    out.reference = seq.segment(kSegmentReference);
    out.target = seq.segment(kSegmentTarget);
    out.env_log = seq.segment(kSegmentEnvLog);
    out.adm = seq.segment(kSegmentAdm);
    const LatentSeq lit = seq.segment(kSegmentNrLight);
    require_same_dims(lit, light_condition, "disassemble_sequence");
    std::vector<float> nr(lit.size());
    for (std::size_t i = 0; i < nr.size(); ++i) nr[i] = lit.data()[i] - light_condition.data()[i];
    out.nr = LatentSeq(lit.dims(), std::move(nr));
    return out;
}

std::size_t sample_reference_index(std::size_t n_frames, std::uint64_t denoise_step,
                                   std::uint64_t seed) {
    if (n_frames < 1) throw InvariantError("reference sampling needs at least one frame");
    return static_cast<std::size_t>(
        to_range(hash_draw(seed, denoise_step, kReferenceIndexStream), n_frames));
}

bool reference_dropped(double p, std::uint64_t seed) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw InvariantError("drop probability must lie in [0, 1], got " + std::to_string(p));
    }
    return to_unit(hash_draw(seed, 0, kReferenceDropStream)) < p;
}

LatentSeq zero_reference(const LatentSeq& reference, double p, std::uint64_t seed) {
    if (reference_dropped(p, seed)) return LatentSeq(reference.dims(), 0.f);
    return reference;
}

LatentSeq interpolate_latents(const LatentSeq& z_with, const LatentSeq& z_without, double w) {
    require_same_dims(z_with, z_without, "interpolate_latents");
    if (!(w >= 0.0) || !std::isfinite(w)) {
        throw InvariantError("interpolation weight must be finite and >= 0, got " +
                             std::to_string(w));
    }
    if (w == 0.0) return z_with;
    const double keep = 1.0 / (1.0 + w);
    const double blend = w / (1.0 + w);
    std::vector<float> out(z_with.size());
    const auto a = z_with.data(), b = z_without.data();
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = static_cast<float>(a[i] * keep + b[i] * blend);
    }
    return LatentSeq(z_with.dims(), std::move(out));
}

SicPair build_sic_pair(std::size_t n_frames, std::span<const Image3f> env_video) {
    if (n_frames == 0 || env_video.empty()) {
        throw InvariantError("SIC pair needs a non-empty environment video");
    }
    if (env_video.size() != n_frames) {
        throw InvariantError("environment video has " + std::to_string(env_video.size()) +
                             " frames, expected " + std::to_string(n_frames));
    }
    SicPair pair;
    pair.forward_frames.resize(n_frames);
    pair.reversed_frames.resize(n_frames);
    pair.correspondence.resize(n_frames);
    for (std::size_t i = 0; i < n_frames; ++i) {
        pair.forward_frames[i] = i;
        pair.reversed_frames[i] = n_frames - 1 - i;
        pair.correspondence[i] = n_frames - 1 - i;
    }
    pair.condition_frame = n_frames - 1;
    pair.condition = env_video[n_frames - 1];
    return pair;
}

LatentSeq make_light_condition_standin(std::span<const LightBundle> bundles, std::size_t height,
                                       std::size_t width, std::size_t channels) {
    if (bundles.empty()) throw InvariantError("light condition stand-in needs at least one frame");
    const int bw = bundles.front().ldr.width(), bh = bundles.front().ldr.height();
    LatentSeq::Dims dims{bundles.size(), height, width, channels};
    std::vector<float> data(Tensor::element_count(
        std::vector<std::uint64_t>{dims[0], dims[1], dims[2], dims[3]}));

    std::size_t k = 0;
    for (const LightBundle& b : bundles) {
        for (const Image3f* img : {&b.ldr.image(), &b.log, &b.dir.image()}) {
            if (img->width() != bw || img->height() != bh) {
                throw InvariantError("light condition stand-in: bundle images differ in size");
            }
        }
        Image3f mean(bw, bh);
        auto m = mean.data();
        const auto l = b.ldr.data(), g = b.log.data(), d = b.dir.data();
        for (std::size_t i = 0; i < m.size(); ++i) {
            m[i] = static_cast<float>((static_cast<double>(l[i]) + g[i] + d[i]) / 3.0);
        }
        for (std::size_t y = 0; y < height; ++y) {
            const double sy = (y + 0.5) * bh / static_cast<double>(height) - 0.5;
            for (std::size_t x = 0; x < width; ++x) {
                const double sx = (x + 0.5) * bw / static_cast<double>(width) - 0.5;
                const Rgb c = sample_bilinear(mean, sx, sy);
                const float rgb[3] = {c.r, c.g, c.b};
                for (std::size_t ch = 0; ch < channels; ++ch) data[k++] = rgb[ch % 3];
            }
        }
    }
    return LatentSeq(dims, std::move(data));
}

}  // namespace envlight
