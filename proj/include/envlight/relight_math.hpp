// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "envlight/image.hpp"
#include "envlight/light_encodings.hpp"
#include "envlight/tensor.hpp"

namespace envlight {

/// Latents of the five G-buffer channels; all share one shape.
struct GBufferLatents {
    LatentSeq albedo;     // base colour
    LatentSeq normal;
    LatentSeq depth;
    LatentSeq roughness;
    LatentSeq metallic;
};

struct FusedLatents {
    LatentSeq albedo_depth_metallic;  // a + d + m
    LatentSeq normal_roughness;       // n + r
};

/// Partial summation of the G-buffer latents into two groups.
FusedLatents group_fuse(const GBufferLatents& g);

/// Elementwise sum of equally-shaped sequences.
LatentSeq add(const LatentSeq& a, const LatentSeq& b);

// Segment labels of the conditioning sequence, in temporal order.
inline constexpr const char* kSegmentReference = "z_I";
inline constexpr const char* kSegmentTarget = "z_t";
inline constexpr const char* kSegmentEnvLog = "z_Elog";
inline constexpr const char* kSegmentAdm = "z_adm";
inline constexpr const char* kSegmentNrLight = "z_nr+c_E";

struct Segment {
    std::string label;
    std::size_t first_frame = 0;
    std::size_t n_frames = 0;
};

/// Frame-wise concatenation [z_I | z_t | z_Elog | z_adm | z_nr + c_E] of
/// 1 + 4N frames.
struct ConditionSequence {
    std::vector<Segment> layout;
    LatentSeq data;

    /// Copy of the frames belonging to `label`.
    LatentSeq segment(const std::string& label) const;
};

ConditionSequence assemble_sequence(const LatentSeq& reference, const LatentSeq& target,
                                    const LatentSeq& env_log, const LatentSeq& adm,
                                    const LatentSeq& nr, const LatentSeq& light_condition);

struct DisassembledSequence {
    LatentSeq reference;
    LatentSeq target;
    LatentSeq env_log;
    LatentSeq adm;
    LatentSeq nr;  // recovered as segment - light_condition
};

DisassembledSequence disassemble_sequence(const ConditionSequence& seq,
                                          const LatentSeq& light_condition);

/// Uniform frame index in [0, n_frames) for one denoising step, a pure
/// function of (seed, step).
std::size_t sample_reference_index(std::size_t n_frames, std::uint64_t denoise_step,
                                   std::uint64_t seed);

/// Whether the reference latent is dropped for this seed: true with
/// probability p.
bool reference_dropped(double p, std::uint64_t seed);

/// All-zero copy with probability p, otherwise the input unchanged.
LatentSeq zero_reference(const LatentSeq& reference, double p, std::uint64_t seed);

inline constexpr double kReferenceDropProbability = 0.3;

/// z_with / (1 + w) + z_without * w / (1 + w). w = 0 returns z_with exactly;
/// large w approaches z_without.
LatentSeq interpolate_latents(const LatentSeq& z_with, const LatentSeq& z_without, double w);

/// Forward/reverse relighting pair for the illumination-consistency stage.
/// Indices are 0-based: forward = 0..n-1, reversed = n-1..0, and frame i of
/// the forward video corresponds to frame n-1-i.
struct SicPair {
    std::vector<std::size_t> forward_frames;
    std::vector<std::size_t> reversed_frames;
    std::vector<std::size_t> correspondence;
    std::size_t condition_frame = 0;
    Image3f condition;  // log environment map of the last forward frame
};

SicPair build_sic_pair(std::size_t n_frames, std::span<const Image3f> env_video);

/// Non-learned stand-in for the lighting condition latent: for each frame the
/// mean of the LDR, log and directional images, bilinearly resized to
/// height x width, with latent channel c reading image channel c % 3.
LatentSeq make_light_condition_standin(std::span<const LightBundle> bundles,
                                       std::size_t height, std::size_t width,
                                       std::size_t channels);

}  // namespace envlight
