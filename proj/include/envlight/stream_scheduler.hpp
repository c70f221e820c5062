// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "envlight/image.hpp"

namespace envlight {

inline constexpr std::size_t kDefaultClipLength = 57;
inline constexpr std::size_t kDefaultClipOverlap = 1;

/// True for lengths of the form 8n + 1.
constexpr bool is_valid_clip_length(std::size_t n) noexcept { return n % 8 == 1; }

/// Where a clip's initial lighting comes from. Empty means the user-supplied
/// map; otherwise the previous clip's predicted environment video at the
/// global frame `frame`.
struct ConditionSource {
    std::size_t prev_clip = 0;
    std::size_t frame = 0;

    friend bool operator==(const ConditionSource&, const ConditionSource&) = default;
};

struct Clip {
    std::size_t start = 0;
    std::size_t length = 0;
    std::optional<ConditionSource> condition;  // nullopt: user-supplied

    std::size_t end() const noexcept { return start + length; }
    friend bool operator==(const Clip&, const Clip&) = default;
};

struct ClipPlan {
    std::size_t total_frames = 0;
    std::size_t clip_length = kDefaultClipLength;
    std::size_t overlap = kDefaultClipOverlap;
    std::vector<Clip> clips;

    /// Throws InvariantError if coverage, bounds or chaining is broken.
    void validate() const;
};

/// Splits [0, total_frames) into chained clips. Clip k nominally starts at
/// k * (clip_len - overlap). A short tail becomes the smallest 8n+1 clip that
/// covers it, shifted backward to end at total_frames. Each non-first clip is
/// conditioned on its own first frame as predicted by the previous clip.
ClipPlan plan_clips(std::size_t total_frames, std::size_t clip_len = kDefaultClipLength,
                    std::size_t overlap = kDefaultClipOverlap);

/// Initial environment map for every clip: the user map for clip 0, then the
/// previous clip's prediction at the condition frame. `env_videos[k]` must
/// hold exactly clips[k].length maps; only videos of clips that feed a later
/// clip are read.
std::vector<Image3f> chain_conditions(const ClipPlan& plan, const Image3f& user_map,
                                      std::span<const std::vector<Image3f>> env_videos);

nlohmann::json clip_plan_to_json(const ClipPlan& plan);
ClipPlan clip_plan_from_json(const nlohmann::json& j);

}  // namespace envlight
