// SPDX-License-Identifier: Apache-2.0

#include "envlight/stream_scheduler.hpp"

#include <string>

#include "envlight/error.hpp"

namespace envlight {

namespace {

constexpr std::size_t smallest_valid_at_least(std::size_t n) noexcept {
    return n <= 1 ? 1 : ((n + 6) / 8) * 8 + 1;
}

constexpr std::size_t largest_valid_at_most(std::size_t n) noexcept {
    return ((n - 1) / 8) * 8 + 1;
}

}  // namespace

ClipPlan plan_clips(std::size_t total_frames, std::size_t clip_len, std::size_t overlap) {
    if (total_frames < 1) throw InvariantError("stream plan needs at least one frame");
    if (!is_valid_clip_length(clip_len)) {
        throw InvariantError("clip length " + std::to_string(clip_len) +
                             " is not of the form 8n+1");
    }
    if (overlap == 0 || overlap >= clip_len) {
        throw InvariantError("overlap must lie in (0, clip_len), got " + std::to_string(overlap));
    }

    ClipPlan plan{total_frames, clip_len, overlap, {}};

    // Videos shorter than one clip use the largest 8n+1 prefix plus a tail.
    // Below 9 frames no such split exists and the single clip keeps the raw
    // length.
    std::size_t nominal = clip_len;
    if (total_frames < clip_len) {
        nominal = largest_valid_at_most(total_frames);
        if (total_frames < 9 || nominal <= overlap) nominal = total_frames;
    }
    plan.clips.push_back({0, nominal, std::nullopt});

    while (plan.clips.back().end() < total_frames) {
        const Clip& prev = plan.clips.back();
        const std::size_t k = plan.clips.size();
        std::size_t start = prev.end() - overlap;
        std::size_t length = nominal;
        if (start + length > total_frames) {
            length = smallest_valid_at_least(total_frames - start);
            if (length > total_frames - prev.start) length = prev.length;
            start = total_frames - length;
        }
        plan.clips.push_back({start, length, ConditionSource{k - 1, start}});
    }
    plan.validate();
    return plan;
}

void ClipPlan::validate() const {
    if (clips.empty()) throw InvariantError("stream plan has no clips");
    if (clips.front().start != 0 || clips.front().condition) {
        throw InvariantError("first clip must start at 0 with a user-supplied condition");
    }
    if (clips.back().end() != total_frames) {
        throw InvariantError("stream plan does not end at the last frame");
    }
    for (std::size_t k = 0; k < clips.size(); ++k) {
        const Clip& c = clips[k];
        if (c.length == 0 || c.end() > total_frames) {
            throw InvariantError("clip " + std::to_string(k) + " exceeds the video");
        }
        if (k == 0) continue;
        const Clip& prev = clips[k - 1];
        if (!c.condition || c.condition->prev_clip != k - 1 || c.condition->frame != c.start) {
            throw InvariantError("clip " + std::to_string(k) +
                                 " must be conditioned on its first frame from the previous clip");
        }
        if (c.start <= prev.start || c.start >= prev.end() || c.end() <= prev.end()) {
            throw InvariantError("clip " + std::to_string(k) +
                                 " does not start inside and extend the previous clip");
        }
        if (prev.end() - c.start < overlap) {
            throw InvariantError("clip " + std::to_string(k) + " overlaps less than configured");
        }
    }
}

std::vector<Image3f> chain_conditions(const ClipPlan& plan, const Image3f& user_map,
                                      std::span<const std::vector<Image3f>> env_videos) {
    plan.validate();
    std::vector<Image3f> out;
    out.reserve(plan.clips.size());
    out.push_back(user_map);
    for (std::size_t k = 1; k < plan.clips.size(); ++k) {
        const ConditionSource& src = *plan.clips[k].condition;
        if (src.prev_clip >= env_videos.size()) {
            throw InvariantError("missing environment video for clip " +
                                 std::to_string(src.prev_clip));
        }
        const Clip& prev = plan.clips[src.prev_clip];
        const auto& video = env_videos[src.prev_clip];
        if (video.size() != prev.length) {
            throw InvariantError("environment video of clip " + std::to_string(src.prev_clip) +
                                 " has " + std::to_string(video.size()) + " frames, clip has " +
                                 std::to_string(prev.length));
        }
        if (src.frame < prev.start || src.frame >= prev.end()) {
            throw InvariantError("condition frame " + std::to_string(src.frame) +
                                 " lies outside clip " + std::to_string(src.prev_clip));
        }
        out.push_back(video[src.frame - prev.start]);
    }
    return out;
}

nlohmann::json clip_plan_to_json(const ClipPlan& plan) {
    nlohmann::json clips = nlohmann::json::array();
    for (std::size_t k = 0; k < plan.clips.size(); ++k) {
        const Clip& c = plan.clips[k];
        nlohmann::json cond = "user";
        if (c.condition) {
            cond = {{"prev_clip", c.condition->prev_clip},
                    {"frame", c.condition->frame},
                    {"local_frame", c.condition->frame - plan.clips[c.condition->prev_clip].start}};
        }
        clips.push_back({{"index", k},
                         {"start", c.start},
                         {"length", c.length},
                         {"end", c.end()},
                         {"condition", std::move(cond)}});
    }
    return {{"total_frames", plan.total_frames},
            {"clip_length", plan.clip_length},
            {"overlap", plan.overlap},
            {"clips", std::move(clips)}};
}

ClipPlan clip_plan_from_json(const nlohmann::json& j) {
    try {
        ClipPlan plan;
        plan.total_frames = j.at("total_frames").get<std::size_t>();
        plan.clip_length = j.at("clip_length").get<std::size_t>();
        plan.overlap = j.at("overlap").get<std::size_t>();
        for (const auto& c : j.at("clips")) {
            Clip clip{c.at("start").get<std::size_t>(), c.at("length").get<std::size_t>(),
                      std::nullopt};
            const auto& cond = c.at("condition");
            if (cond.is_object()) {
                clip.condition = ConditionSource{cond.at("prev_clip").get<std::size_t>(),
                                                 cond.at("frame").get<std::size_t>()};
            } else if (cond != "user") {
                throw InvariantError("clip condition must be \"user\" or an object");
            }
            plan.clips.push_back(clip);
        }
        plan.validate();
        return plan;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed clip plan JSON: ") + e.what(), 0);
    }
}

}  // namespace envlight
