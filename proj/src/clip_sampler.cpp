// Copyright 2026 The vippipe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vippipe/clip_sampler.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "vippipe/error.hpp"
#include "vippipe/random.hpp"

namespace vippipe {

namespace {

constexpr std::uint64_t kOffsetStream = 0x0FF5E7;

// round(num / den) with halves rounded up; num >= 0, den > 0.
std::int64_t round_ratio(std::int64_t num, std::int64_t den) { return (2 * num + den) / (2 * den); }

std::vector<std::int64_t> whole_video(std::int64_t video_length) {
  std::vector<std::int64_t> clip(static_cast<std::size_t>(video_length));
  std::iota(clip.begin(), clip.end(), std::int64_t{0});
  return clip;
}

std::int64_t choose_offset(std::int64_t video_length, const ClipConfig& cfg, std::uint64_t seed) {
  if (!cfg.random_offset) return cfg.clip_offset;
  const std::int64_t hi = std::max<std::int64_t>(cfg.clip_offset, video_length - cfg.clip_length);
  Rng rng(derive_seed(seed, {kOffsetStream}));
  return rng.uniform_int(cfg.clip_offset, hi);
}

}  // namespace

std::string_view to_string(ClipMode mode) { return mode == ClipMode::Uniform ? "uniform" : "contiguous"; }

std::optional<ClipMode> parse_clip_mode(std::string_view name) {
  if (name == "contiguous") return ClipMode::Contiguous;
  if (name == "uniform") return ClipMode::Uniform;
  return std::nullopt;
}

void ClipConfig::validate() const {
  if (clip_length == 0 || clip_length < -1)
    throw Error(Errc::InvalidConfig, "clip_length must be >= 1 or -1, got " + std::to_string(clip_length));
  if (clip_length > 0 && clip_stride <= -clip_length)
    throw Error(Errc::InvalidConfig, "clip_stride " + std::to_string(clip_stride) + " must exceed -clip_length");
  if (clip_offset < 0) throw Error(Errc::InvalidConfig, "clip_offset must be >= 0");
  if (num_clips < -1) throw Error(Errc::InvalidConfig, "num_clips must be >= -1");
}

ClipPlan plan_clips(std::int64_t video_length, const ClipConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  if (video_length < 1) throw Error(Errc::InfeasibleConfig, "video has no frames");
  if (cfg.clip_offset >= video_length)
    throw Error(Errc::InfeasibleConfig, "clip_offset " + std::to_string(cfg.clip_offset) +
                                            " is past the last frame of a " + std::to_string(video_length) +
                                            "-frame video");
  if (cfg.mode == ClipMode::Uniform && cfg.num_clips > 1)
    throw Error(Errc::InfeasibleConfig, "uniform mode produces a single clip, " + std::to_string(cfg.num_clips) +
                                            " requested");

  ClipPlan plan;
  if (cfg.clip_length == -1 || cfg.num_clips == 0) {
    plan.clips.push_back(whole_video(video_length));
    return plan;
  }

  const std::int64_t length = cfg.clip_length;
  const std::int64_t offset = choose_offset(video_length, cfg, seed);

  if (cfg.mode == ClipMode::Uniform) {
    const std::int64_t span = video_length - 1 - offset;
    std::vector<std::int64_t> clip(static_cast<std::size_t>(length));
    for (std::int64_t i = 0; i < length; ++i)
      clip[i] = length == 1 ? offset : offset + round_ratio(i * span, length - 1);
    plan.clips.push_back(std::move(clip));
    return plan;
  }

  const std::int64_t step = length + cfg.clip_stride;
  std::vector<std::int64_t> starts;
  for (std::int64_t s = offset; s + length - 1 < video_length; s += step) starts.push_back(s);

  if (starts.empty()) {
    std::vector<std::int64_t> clip;
    clip.reserve(static_cast<std::size_t>(length));
    for (std::int64_t i = 0; i < length; ++i) clip.push_back(std::min(offset + i, video_length - 1));
    plan.clips.push_back(std::move(clip));
    return plan;
  }

  auto emit = [&](std::int64_t start) {
    std::vector<std::int64_t> clip(static_cast<std::size_t>(length));
    std::iota(clip.begin(), clip.end(), start);
    plan.clips.push_back(std::move(clip));
  };

  if (cfg.num_clips == -1) {
    for (std::int64_t s : starts) emit(s);
    return plan;
  }
  const std::int64_t n = cfg.num_clips;
  const std::int64_t last = static_cast<std::int64_t>(starts.size()) - 1;
  for (std::int64_t k = 0; k < n; ++k) emit(starts[n == 1 ? 0 : round_ratio(k * last, n - 1)]);
  return plan;
}

}  // namespace vippipe
