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

#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace vippipe {

enum class ClipMode { Contiguous, Uniform };

std::string_view to_string(ClipMode mode);
std::optional<ClipMode> parse_clip_mode(std::string_view name);

/// Clip extraction parameters.
///
/// Contiguous mode: clip k starts at `offset + k * (clip_length + clip_stride)`,
/// so stride 0 gives back-to-back clips and a negative stride overlaps them.
///   num_clips == -1  every clip that fits entirely; a partial tail is dropped
///   num_clips == 0   one clip covering the whole video
///   num_clips == n   n clips chosen evenly from the -1 start list
/// A video too short for a single clip yields one clip padded by repeating its
/// last frame (n copies of it when n clips were requested).
///
/// Uniform mode: one clip of clip_length indices spread evenly, rounded to
/// nearest, over [offset, video_length - 1].
///
/// clip_length == -1 always yields the whole video as one clip.
struct ClipConfig {
  int clip_length = 16;
  int num_clips = -1;
  int clip_stride = 0;
  int clip_offset = 0;
  bool random_offset = false;
  ClipMode mode = ClipMode::Contiguous;

  /// Throws InvalidConfig when the fields break their invariants.
  void validate() const;
  friend bool operator==(const ClipConfig&, const ClipConfig&) = default;
};

struct ClipPlan {
  std::vector<std::vector<std::int64_t>> clips;
  friend bool operator==(const ClipPlan&, const ClipPlan&) = default;
};

/// Throws InfeasibleConfig when the offset lies past the video or several
/// uniform clips are requested. With random_offset the offset is drawn
/// uniformly from [clip_offset, max(clip_offset, video_length - clip_length)]
/// using `seed`; otherwise the seed is ignored.
ClipPlan plan_clips(std::int64_t video_length, const ClipConfig& cfg, std::uint64_t seed);

}  // namespace vippipe
