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

#include "vippipe/dataset.hpp"

#include "vippipe/error.hpp"
#include "vippipe/random.hpp"

namespace vippipe {

namespace {

constexpr std::uint64_t kPlanStream = 0x91A7;
constexpr std::uint64_t kAugmentStream = 0xA06;

}  // namespace

std::uint64_t plan_seed(std::uint64_t seed, int epoch, std::size_t video_index) {
  return derive_seed(seed, {kPlanStream, static_cast<std::uint64_t>(epoch), video_index});
}

ClipDataset::ClipDataset(const DatasetManifest& manifest, const RunConfig& cfg, Split split, int epoch,
                         LoadOptions options)
    : manifest_(manifest), cfg_(cfg), epoch_(epoch), options_(options) {
  for (std::size_t v = 0; v < manifest.videos.size(); ++v) {
    const VideoRecord& rec = manifest.videos[v];
    if (rec.split != split) continue;
    ClipPlan plan = plan_clips(rec.length, cfg.clip, plan_seed(cfg.seed, epoch, v));
    for (std::size_t c = 0; c < plan.clips.size(); ++c) items_.push_back({v, c, std::move(plan.clips[c])});
  }
}

AnnotationSet ClipDataset::raw_annotations(const ClipItem& item) const {
  const VideoRecord& rec = manifest_.videos.at(item.video);
  AnnotationSet set;
  set.frames.reserve(item.indices.size());
  for (std::int64_t index : item.indices) {
    const FrameAnnotation* fa = rec.annotation(index);
    if (!fa) {
      set.frames.emplace_back();
      continue;
    }
    FrameAnnotations out = make_frame_annotations(fa->boxes, fa->keypoints);
    out.word_labels = fa->word_labels;
    if (options_.maps) {
      if (fa->saliency_map) out.saliency = read_image(manifest_.resolve(*fa->saliency_map));
      if (fa->fixations) out.fixations = read_image(manifest_.resolve(*fa->fixations));
    }
    set.frames.push_back(std::move(out));
  }
  return set;
}

LoadedClip ClipDataset::load(std::size_t i) const {
  const ClipItem& it = item(i);
  const VideoRecord& rec = manifest_.videos[it.video];
  Clip clip = read_clip(manifest_.resolve(rec.path), it.indices);
  AnnotationSet ann = raw_annotations(it);
  const std::uint64_t aug_seed = derive_seed(cfg_.seed, {kAugmentStream, static_cast<std::uint64_t>(epoch_)});
  const SampledParams params = sample_params(cfg_.transform, {clip.height(), clip.width()}, aug_seed, i);
  auto [out_clip, out_ann] = apply_clip(clip, ann, cfg_.transform, params);
  return {it, std::move(out_clip), std::move(out_ann), rec.action_label, params};
}

std::vector<double> clip_features(const Clip& clip, const AnnotationSet& ann) {
  std::vector<double> f(kFeatureDim, 0.0);
  const int ch = clip.channels();
  double sums[3] = {0, 0, 0};
  double count = 0;
  for (const Frame& frame : clip.frames) {
    const std::size_t n = frame.size();
    for (std::size_t i = 0; i < n; ++i) sums[ch == 1 ? 0 : i % ch] += frame.flat(i);
    count += static_cast<double>(n / ch);
  }
  for (int c = 0; c < 3; ++c) f[c] = (ch == 1 ? sums[0] : sums[c]) / count / 255.0;

  double cx = 0;
  double cy = 0;
  for (std::size_t t = 0; t < clip.length(); ++t) {
    const FrameAnnotations* fa = t < ann.frames.size() ? &ann.frames[t] : nullptr;
    if (fa && !fa->boxes.empty()) {
      const Box& b = fa->boxes.front();
      cx += (b.xmin + b.xmax) / 2.0 / clip.width();
      cy += (b.ymin + b.ymax) / 2.0 / clip.height();
    } else {
      cx += 0.5;
      cy += 0.5;
    }
  }
  f[3] = cx / static_cast<double>(clip.length());
  f[4] = cy / static_cast<double>(clip.length());
  return f;
}

}  // namespace vippipe
