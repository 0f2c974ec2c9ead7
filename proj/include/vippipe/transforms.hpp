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
#include <functional>
#include <optional>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "vippipe/frame_io.hpp"
#include "vippipe/manifest.hpp"

namespace vippipe {

struct Shape {
  int height = 0;
  int width = 0;
  friend bool operator==(const Shape&, const Shape&) = default;
};

enum class CropType { None, Center, Random };

std::string_view to_string(CropType type);
/// Accepts "Random", "Center", "None" (any case); empty string means None.
std::optional<CropType> parse_crop_type(std::string_view name);

struct TransformConfig {
  std::optional<Shape> resize_shape;
  std::optional<Shape> crop_shape;
  CropType crop_type = CropType::None;
  double flip_probability = 0.0;
  /// Rotation angle is drawn uniformly from [-rotation_degrees, rotation_degrees].
  std::optional<double> rotation_degrees;
  /// Per-channel means (one value applies to every channel); empty disables.
  std::vector<double> subtract_mean;
  /// Geometry ends with a resize to this shape when it differs.
  std::optional<Shape> final_shape;

  void validate() const;
  friend bool operator==(const TransformConfig&, const TransformConfig&) = default;
};

/// Randomness for one clip, drawn once and applied to all of its frames.
struct SampledParams {
  int crop_x = 0;
  int crop_y = 0;
  bool flip_applied = false;
  double rotation = 0.0;  // degrees
  friend bool operator==(const SampledParams&, const SampledParams&) = default;
};

/// Draws the parameters for clip `clip_id` from a stream keyed only by
/// (seed, clip_id). `frame_shape` is the source frame size; crops are placed
/// within resize_shape when a resize precedes them.
SampledParams sample_params(const TransformConfig& cfg, Shape frame_shape, std::uint64_t seed,
                            std::uint64_t clip_id);

// Geometry uses continuous coordinates: pixel (row i, col j) covers
// [j, j+1) x [i, i+1), so a W-wide frame spans x in [0, W].

struct ResizeStep {
  Shape to;
};
struct CropStep {
  int x = 0;
  int y = 0;
  Shape size;
};
struct FlipStep {};
/// Rotation about the frame centre; output keeps the input size, uncovered
/// pixels are zero. (x, y) -> (cx + cos*dx + sin*dy, cy - sin*dx + cos*dy).
struct RotateStep {
  double degrees = 0.0;
};
struct SubtractMeanStep {
  std::vector<double> means;
};
using TransformStep = std::variant<ResizeStep, CropStep, FlipStep, RotateStep, SubtractMeanStep>;

/// Fixed order: resize, crop, flip, rotate, final resize, mean subtraction.
/// Steps that would do nothing are left out.
std::vector<TransformStep> build_steps(const TransformConfig& cfg, const SampledParams& params, Shape input);

Shape output_shape(const TransformStep& step, Shape input);

struct Point {
  double x = 0;
  double y = 0;
};

/// Results are rounded to a 2^-20 px grid, on which flip is exactly its own
/// inverse.
Point transform_point(Point p, const TransformStep& step, Shape src_shape);

/// Axis-aligned hull of the four transformed corners, clamped to the output
/// frame. nullopt when less than one square pixel remains.
std::optional<Box> transform_box(const Box& box, const TransformStep& step, Shape src_shape);

enum class Interp { Bilinear, Nearest };

Frame apply_step(const Frame& frame, const TransformStep& step, Interp interp = Interp::Bilinear);

/// Per-frame annotations carried alongside a clip.
struct FrameAnnotations {
  std::vector<Box> boxes;
  /// Identity of each surviving box: its position in the untransformed list.
  std::vector<int> box_ids;
  /// Identities of boxes removed because they left the frame.
  std::vector<int> dropped_boxes;
  std::vector<Keypoint> keypoints;
  std::optional<std::vector<WordLabel>> word_labels;
  std::optional<Frame> saliency;   // continuous map, resampled bilinearly
  std::optional<Frame> fixations;  // binary map, resampled nearest-neighbour
  friend bool operator==(const FrameAnnotations&, const FrameAnnotations&) = default;
};

struct AnnotationSet {
  std::vector<FrameAnnotations> frames;

  /// One empty annotation slot per frame.
  static AnnotationSet empty(std::size_t length);
  friend bool operator==(const AnnotationSet&, const AnnotationSet&) = default;
};

FrameAnnotations make_frame_annotations(std::vector<Box> boxes, std::vector<Keypoint> keypoints = {});

std::pair<Clip, AnnotationSet> apply_step(const Clip& clip, const AnnotationSet& ann, const TransformStep& step);

/// Runs build_steps(cfg, params, clip shape) over the clip and its
/// annotations. Throws ShapeMismatch when `ann` is not aligned with `clip`.
std::pair<Clip, AnnotationSet> apply_clip(const Clip& clip, const AnnotationSet& ann, const TransformConfig& cfg,
                                          const SampledParams& params);

using FrameFn = std::function<Frame(const Frame&)>;

/// Applies a photometric function to every frame; annotations are untouched.
Clip apply_per_frame(const Clip& clip, const FrameFn& fn);

/// Boxes, keypoints, word labels and drop records; maps are omitted.
Json annotations_to_json(const AnnotationSet& ann);

}  // namespace vippipe
