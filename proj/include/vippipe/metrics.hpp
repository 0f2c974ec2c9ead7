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

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vippipe/frame_io.hpp"
#include "vippipe/manifest.hpp"

namespace vippipe {

/// Fraction of positions where prediction equals label.
/// Throws EmptyInput on empty input, ShapeMismatch on unequal lengths.
double accuracy(std::span<const int> predictions, std::span<const int> labels);

/// Intersection over union of two boxes; 0 for disjoint boxes.
double iou(const Box& a, const Box& b);

struct Detection {
  std::string image_id;
  int label = 0;
  Box box;
  double confidence = 0.0;
};

/// Ground-truth boxes keyed by image id. Box::label carries the class.
using GroundTruth = std::map<std::string, std::vector<Box>>;

enum class ApInterpolation { ElevenPoint, AllPoint };

std::optional<ApInterpolation> parse_interpolation(std::string_view name);

/// Area under the interpolated precision/recall curve for one class.
///
/// Detections are ranked by descending confidence (stable for ties). Each one
/// claims the still-unmatched ground-truth box in its image with the highest
/// IoU, lower index winning ties; it counts as a true positive when that IoU
/// reaches `iou_threshold`. ElevenPoint averages the best precision at recall
/// >= 0, 0.1, ..., 1; AllPoint integrates the monotone precision envelope.
///
/// Throws NoGroundTruth when the class has no ground-truth boxes.
double average_precision(std::span<const Detection> detections, const GroundTruth& ground_truth, int cls,
                         double iou_threshold, ApInterpolation interpolation = ApInterpolation::ElevenPoint);

/// Unweighted mean of average_precision over the listed classes that have
/// ground truth. An empty class list means every class present in
/// `ground_truth`. Returns 0 when no listed class has ground truth.
double mean_ap(std::span<const Detection> detections, const GroundTruth& ground_truth, std::span<const int> classes,
               double iou_threshold, ApInterpolation interpolation = ApInterpolation::ElevenPoint);

struct SaliencyPair {
  Frame predicted;
  Frame fixations;  // non-zero marks a fixation
  std::optional<Frame> gt_continuous;
};

/// Normalized scanpath saliency: the predicted map is z-scored with the
/// sample (N-1) standard deviation and averaged over fixation pixels.
/// Throws DegenerateMap for a constant map, NoFixations for an empty
/// fixation map and ShapeMismatch when shapes differ.
double nss(const SaliencyPair& pair);

/// Pearson correlation between two maps of equal shape.
/// Throws DegenerateMap when either map is constant.
double cc(const Frame& predicted, const Frame& ground_truth);

}  // namespace vippipe
