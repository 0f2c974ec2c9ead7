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

#include "vippipe/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "vippipe/error.hpp"

namespace vippipe {

namespace {

void require_same_shape(const Frame& a, const Frame& b, const char* what) {
  if (!a.same_shape(b))
    throw Error(Errc::ShapeMismatch, std::string(what) + ": maps differ in shape");
}

struct Moments {
  double mean = 0;
  double sample_std = 0;
};

Moments moments(const Frame& f) {
  const std::size_t n = f.size();
  double sum = 0;
  for (std::size_t i = 0; i < n; ++i) sum += f.flat(i);
  const double mean = sum / static_cast<double>(n);
  double ss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = f.flat(i) - mean;
    ss += d * d;
  }
  return {mean, n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0};
}

}  // namespace

double accuracy(std::span<const int> predictions, std::span<const int> labels) {
  if (predictions.empty() || labels.empty()) throw Error(Errc::EmptyInput, "accuracy of an empty sequence");
  if (predictions.size() != labels.size())
    throw Error(Errc::ShapeMismatch, std::to_string(predictions.size()) + " predictions for " +
                                         std::to_string(labels.size()) + " labels");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) correct += predictions[i] == labels[i];
  return static_cast<double>(correct) / static_cast<double>(labels.size());
}

double iou(const Box& a, const Box& b) {
  const double iw = std::min(a.xmax, b.xmax) - std::max(a.xmin, b.xmin);
  const double ih = std::min(a.ymax, b.ymax) - std::max(a.ymin, b.ymin);
  if (iw <= 0 || ih <= 0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  return uni > 0 ? inter / uni : 0.0;
}

std::optional<ApInterpolation> parse_interpolation(std::string_view name) {
  if (name == "eleven" || name == "eleven_point" || name == "11") return ApInterpolation::ElevenPoint;
  if (name == "all" || name == "all_point") return ApInterpolation::AllPoint;
  return std::nullopt;
}

double average_precision(std::span<const Detection> detections, const GroundTruth& ground_truth, int cls,
                         double iou_threshold, ApInterpolation interpolation) {
  if (!(iou_threshold > 0.0 && iou_threshold < 1.0))
    throw Error(Errc::InvalidInput, "iou_threshold must lie in (0, 1)");

  std::map<std::string, std::vector<const Box*>> gt_by_image;
  std::size_t n_positive = 0;
  for (const auto& [image, boxes] : ground_truth) {
    for (const Box& b : boxes) {
      if (b.label != cls) continue;
      gt_by_image[image].push_back(&b);
      ++n_positive;
    }
  }
  if (n_positive == 0) throw Error(Errc::NoGroundTruth, "class " + std::to_string(cls) + " has no ground truth");

  std::vector<const Detection*> ranked;
  for (const Detection& d : detections) {
    if (d.label != cls) continue;
    if (!std::isfinite(d.confidence)) throw Error(Errc::InvalidInput, "non-finite detection confidence");
    ranked.push_back(&d);
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const Detection* a, const Detection* b) { return a->confidence > b->confidence; });

  std::map<std::string, std::vector<bool>> used;
  for (const auto& [image, boxes] : gt_by_image) used[image].assign(boxes.size(), false);

  // Cumulative true-positive count after each ranked detection.
  std::vector<std::size_t> tp_cum;
  tp_cum.reserve(ranked.size());
  std::size_t tp = 0;
  for (const Detection* d : ranked) {
    auto it = gt_by_image.find(d->image_id);
    if (it != gt_by_image.end()) {
      std::vector<bool>& taken = used[d->image_id];
      int best = -1;
      double best_iou = -1.0;
      for (std::size_t g = 0; g < it->second.size(); ++g) {
        if (taken[g]) continue;
        const double o = iou(d->box, *it->second[g]);
        if (o > best_iou) {
          best_iou = o;
          best = static_cast<int>(g);
        }
      }
      if (best >= 0 && best_iou >= iou_threshold) {
        taken[best] = true;
        ++tp;
      }
    }
    tp_cum.push_back(tp);
  }

  const std::size_t n = ranked.size();
  std::vector<double> precision(n);
  std::vector<double> recall(n);
  for (std::size_t i = 0; i < n; ++i) {
    precision[i] = static_cast<double>(tp_cum[i]) / static_cast<double>(i + 1);
    recall[i] = static_cast<double>(tp_cum[i]) / static_cast<double>(n_positive);
  }

  if (interpolation == ApInterpolation::ElevenPoint) {
    double total = 0;
    for (int k = 0; k <= 10; ++k) {
      double best = 0;
      // recall >= k/10, compared in integers to avoid rounding at the knots.
      for (std::size_t i = 0; i < n; ++i)
        if (tp_cum[i] * 10 >= static_cast<std::size_t>(k) * n_positive) best = std::max(best, precision[i]);
      total += best;
    }
    return total / 11.0;
  }

  std::vector<double> mrec(n + 2);
  std::vector<double> mpre(n + 2);
  mrec.front() = 0.0;
  mrec.back() = 1.0;
  mpre.front() = 0.0;
  mpre.back() = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mrec[i + 1] = recall[i];
    mpre[i + 1] = precision[i];
  }
  for (std::size_t i = mpre.size() - 1; i > 0; --i) mpre[i - 1] = std::max(mpre[i - 1], mpre[i]);
  double ap = 0;
  for (std::size_t i = 0; i + 1 < mrec.size(); ++i)
    if (mrec[i + 1] != mrec[i]) ap += (mrec[i + 1] - mrec[i]) * mpre[i + 1];
  return ap;
}

double mean_ap(std::span<const Detection> detections, const GroundTruth& ground_truth, std::span<const int> classes,
               double iou_threshold, ApInterpolation interpolation) {
  std::set<int> present;
  for (const auto& [image, boxes] : ground_truth)
    for (const Box& b : boxes) present.insert(b.label);
  std::vector<int> wanted(classes.begin(), classes.end());
  if (wanted.empty()) wanted.assign(present.begin(), present.end());

  double sum = 0;
  int counted = 0;
  for (int cls : std::set<int>(wanted.begin(), wanted.end())) {
    if (!present.contains(cls)) continue;
    sum += average_precision(detections, ground_truth, cls, iou_threshold, interpolation);
    ++counted;
  }
  return counted ? sum / counted : 0.0;
}

double nss(const SaliencyPair& pair) {
  const Frame& pred = pair.predicted;
  const Frame& fix = pair.fixations;
  if (pred.height() != fix.height() || pred.width() != fix.width() || pred.channels() != 1 || fix.channels() != 1)
    throw Error(Errc::ShapeMismatch, "nss: prediction and fixation maps must be single-channel and equal in size");
  const Moments m = moments(pred);
  if (!(m.sample_std > 0)) throw Error(Errc::DegenerateMap, "nss: predicted map is constant");
  double sum = 0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < fix.size(); ++i) {
    if (fix.flat(i) > 0) {
      sum += (pred.flat(i) - m.mean) / m.sample_std;
      ++count;
    }
  }
  if (count == 0) throw Error(Errc::NoFixations, "nss: fixation map is empty");
  return sum / static_cast<double>(count);
}

double cc(const Frame& predicted, const Frame& ground_truth) {
  require_same_shape(predicted, ground_truth, "cc");
  const Moments a = moments(predicted);
  const Moments b = moments(ground_truth);
  if (!(a.sample_std > 0) || !(b.sample_std > 0)) throw Error(Errc::DegenerateMap, "cc: constant map");
  double cov = 0;
  const std::size_t n = predicted.size();
  for (std::size_t i = 0; i < n; ++i) cov += (predicted.flat(i) - a.mean) * (ground_truth.flat(i) - b.mean);
  cov /= static_cast<double>(n - 1);
  return std::clamp(cov / (a.sample_std * b.sample_std), -1.0, 1.0);
}

}  // namespace vippipe
