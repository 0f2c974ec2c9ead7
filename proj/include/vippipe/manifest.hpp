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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace vippipe {

using Json = nlohmann::json;

// Dataset manifest schema. One document describes every annotation kind:
//
//   {"videos": [{"path": "videos/v0", "length": 24, "width": 64, "height": 48,
//                "split": "train", "action_label": 2,
//                "frames": [{"index": 0,
//                            "boxes": [{"label": 2, "track": 0, "xmin": 1.5, ...}],
//                            "keypoints": [{"x": 4, "y": 5, "visible": true}],
//                            "saliency_map": "videos/v0/saliency/000000.pgm",
//                            "fixations": "videos/v0/fixations/000000.pgm",
//                            "word_labels": [[7, 0]]}]}]}
//
// Keys outside the schema are kept in `extras` and written back unchanged.

struct Box {
  int label = 0;
  std::optional<int> track;
  double xmin = 0, ymin = 0, xmax = 0, ymax = 0;
  Json extras = Json::object();

  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
  double area() const { return width() * height(); }
  friend bool operator==(const Box&, const Box&) = default;
};

struct Keypoint {
  double x = 0, y = 0;
  bool visible = true;
  friend bool operator==(const Keypoint&, const Keypoint&) = default;
};

/// Grounding annotation: a word id aligned to one of the frame's boxes.
struct WordLabel {
  int word = 0;
  int box = 0;
  friend bool operator==(const WordLabel&, const WordLabel&) = default;
};

struct FrameAnnotation {
  std::int64_t index = 0;
  std::vector<Box> boxes;
  std::vector<Keypoint> keypoints;
  std::optional<std::string> saliency_map;
  std::optional<std::string> fixations;
  std::optional<std::vector<WordLabel>> word_labels;
  Json extras = Json::object();
  friend bool operator==(const FrameAnnotation&, const FrameAnnotation&) = default;
};

enum class Split { Train, Val, Test };

std::string to_string(Split split);
std::optional<Split> parse_split(std::string_view name);

struct VideoRecord {
  std::string path;
  std::int64_t length = 0;
  int width = 0;
  int height = 0;
  std::optional<int> action_label;
  std::vector<FrameAnnotation> frames;
  Split split = Split::Train;
  Json extras = Json::object();

  /// Annotation for `index`, or nullptr when the frame is unannotated.
  const FrameAnnotation* annotation(std::int64_t index) const;
  friend bool operator==(const VideoRecord&, const VideoRecord&) = default;
};

struct DatasetManifest {
  std::vector<VideoRecord> videos;
  Json extras = Json::object();
  /// Directory relative paths resolve against; not serialized.
  std::filesystem::path base_dir;

  std::filesystem::path resolve(const std::string& path) const;
  friend bool operator==(const DatasetManifest& a, const DatasetManifest& b) {
    return a.videos == b.videos && a.extras == b.extras;
  }
};

/// Throws ParseError on malformed JSON and SchemaError (with the offending
/// field path, e.g. "videos[0].length") on missing or mistyped fields.
DatasetManifest load_manifest(const std::filesystem::path& path);
DatasetManifest manifest_from_json(const Json& doc, std::filesystem::path base_dir = {});
Json manifest_to_json(const DatasetManifest& manifest);
void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);

struct Violation {
  std::string path;
  std::string message;
  friend bool operator==(const Violation&, const Violation&) = default;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  Json to_json() const;
};

ValidationReport validate_manifest(const DatasetManifest& manifest, bool check_files);

struct SynthSpec {
  int n_videos = 3;       // training videos
  int n_val_videos = 0;   // validation videos, appended after training ones
  int length_min = 16;
  int length_max = 32;
  int height = 48;
  int width = 64;
  int n_classes = 3;
  std::uint64_t seed = 0;
};

/// Writes videos of a coloured square moving over a noisy background.
/// The square's colour encodes the action class; each frame carries the
/// square's box, a centre keypoint, a fixation map at the centre and a
/// Gaussian saliency map. Output is a pure function of `spec`.
DatasetManifest generate_synthetic_dataset(const SynthSpec& spec, const std::filesystem::path& out_dir);

}  // namespace vippipe
