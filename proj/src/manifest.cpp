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

#include "vippipe/manifest.hpp"

#include <fstream>
#include <set>

#include "vippipe/error.hpp"
#include "vippipe/frame_io.hpp"

namespace vippipe {

namespace {

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  throw Error(Errc::SchemaError, path + ": " + what);
}

const Json& require(const Json& obj, const std::string& path, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(path + "." + key, "missing required field");
  return *it;
}

const Json& require_object(const Json& v, const std::string& path) {
  if (!v.is_object()) schema_error(path, "expected an object");
  return v;
}

const Json& require_array(const Json& v, const std::string& path) {
  if (!v.is_array()) schema_error(path, "expected an array");
  return v;
}

double as_number(const Json& v, const std::string& path) {
  if (!v.is_number()) schema_error(path, "expected a number");
  return v.get<double>();
}

std::int64_t as_integer(const Json& v, const std::string& path) {
  if (!v.is_number_integer()) schema_error(path, "expected an integer");
  return v.get<std::int64_t>();
}

std::string as_string(const Json& v, const std::string& path) {
  if (!v.is_string()) schema_error(path, "expected a string");
  return v.get<std::string>();
}

Json extras_of(const Json& obj, std::initializer_list<const char*> known) {
  Json extras = Json::object();
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool is_known = false;
    for (const char* k : known) is_known = is_known || it.key() == k;
    if (!is_known) extras[it.key()] = it.value();
  }
  return extras;
}

void merge_extras(Json& out, const Json& extras) {
  for (auto it = extras.begin(); it != extras.end(); ++it) out[it.key()] = it.value();
}

Box parse_box(const Json& v, const std::string& path) {
  require_object(v, path);
  Box b;
  b.label = static_cast<int>(as_integer(require(v, path, "label"), path + ".label"));
  if (auto it = v.find("track"); it != v.end() && !it->is_null())
    b.track = static_cast<int>(as_integer(*it, path + ".track"));
  b.xmin = as_number(require(v, path, "xmin"), path + ".xmin");
  b.ymin = as_number(require(v, path, "ymin"), path + ".ymin");
  b.xmax = as_number(require(v, path, "xmax"), path + ".xmax");
  b.ymax = as_number(require(v, path, "ymax"), path + ".ymax");
  b.extras = extras_of(v, {"label", "track", "xmin", "ymin", "xmax", "ymax"});
  return b;
}

Keypoint parse_keypoint(const Json& v, const std::string& path) {
  require_object(v, path);
  Keypoint k;
  k.x = as_number(require(v, path, "x"), path + ".x");
  k.y = as_number(require(v, path, "y"), path + ".y");
  if (auto it = v.find("visible"); it != v.end()) {
    if (!it->is_boolean()) schema_error(path + ".visible", "expected a boolean");
    k.visible = it->get<bool>();
  }
  return k;
}

FrameAnnotation parse_frame(const Json& v, const std::string& path) {
  require_object(v, path);
  FrameAnnotation f;
  f.index = as_integer(require(v, path, "index"), path + ".index");
  if (auto it = v.find("boxes"); it != v.end()) {
    require_array(*it, path + ".boxes");
    for (std::size_t i = 0; i < it->size(); ++i)
      f.boxes.push_back(parse_box((*it)[i], path + ".boxes[" + std::to_string(i) + "]"));
  }
  if (auto it = v.find("keypoints"); it != v.end()) {
    require_array(*it, path + ".keypoints");
    for (std::size_t i = 0; i < it->size(); ++i)
      f.keypoints.push_back(parse_keypoint((*it)[i], path + ".keypoints[" + std::to_string(i) + "]"));
  }
  if (auto it = v.find("saliency_map"); it != v.end() && !it->is_null())
    f.saliency_map = as_string(*it, path + ".saliency_map");
  if (auto it = v.find("fixations"); it != v.end() && !it->is_null())
    f.fixations = as_string(*it, path + ".fixations");
  if (auto it = v.find("word_labels"); it != v.end() && !it->is_null()) {
    require_array(*it, path + ".word_labels");
    std::vector<WordLabel> words;
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string wpath = path + ".word_labels[" + std::to_string(i) + "]";
      const Json& pair = (*it)[i];
      if (!pair.is_array() || pair.size() != 2) schema_error(wpath, "expected [word, box_index]");
      words.push_back({static_cast<int>(as_integer(pair[0], wpath + "[0]")),
                       static_cast<int>(as_integer(pair[1], wpath + "[1]"))});
    }
    f.word_labels = std::move(words);
  }
  f.extras = extras_of(v, {"index", "boxes", "keypoints", "saliency_map", "fixations", "word_labels"});
  return f;
}

VideoRecord parse_video(const Json& v, const std::string& path) {
  require_object(v, path);
  VideoRecord r;
  r.path = as_string(require(v, path, "path"), path + ".path");
  r.length = as_integer(require(v, path, "length"), path + ".length");
  r.width = static_cast<int>(as_integer(require(v, path, "width"), path + ".width"));
  r.height = static_cast<int>(as_integer(require(v, path, "height"), path + ".height"));
  if (auto it = v.find("action_label"); it != v.end() && !it->is_null())
    r.action_label = static_cast<int>(as_integer(*it, path + ".action_label"));
  if (auto it = v.find("split"); it != v.end()) {
    auto split = parse_split(as_string(*it, path + ".split"));
    if (!split) schema_error(path + ".split", "expected one of train, val, test");
    r.split = *split;
  }
  if (auto it = v.find("frames"); it != v.end()) {
    require_array(*it, path + ".frames");
    for (std::size_t i = 0; i < it->size(); ++i)
      r.frames.push_back(parse_frame((*it)[i], path + ".frames[" + std::to_string(i) + "]"));
  }
  r.extras = extras_of(v, {"path", "length", "width", "height", "action_label", "split", "frames"});
  return r;
}

Json box_to_json(const Box& b) {
  Json j = {{"label", b.label}, {"xmin", b.xmin}, {"ymin", b.ymin}, {"xmax", b.xmax}, {"ymax", b.ymax}};
  if (b.track) j["track"] = *b.track;
  merge_extras(j, b.extras);
  return j;
}

Json frame_to_json(const FrameAnnotation& f) {
  Json j = {{"index", f.index}};
  Json boxes = Json::array();
  for (const Box& b : f.boxes) boxes.push_back(box_to_json(b));
  j["boxes"] = std::move(boxes);
  Json kps = Json::array();
  for (const Keypoint& k : f.keypoints) kps.push_back({{"x", k.x}, {"y", k.y}, {"visible", k.visible}});
  j["keypoints"] = std::move(kps);
  if (f.saliency_map) j["saliency_map"] = *f.saliency_map;
  if (f.fixations) j["fixations"] = *f.fixations;
  if (f.word_labels) {
    Json words = Json::array();
    for (const WordLabel& w : *f.word_labels) words.push_back({w.word, w.box});
    j["word_labels"] = std::move(words);
  }
  merge_extras(j, f.extras);
  return j;
}

bool frame_file_exists(const std::filesystem::path& dir, std::int64_t index) {
  return std::filesystem::exists(dir / frame_filename(index, false)) ||
         std::filesystem::exists(dir / frame_filename(index, true));
}

}  // namespace

std::string to_string(Split split) {
  switch (split) {
    case Split::Train: return "train";
    case Split::Val: return "val";
    case Split::Test: return "test";
  }
  return "train";
}

std::optional<Split> parse_split(std::string_view name) {
  if (name == "train") return Split::Train;
  if (name == "val") return Split::Val;
  if (name == "test") return Split::Test;
  return std::nullopt;
}

const FrameAnnotation* VideoRecord::annotation(std::int64_t index) const {
  for (const FrameAnnotation& f : frames)
    if (f.index == index) return &f;
  return nullptr;
}

std::filesystem::path DatasetManifest::resolve(const std::string& path) const {
  std::filesystem::path p(path);
  if (p.is_absolute() || base_dir.empty()) return p;
  return base_dir / p;
}

DatasetManifest manifest_from_json(const Json& doc, std::filesystem::path base_dir) {
  if (!doc.is_object()) schema_error("$", "expected an object with a \"videos\" array");
  DatasetManifest m;
  m.base_dir = std::move(base_dir);
  const Json& videos = require_array(require(doc, "$", "videos"), "videos");
  for (std::size_t i = 0; i < videos.size(); ++i)
    m.videos.push_back(parse_video(videos[i], "videos[" + std::to_string(i) + "]"));
  m.extras = extras_of(doc, {"videos"});
  return m;
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open manifest " + path.string());
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(Errc::ParseError, path.string() + ": " + e.what());
  }
  return manifest_from_json(doc, path.parent_path());
}

Json manifest_to_json(const DatasetManifest& m) {
  Json videos = Json::array();
  for (const VideoRecord& r : m.videos) {
    Json j = {{"path", r.path}, {"length", r.length}, {"width", r.width},
              {"height", r.height}, {"split", to_string(r.split)}};
    if (r.action_label) j["action_label"] = *r.action_label;
    Json frames = Json::array();
    for (const FrameAnnotation& f : r.frames) frames.push_back(frame_to_json(f));
    j["frames"] = std::move(frames);
    merge_extras(j, r.extras);
    videos.push_back(std::move(j));
  }
  Json doc = {{"videos", std::move(videos)}};
  merge_extras(doc, m.extras);
  return doc;
}

void write_manifest(const std::filesystem::path& path, const DatasetManifest& m) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(Errc::IoError, "cannot write manifest " + path.string());
  out << manifest_to_json(m).dump(1) << "\n";
}

Json ValidationReport::to_json() const {
  Json list = Json::array();
  for (const Violation& v : violations) list.push_back({{"path", v.path}, {"message", v.message}});
  return {{"valid", ok()}, {"violations", std::move(list)}};
}

ValidationReport validate_manifest(const DatasetManifest& m, bool check_files) {
  ValidationReport report;
  auto add = [&](std::string path, std::string message) {
    report.violations.push_back({std::move(path), std::move(message)});
  };
  if (m.videos.empty()) add("videos", "empty manifest");
  std::set<std::string> seen;
  for (std::size_t vi = 0; vi < m.videos.size(); ++vi) {
    const VideoRecord& r = m.videos[vi];
    const std::string vpath = "videos[" + std::to_string(vi) + "]";
    if (!seen.insert(r.path).second) add(vpath + ".path", "duplicate video path");
    if (r.length < 1) add(vpath + ".length", "length < 1");
    if (r.width < 1 || r.height < 1) add(vpath, "non-positive frame size");
    if (r.action_label && *r.action_label < 0) add(vpath + ".action_label", "negative class id");
    std::set<std::int64_t> indices;
    for (std::size_t fi = 0; fi < r.frames.size(); ++fi) {
      const FrameAnnotation& f = r.frames[fi];
      const std::string fpath = vpath + ".frames[" + std::to_string(fi) + "]";
      if (f.index < 0 || f.index >= r.length) add(fpath + ".index", "index out of range");
      if (!indices.insert(f.index).second) add(fpath + ".index", "duplicate frame annotation");
      for (std::size_t bi = 0; bi < f.boxes.size(); ++bi) {
        const Box& b = f.boxes[bi];
        const std::string bpath = fpath + ".boxes[" + std::to_string(bi) + "]";
        if (!(b.xmin < b.xmax) || !(b.ymin < b.ymax)) {
          add(bpath, "degenerate box");
        } else if (b.xmin < 0 || b.ymin < 0 || b.xmax > r.width || b.ymax > r.height) {
          add(bpath, "box outside frame");
        }
      }
      for (std::size_t ki = 0; ki < f.keypoints.size(); ++ki) {
        const Keypoint& k = f.keypoints[ki];
        if (k.x < 0 || k.y < 0 || k.x > r.width || k.y > r.height)
          add(fpath + ".keypoints[" + std::to_string(ki) + "]", "keypoint outside frame");
      }
      if (f.word_labels) {
        for (std::size_t wi = 0; wi < f.word_labels->size(); ++wi) {
          const int box = (*f.word_labels)[wi].box;
          if (box < 0 || box >= static_cast<int>(f.boxes.size()))
            add(fpath + ".word_labels[" + std::to_string(wi) + "]", "word label refers to missing box");
        }
      }
      if (check_files) {
        if (f.saliency_map && !std::filesystem::exists(m.resolve(*f.saliency_map)))
          add(fpath + ".saliency_map", "missing file " + *f.saliency_map);
        if (f.fixations && !std::filesystem::exists(m.resolve(*f.fixations)))
          add(fpath + ".fixations", "missing file " + *f.fixations);
      }
    }
    if (check_files) {
      const std::filesystem::path dir = m.resolve(r.path);
      if (!std::filesystem::is_directory(dir)) {
        add(vpath + ".path", "missing frame directory " + r.path);
      } else {
        for (std::int64_t i = 0; i < r.length; ++i) {
          if (!frame_file_exists(dir, i)) {
            add(vpath + ".path", "missing frame file " + frame_filename(i));
            break;
          }
        }
      }
    }
  }
  return report;
}

}  // namespace vippipe
