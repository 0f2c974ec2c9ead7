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

#include "vippipe/cli.hpp"

#include <algorithm>
#include <regex>
#include <fstream>
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "vippipe/clip_sampler.hpp"
#include "vippipe/config.hpp"
#include "vippipe/dataset.hpp"
#include "vippipe/engine.hpp"
#include "vippipe/error.hpp"
#include "vippipe/frame_io.hpp"
#include "vippipe/manifest.hpp"
#include "vippipe/metrics.hpp"

namespace vippipe {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string image_id(const VideoRecord& v, std::int64_t index) { return v.path + "#" + std::to_string(index); }

Json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(Errc::ParseError, path.string() + ": " + e.what());
  }
}

std::string pad6(std::size_t i) {
  std::string s = std::to_string(i);
  return std::string(s.size() < 6 ? 6 - s.size() : 0, '0') + s;
}

// --- validate -------------------------------------------------------------

struct ValidateArgs {
  std::string manifest;
  bool check_files = false;
  bool json = false;
};

int run_validate(const ValidateArgs& a, std::ostream& out) {
  const DatasetManifest m = load_manifest(a.manifest);
  const ValidationReport report = validate_manifest(m, a.check_files);
  if (a.json) {
    out << report.to_json().dump() << "\n";
  } else {
    for (const Violation& v : report.violations) out << v.path << ": " << v.message << "\n";
  }
  return report.ok() ? 0 : 1;
}

// --- synth ----------------------------------------------------------------

struct SynthArgs {
  SynthSpec spec;
  std::string out_dir;
  bool json = false;
};

int run_synth(const SynthArgs& a, std::ostream& out) {
  const DatasetManifest m = generate_synthetic_dataset(a.spec, a.out_dir);
  const std::filesystem::path manifest = std::filesystem::path(a.out_dir) / "manifest.json";
  if (a.json) {
    out << Json{{"manifest", manifest.string()}, {"videos", m.videos.size()}}.dump() << "\n";
  } else {
    out << manifest.string() << "\n";
  }
  return 0;
}

// --- plan -----------------------------------------------------------------

struct PlanArgs {
  std::string manifest;
  ClipConfig clip;
  std::string mode = "contiguous";
  std::uint64_t seed = 0;
  bool json = false;
};

int run_plan(PlanArgs a, std::ostream& out) {
  auto mode = parse_clip_mode(a.mode);
  if (!mode) throw UsageError("--mode must be contiguous or uniform");
  a.clip.mode = *mode;
  const DatasetManifest m = load_manifest(a.manifest);
  Json videos = Json::array();
  for (std::size_t v = 0; v < m.videos.size(); ++v) {
    const ClipPlan plan = plan_clips(m.videos[v].length, a.clip, plan_seed(a.seed, 0, v));
    if (a.json) {
      videos.push_back({{"path", m.videos[v].path}, {"clips", plan.clips}});
    } else {
      for (const auto& clip : plan.clips) out << Json(clip).dump() << "\n";
    }
  }
  if (a.json) out << Json{{"videos", std::move(videos)}}.dump() << "\n";
  return 0;
}

// --- preprocess / dump ----------------------------------------------------

struct DatasetArgs {
  std::string manifest;
  std::string config;
  std::string split;
  std::string out;
  std::size_t item = 0;
  std::string inspect;
  bool json = false;
};

Split resolve_split(const DatasetArgs& a, const RunConfig& cfg) {
  if (a.split.empty()) return cfg.load_type;
  auto s = parse_split(a.split);
  if (!s) throw UsageError("--split must be train, val or test");
  return *s;
}

Json item_json(const LoadedClip& lc, const DatasetManifest& m) {
  Json j = annotations_to_json(lc.annotations);
  j["video"] = m.videos[lc.item.video].path;
  j["clip"] = lc.item.clip;
  j["indices"] = lc.item.indices;
  if (lc.label) j["label"] = *lc.label;
  j["params"] = {{"crop_x", lc.params.crop_x},
                 {"crop_y", lc.params.crop_y},
                 {"flip", lc.params.flip_applied},
                 {"rotation", lc.params.rotation}};
  return j;
}

std::optional<Clip> map_clip(const AnnotationSet& ann, bool saliency) {
  std::vector<Frame> frames;
  for (const FrameAnnotations& fa : ann.frames) {
    const auto& map = saliency ? fa.saliency : fa.fixations;
    if (!map) return std::nullopt;
    frames.push_back(*map);
  }
  if (frames.empty()) return std::nullopt;
  return Clip(std::move(frames));
}

int run_preprocess(const DatasetArgs& a, std::ostream& out) {
  const RunConfig cfg = load_config(a.config);
  const DatasetManifest m = load_manifest(a.manifest);
  const ClipDataset ds(m, cfg, resolve_split(a, cfg), 0);
  const std::filesystem::path dir(a.out);
  std::filesystem::create_directories(dir);
  OrderedLoader<LoadedClip> loader(ds.size(), cfg.num_workers, 4 * static_cast<std::size_t>(cfg.num_workers),
                                   [&](std::size_t i) { return ds.load(i); });
  Json index = Json::array();
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const LoadedClip lc = loader.next();
    const std::string stem = pad6(i);
    write_file(dir / (stem + ".vipc"), encode_clip_dump(lc.clip));
    if (auto sal = map_clip(lc.annotations, true)) write_file(dir / (stem + ".saliency.vipc"), encode_clip_dump(*sal));
    if (auto fix = map_clip(lc.annotations, false)) write_file(dir / (stem + ".fixations.vipc"), encode_clip_dump(*fix));
    std::ofstream(dir / (stem + ".json"), std::ios::trunc) << item_json(lc, m).dump(1) << "\n";
    index.push_back({{"item", i}, {"video", m.videos[lc.item.video].path}, {"clip", lc.item.clip}});
  }
  std::ofstream(dir / "index.json", std::ios::trunc) << index.dump(1) << "\n";
  if (a.json) {
    out << Json{{"out", dir.string()}, {"items", ds.size()}}.dump() << "\n";
  } else {
    out << ds.size() << " clips written to " << dir.string() << "\n";
  }
  return 0;
}

int run_dump(const DatasetArgs& a, std::ostream& out) {
  if (!a.inspect.empty()) {
    const Clip clip = decode_clip_dump(read_file(a.inspect));
    out << Json{{"length", clip.length()},
                {"height", clip.height()},
                {"width", clip.width()},
                {"channels", clip.channels()},
                {"sample_type", clip.frames.front().is_float() ? "f32" : "u8"}}
               .dump()
        << "\n";
    return 0;
  }
  if (a.manifest.empty() || a.config.empty() || a.out.empty())
    throw UsageError("dump needs --manifest, --config and --out (or --inspect FILE)");
  const RunConfig cfg = load_config(a.config);
  const DatasetManifest m = load_manifest(a.manifest);
  const ClipDataset ds(m, cfg, resolve_split(a, cfg), 0);
  if (a.item >= ds.size())
    throw Error(Errc::InvalidInput, "item " + std::to_string(a.item) + " out of range (" + std::to_string(ds.size()) +
                                        " clips)");
  const LoadedClip lc = ds.load(a.item);
  write_file(a.out, encode_clip_dump(lc.clip));
  const Json ann = item_json(lc, m);
  std::ofstream(a.out + ".json", std::ios::trunc) << ann.dump(1) << "\n";
  if (a.json) {
    out << Json{{"out", a.out}, {"item", a.item}, {"annotations", ann}}.dump() << "\n";
  } else {
    out << a.out << "\n";
  }
  return 0;
}

// --- train / eval ---------------------------------------------------------

struct TrainArgs {
  std::string config;
  bool json = false;
};

int run_train(const TrainArgs& a, const std::vector<std::string>& extra, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = load_config(a.config, overrides_from_flags(extra));
  const DatasetManifest m = load_manifest(manifest_path(cfg));
  const TrainResult r = train(cfg, m);
  for (const std::string& w : r.warnings) err << "warning: " << w << "\n";
  if (a.json) {
    out << Json{{"run_dir", r.run_dir.string()},
                {"param_digest", r.param_digest},
                {"final_epoch", r.final_epoch},
                {"epoch_losses", r.epoch_losses}}
               .dump()
        << "\n";
  } else {
    out << r.run_dir.string() << "\n";
  }
  return 0;
}

struct EvalArgs {
  std::string config;
  std::string pretrained;
  std::string metric;
  std::string pred;
  std::string gt;
  double iou_threshold = 0.5;
  std::string interp = "eleven";
  bool json = false;
};

GroundTruth ground_truth_boxes(const DatasetManifest& m) {
  GroundTruth gt;
  for (const VideoRecord& v : m.videos)
    for (const FrameAnnotation& f : v.frames)
      if (!f.boxes.empty()) gt[image_id(v, f.index)] = f.boxes;
  return gt;
}

double eval_metric_file(const EvalArgs& a, std::size_t& count) {
  const DatasetManifest m = load_manifest(a.gt);
  const std::filesystem::path pred_path(a.pred);
  const Json pred = load_json_file(pred_path);
  if (!pred.is_array()) throw Error(Errc::SchemaError, a.pred + ": expected a JSON array");
  const std::string metric = a.metric;

  if (metric == "accuracy") {
    std::vector<int> predictions;
    std::vector<int> labels;
    std::map<std::string, int> by_path;
    for (const VideoRecord& v : m.videos)
      if (v.action_label) by_path[v.path] = *v.action_label;
    if (!pred.empty() && pred.front().is_number_integer()) {
      std::vector<int> gt_labels;
      for (const VideoRecord& v : m.videos)
        if (v.action_label) gt_labels.push_back(*v.action_label);
      predictions = pred.get<std::vector<int>>();
      labels = gt_labels;
    } else {
      for (const Json& p : pred) {
        const std::string path = p.at("path").get<std::string>();
        auto it = by_path.find(path);
        if (it == by_path.end()) throw Error(Errc::InvalidInput, "no labelled video '" + path + "' in " + a.gt);
        predictions.push_back(p.at("label").get<int>());
        labels.push_back(it->second);
      }
    }
    count = predictions.size();
    return accuracy(predictions, labels);
  }

  if (metric == "ap" || metric == "map") {
    auto interp = parse_interpolation(a.interp);
    if (!interp) throw UsageError("--interp must be eleven or all");
    std::vector<Detection> dets;
    for (const Json& d : pred) {
      Detection det;
      det.image_id = d.at("image_id").get<std::string>();
      det.label = d.at("label").get<int>();
      det.box = {det.label, std::nullopt, d.at("xmin").get<double>(), d.at("ymin").get<double>(),
                 d.at("xmax").get<double>(), d.at("ymax").get<double>(), Json::object()};
      det.confidence = d.at("confidence").get<double>();
      dets.push_back(std::move(det));
    }
    count = dets.size();
    const GroundTruth gt = ground_truth_boxes(m);
    if (metric == "map") return mean_ap(dets, gt, {}, a.iou_threshold, *interp);
    std::set<int> classes;
    for (const auto& [id, boxes] : gt)
      for (const Box& b : boxes) classes.insert(b.label);
    if (classes.size() != 1)
      throw UsageError("--metric ap needs ground truth with exactly one class; use map for several");
    return average_precision(dets, gt, *classes.begin(), a.iou_threshold, *interp);
  }

  // nss / cc: entries {"image_id": "<video path>#<index>", "map": "<pgm path>"}
  std::map<std::string, const FrameAnnotation*> frames;
  for (const VideoRecord& v : m.videos)
    for (const FrameAnnotation& f : v.frames) frames[image_id(v, f.index)] = &f;
  double sum = 0;
  for (const Json& p : pred) {
    const std::string id = p.at("image_id").get<std::string>();
    auto it = frames.find(id);
    if (it == frames.end()) throw Error(Errc::InvalidInput, "no annotated frame '" + id + "' in " + a.gt);
    std::filesystem::path map_path(p.at("map").get<std::string>());
    if (map_path.is_relative()) map_path = pred_path.parent_path() / map_path;
    const Frame predicted = read_image(map_path);
    if (metric == "nss") {
      if (!it->second->fixations) throw Error(Errc::NoFixations, id + " has no fixation map");
      sum += nss({predicted, read_image(m.resolve(*it->second->fixations)), std::nullopt});
    } else {
      if (!it->second->saliency_map) throw Error(Errc::InvalidInput, id + " has no saliency map");
      sum += cc(predicted, read_image(m.resolve(*it->second->saliency_map)));
    }
  }
  count = pred.size();
  if (count == 0) throw Error(Errc::EmptyInput, a.pred + " lists no maps");
  return sum / static_cast<double>(count);
}

int run_eval(EvalArgs a, const std::vector<std::string>& extra, std::ostream& out) {
  if (!a.config.empty()) {
    std::vector<std::string> overrides = overrides_from_flags(extra);
    if (!a.metric.empty()) overrides.push_back("acc_metric=" + a.metric);
    const RunConfig cfg = load_config(a.config, overrides);
    const DatasetManifest m = load_manifest(a.gt.empty() ? manifest_path(cfg) : std::filesystem::path(a.gt));
    const PretrainedSpec weights = a.pretrained.empty() ? cfg.pretrained : PretrainedSpec::parse(a.pretrained);
    const EvalReport r = evaluate(cfg, m, weights);
    if (a.json) {
      Json j = r.to_json();
      j["report"] = r.report_path.string();
      out << j.dump() << "\n";
    } else {
      out << r.metric << ": " << Json(r.value).dump() << "\n";
    }
    return 0;
  }
  if (!extra.empty()) throw UsageError("unexpected arguments without --config: " + extra.front());
  if (a.metric.empty() || a.pred.empty() || a.gt.empty())
    throw UsageError("eval needs --config C, or --metric M --pred FILE --gt MANIFEST");
  std::transform(a.metric.begin(), a.metric.end(), a.metric.begin(), [](unsigned char c) { return std::tolower(c); });
  static const std::vector<std::string> metrics = {"accuracy", "ap", "map", "nss", "cc"};
  if (std::find(metrics.begin(), metrics.end(), a.metric) == metrics.end())
    throw Error(Errc::UnknownMetric, "'" + a.metric + "' (expected accuracy, ap, map, nss or cc)");
  std::size_t count = 0;
  const double value = eval_metric_file(a, count);
  if (a.json) {
    out << Json{{"metric", a.metric}, {"value", value}, {"count", count}}.dump() << "\n";
  } else {
    out << a.metric << ": " << Json(value).dump() << "\n";
  }
  return 0;
}

}  // namespace

std::vector<std::string> overrides_from_flags(const std::vector<std::string>& tokens) {
  // `name=value` after a bare flag is its own override, not the flag's value.
  static const std::regex assignment("^[A-Za-z_][A-Za-z0-9_]*=.*");
  auto is_value = [&](const std::string& tok) { return tok.rfind("--", 0) != 0 && !std::regex_match(tok, assignment); };
  std::vector<std::string> out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    std::string t = tokens[i];
    if (t.rfind("--", 0) != 0) {
      if (t.find('=') == std::string::npos) throw Error(Errc::UnknownOverride, "stray argument '" + t + "'");
      out.push_back(t);
      continue;
    }
    t = t.substr(2);
    std::replace(t.begin(), t.end(), '-', '_');
    if (t.find('=') != std::string::npos) {
      out.push_back(t);
    } else if (i + 1 < tokens.size() && is_value(tokens[i + 1])) {
      out.push_back(t + "=" + tokens[++i]);
    } else {
      out.push_back(t + "=1");
    }
  }
  return out;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"vippipe: video clip pipeline, metrics and micro-model experiment engine", "vippipe"};
  app.set_version_flag("--version", std::string(VIPPIPE_VERSION));
  app.require_subcommand(1);

  ValidateArgs va;
  auto* validate = app.add_subcommand("validate", "Check a dataset manifest");
  validate->add_option("manifest", va.manifest, "Manifest JSON file")->required();
  validate->add_flag("--check-files", va.check_files, "Also verify referenced frame and map files exist");
  validate->add_flag("--json", va.json, "Emit one JSON document");

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic moving-square dataset");
  synth->add_option("--seed", sa.spec.seed, "Random seed")->capture_default_str();
  synth->add_option("--videos", sa.spec.n_videos, "Training videos")->capture_default_str();
  synth->add_option("--val-videos", sa.spec.n_val_videos, "Validation videos")->capture_default_str();
  synth->add_option("--classes", sa.spec.n_classes, "Action classes")->capture_default_str();
  synth->add_option("--length-min", sa.spec.length_min, "Shortest video in frames")->capture_default_str();
  synth->add_option("--length-max", sa.spec.length_max, "Longest video in frames")->capture_default_str();
  synth->add_option("--height", sa.spec.height, "Frame height")->capture_default_str();
  synth->add_option("--width", sa.spec.width, "Frame width")->capture_default_str();
  synth->add_option("--out", sa.out_dir, "Output directory")->required();
  synth->add_flag("--json", sa.json, "Emit one JSON document");

  PlanArgs pa;
  auto* plan = app.add_subcommand("plan", "Print the clip plan of every video in a manifest");
  plan->add_option("--manifest", pa.manifest, "Manifest JSON file")->required();
  plan->add_option("--clip-length", pa.clip.clip_length, "Frames per clip, -1 for whole video")->capture_default_str();
  plan->add_option("--num-clips", pa.clip.num_clips, "-1 all, 0 whole video, n exactly n")->capture_default_str();
  plan->add_option("--clip-stride", pa.clip.clip_stride, "Frames between clips (negative overlaps)")
      ->capture_default_str();
  plan->add_option("--clip-offset", pa.clip.clip_offset, "First usable frame")->capture_default_str();
  plan->add_flag("--random-offset", pa.clip.random_offset, "Draw the offset at random");
  plan->add_option("--mode", pa.mode, "contiguous or uniform")->capture_default_str();
  plan->add_option("--seed", pa.seed, "Seed for --random-offset")->capture_default_str();
  plan->add_flag("--json", pa.json, "Emit one JSON document");

  DatasetArgs pre;
  auto* preprocess = app.add_subcommand("preprocess", "Write transformed clips as VIPC dumps with JSON annotations");
  preprocess->add_option("--manifest", pre.manifest, "Manifest JSON file")->required();
  preprocess->add_option("--config", pre.config, "YAML run config")->required();
  preprocess->add_option("--out", pre.out, "Output directory")->required();
  preprocess->add_option("--split", pre.split, "train, val or test (default: config load_type)");
  preprocess->add_flag("--json", pre.json, "Emit one JSON document");

  DatasetArgs da;
  auto* dump = app.add_subcommand("dump", "Write one transformed clip as a VIPC dump, or inspect a dump");
  dump->add_option("--manifest", da.manifest, "Manifest JSON file");
  dump->add_option("--config", da.config, "YAML run config");
  dump->add_option("--item", da.item, "Clip index in dataset order")->capture_default_str();
  dump->add_option("--split", da.split, "train, val or test (default: config load_type)");
  dump->add_option("--out", da.out, "Output .vipc file (annotations go to <out>.json)");
  dump->add_option("--inspect", da.inspect, "Print the header of an existing dump");
  dump->add_flag("--json", da.json, "Emit one JSON document");

  TrainArgs ta;
  auto* train_cmd = app.add_subcommand("train", "Train a micro-model; extra --key value pairs override the config");
  train_cmd->add_option("--config", ta.config, "YAML run config")->required();
  train_cmd->add_flag("--json", ta.json, "Emit one JSON document");
  train_cmd->allow_extras();

  EvalArgs ea;
  auto* eval = app.add_subcommand("eval", "Evaluate a model (--config) or score a prediction file (--metric)");
  eval->add_option("--config", ea.config, "YAML run config");
  eval->add_option("--pretrained", ea.pretrained, "0, 1 or checkpoint path (overrides the config)");
  eval->add_option("--metric", ea.metric, "accuracy, ap, map, nss or cc");
  eval->add_option("--pred", ea.pred, "Prediction JSON file");
  eval->add_option("--gt", ea.gt, "Ground-truth manifest");
  eval->add_option("--iou-threshold", ea.iou_threshold, "IoU needed for a true positive")->capture_default_str();
  eval->add_option("--interp", ea.interp, "AP interpolation: eleven or all")->capture_default_str();
  eval->add_flag("--json", ea.json, "Emit one JSON document");
  eval->allow_extras();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*validate) return run_validate(va, out);
    if (*synth) return run_synth(sa, out);
    if (*plan) return run_plan(pa, out);
    if (*preprocess) return run_preprocess(pre, out);
    if (*dump) return run_dump(da, out);
    if (*train_cmd) return run_train(ta, train_cmd->remaining(), out, err);
    if (*eval) return run_eval(ea, eval->remaining(), out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.code() == Errc::UnknownOverride ? 2 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace vippipe
