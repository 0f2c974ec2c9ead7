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

#include "vippipe/engine.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <ctime>
#include <fstream>
#include <numeric>

#include "vippipe/error.hpp"
#include "vippipe/metrics.hpp"
#include "vippipe/random.hpp"

namespace vippipe {

namespace {

constexpr std::uint64_t kShuffleStream = 0x5AFF1E;

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  localtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%d-%H%M%S", &tm);
  return buf;
}

class ScalarLog {
 public:
  explicit ScalarLog(const std::filesystem::path& dir)
      : jsonl_(dir / "logs.jsonl", std::ios::app), csv_path_(dir / "logs.csv") {
    if (!jsonl_) throw Error(Errc::IoError, "cannot open " + (dir / "logs.jsonl").string());
  }

  void append(Json record) {
    jsonl_ << record.dump() << "\n";
    jsonl_.flush();
    records_.push_back(std::move(record));
  }

  void write_csv() const {
    std::ofstream csv(csv_path_, std::ios::trunc);
    csv << "type,epoch,step,loss,lr,samples\n";
    for (const Json& r : records_) {
      const std::string type = r.value("type", "");
      if (type != "step" && type != "epoch") continue;
      csv << type << "," << r.value("epoch", 0) << "," << r.value("step", 0) << "," << r.at("loss").dump() << ","
          << r.at("lr").dump() << "," << r.value("samples", 0) << "\n";
    }
  }

 private:
  std::ofstream jsonl_;
  std::filesystem::path csv_path_;
  std::vector<Json> records_;
};

void check_loss(const RunConfig& cfg) {
  const std::string loss = lower(cfg.loss_type);
  const bool regressor = cfg.model == "linear_regressor";
  if (regressor && loss != "mse")
    throw Error(Errc::InvalidConfig, "linear_regressor trains with loss_type MSE, not " + cfg.loss_type);
  if (!regressor && loss != "m_xentropy")
    throw Error(Errc::InvalidConfig, cfg.model + " trains with loss_type M_XENTROPY, not " + cfg.loss_type);
}

Sample to_sample(const LoadedClip& lc) {
  if (!lc.label) throw Error(Errc::InvalidInput, "video " + std::to_string(lc.item.video) + " has no action_label");
  return {clip_features(lc.clip, lc.annotations), static_cast<double>(*lc.label)};
}

std::size_t prefetch_window(const RunConfig& cfg) {
  return std::max<std::size_t>(static_cast<std::size_t>(4 * cfg.num_workers),
                               static_cast<std::size_t>(cfg.batch_size) * cfg.pseudo_batch_loop);
}

}  // namespace

std::filesystem::path create_run_dir(const RunConfig& cfg) {
  const std::filesystem::path base = std::filesystem::path(cfg.save_dir) / cfg.exp;
  std::error_code ec;
  if (cfg.rerun == 0 && std::filesystem::is_directory(base)) {
    for (const auto& entry : std::filesystem::directory_iterator(base))
      if (entry.is_directory())
        throw Error(Errc::RunExists, base.string() + " already holds run " + entry.path().filename().string() +
                                         "; set rerun: 1 or resume from a checkpoint");
  }
  std::filesystem::create_directories(base, ec);
  if (ec) throw Error(Errc::IoError, "cannot create " + base.string() + ": " + ec.message());
  const std::string stamp = timestamp();
  for (int k = 0;; ++k) {
    const std::filesystem::path dir = base / (k == 0 ? stamp : stamp + "-" + std::to_string(k));
    if (std::filesystem::create_directory(dir, ec)) {
      std::filesystem::create_directories(dir / "checkpoints");
      return dir;
    }
    if (ec) throw Error(Errc::IoError, "cannot create " + dir.string() + ": " + ec.message());
  }
}

std::size_t num_classes(const RunConfig& cfg, const DatasetManifest& manifest) {
  if (cfg.labels > 0) return static_cast<std::size_t>(cfg.labels);
  int top = -1;
  for (const VideoRecord& v : manifest.videos)
    if (v.action_label) top = std::max(top, *v.action_label);
  return static_cast<std::size_t>(std::max(top + 1, 2));
}

TrainResult train(const RunConfig& cfg, const DatasetManifest& manifest) {
  cfg.validate();
  if (cfg.load_type != Split::Train)
    throw Error(Errc::InvalidConfig, "train needs load_type: train, got " + to_string(cfg.load_type));
  check_loss(cfg);
  const ValidationReport report = validate_manifest(manifest, false);
  if (!report.ok())
    throw Error(Errc::SchemaError, "manifest invalid: " + report.violations.front().path + ": " +
                                       report.violations.front().message);

  ResolveOptions ropts;
  ropts.model_name = cfg.model;
  ropts.input_dim = kFeatureDim;
  ropts.num_classes = num_classes(cfg, manifest);
  ropts.seed = cfg.seed;
  ropts.weights_dir = cfg.weights_dir;
  ropts.config_digest = config_digest(cfg);
  ropts.params_only = cfg.extra<int>("pretrained_params_only", 0) != 0;
  ResolvedModel resolved = resolve_pretrained(cfg.pretrained, ropts);
  MicroModel& model = resolved.model;

  TrainResult result;
  result.run_dir = create_run_dir(cfg);
  result.warnings = resolved.warnings;
  write_config_snapshot(result.run_dir / "config.snapshot.yaml", cfg);
  ScalarLog log(result.run_dir);
  for (const std::string& w : resolved.warnings) log.append({{"type", "warning"}, {"message", w}});

  try {
    const std::string digest = config_digest(cfg);
    std::int64_t global_step = 0;
    for (int epoch = resolved.epoch + 1; epoch <= cfg.epoch; ++epoch) {
      const double lr = schedule_lr(cfg.lr, cfg.milestones, cfg.gamma, epoch);
      const SgdHyper hyper{lr, cfg.momentum, cfg.weight_decay, cfg.grad_max_norm};
      ClipDataset ds(manifest, cfg, Split::Train, epoch, LoadOptions{false});
      if (ds.size() == 0) throw Error(Errc::EmptyBatch, "train split has no clips");

      std::vector<std::size_t> order(ds.size());
      std::iota(order.begin(), order.end(), std::size_t{0});
      Rng shuffle(derive_seed(cfg.seed, {kShuffleStream, static_cast<std::uint64_t>(epoch)}));
      for (std::size_t i = order.size() - 1; i > 0; --i)
        std::swap(order[i], order[static_cast<std::size_t>(shuffle.uniform_int(0, static_cast<std::int64_t>(i)))]);

      OrderedLoader<Sample> loader(order.size(), cfg.num_workers, prefetch_window(cfg),
                                   [&](std::size_t k) { return to_sample(ds.load(order[k])); });

      double epoch_loss = 0;
      std::size_t epoch_samples = 0;
      int epoch_steps = 0;
      while (!loader.done()) {
        if (cfg.debug && epoch_steps >= 2) break;
        std::vector<MiniBatch> group;
        while (static_cast<int>(group.size()) < cfg.pseudo_batch_loop && !loader.done()) {
          MiniBatch mb;
          while (static_cast<int>(mb.size()) < cfg.batch_size && !loader.done()) mb.push_back(loader.next());
          group.push_back(std::move(mb));
        }
        const StepStats stats = accumulate_step(model, group, resolved.optimizer, hyper);
        ++global_step;
        ++epoch_steps;
        epoch_loss += stats.mean_loss * static_cast<double>(stats.samples);
        epoch_samples += stats.samples;
        log.append({{"type", "step"},
                    {"epoch", epoch},
                    {"step", global_step},
                    {"loss", stats.mean_loss},
                    {"lr", lr},
                    {"samples", stats.samples},
                    {"grad_norm", stats.grad_norm}});
      }
      const double mean_loss = epoch_loss / static_cast<double>(epoch_samples);
      result.epoch_losses.push_back(mean_loss);
      log.append({{"type", "epoch"}, {"epoch", epoch}, {"loss", mean_loss}, {"lr", lr}, {"samples", epoch_samples}});

      Checkpoint ckpt{model.name(), model.input_dim(), model.outputs(), model.parameters(),
                      resolved.optimizer.momentum, epoch, cfg.seed, digest};
      save_checkpoint(result.run_dir / "checkpoints" / ("epoch_" + std::to_string(epoch) + ".ckpt"), ckpt);
      result.final_epoch = epoch;
    }
  } catch (const std::exception& e) {
    log.append({{"type", "error"}, {"message", e.what()}});
    log.write_csv();
    throw;
  }
  log.write_csv();
  result.param_digest = model.parameters().digest();
  return result;
}

Json EvalReport::to_json() const {
  return {{"metric", metric}, {"value", value}, {"split", to_string(split)}, {"items", items}};
}

EvalReport evaluate(const RunConfig& cfg, const DatasetManifest& manifest, const PretrainedSpec& weights,
                    const EvalOptions& options) {
  const std::string metric = lower(cfg.acc_metric);
  static const std::vector<std::string> suite = {"accuracy", "iou", "ap", "map", "nss", "cc"};
  if (std::find(suite.begin(), suite.end(), metric) == suite.end())
    throw Error(Errc::UnknownMetric, "'" + cfg.acc_metric + "' is not one of Accuracy, IoU, AP, mAP, NSS, CC");
  if (metric != "accuracy")
    throw Error(Errc::InvalidConfig, "metric " + cfg.acc_metric + " scores detections or saliency maps, which " +
                                         cfg.model + " does not produce; use `vippipe eval --metric` on a prediction file");
  cfg.validate();

  Predictor predict = options.predictor;
  std::optional<MicroModel> model;
  if (!predict) {
    ResolveOptions ropts;
    ropts.model_name = cfg.model;
    ropts.input_dim = kFeatureDim;
    ropts.num_classes = num_classes(cfg, manifest);
    ropts.seed = cfg.seed;
    ropts.weights_dir = cfg.weights_dir;
    ropts.params_only = true;
    model.emplace(resolve_pretrained(weights, ropts).model);
    if (!model->is_classifier()) throw Error(Errc::InvalidConfig, "Accuracy needs a classifier model");
    predict = [&model](const LoadedClip& lc) { return model->predict_class(clip_features(lc.clip, lc.annotations)); };
  }

  ClipDataset ds(manifest, cfg, cfg.load_type, 0, LoadOptions{false});
  if (ds.size() == 0) throw Error(Errc::EmptyInput, "split " + to_string(cfg.load_type) + " has no clips");
  struct Scored {
    int prediction;
    int label;
  };
  OrderedLoader<Scored> loader(ds.size(), cfg.num_workers, prefetch_window(cfg), [&](std::size_t i) {
    const LoadedClip lc = ds.load(i);
    if (!lc.label) throw Error(Errc::InvalidInput, "video " + std::to_string(lc.item.video) + " has no action_label");
    return Scored{predict(lc), *lc.label};
  });
  std::vector<int> predictions;
  std::vector<int> labels;
  while (!loader.done()) {
    const Scored s = loader.next();
    predictions.push_back(s.prediction);
    labels.push_back(s.label);
  }

  EvalReport report;
  report.metric = "Accuracy";
  report.value = accuracy(predictions, labels);
  report.split = cfg.load_type;
  report.items = predictions.size();
  report.report_path = options.report_path.value_or(std::filesystem::path(cfg.save_dir) / cfg.exp /
                                                    ("eval_" + to_string(cfg.load_type) + ".json"));
  if (report.report_path.has_parent_path()) std::filesystem::create_directories(report.report_path.parent_path());
  std::ofstream out(report.report_path, std::ios::trunc);
  if (!out) throw Error(Errc::IoError, "cannot write " + report.report_path.string());
  out << report.to_json().dump(2) << "\n";
  return report;
}

}  // namespace vippipe
