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

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "vippipe/checkpoint.hpp"
#include "vippipe/config.hpp"
#include "vippipe/dataset.hpp"
#include "vippipe/manifest.hpp"

namespace vippipe {

/// Creates save_dir/exp/<YYYYMMDD-HHMMSS>[-k]. With rerun 0 an existing run
/// under save_dir/exp is an error (RunExists); resume explicitly instead.
std::filesystem::path create_run_dir(const RunConfig& cfg);

/// Class count for the classifier: cfg.labels, or one past the largest
/// action label in the manifest.
std::size_t num_classes(const RunConfig& cfg, const DatasetManifest& manifest);

struct TrainResult {
  std::filesystem::path run_dir;
  std::string param_digest;
  std::vector<double> epoch_losses;  // mean pre-update loss per epoch run
  int final_epoch = 0;
  std::vector<std::string> warnings;
};

/// Trains the configured micro-model on the train split.
///
/// Run directory layout:
///   config.snapshot.yaml   effective config
///   logs.jsonl             one JSON record per step / epoch / warning / error
///   logs.csv               step and epoch records as CSV
///   checkpoints/epoch_<n>.ckpt
///
/// Everything written is a function of (cfg, manifest contents) alone; in
/// particular num_workers does not change any output. A checkpoint in
/// `pretrained` resumes from its epoch unless the extras key
/// `pretrained_params_only` is set. Config and manifest are validated before
/// anything is created on disk.
TrainResult train(const RunConfig& cfg, const DatasetManifest& manifest);

using Predictor = std::function<int(const LoadedClip&)>;

struct EvalOptions {
  /// Replaces the model; used for oracle or externally computed predictions.
  Predictor predictor;
  /// Defaults to save_dir/exp/eval_<split>.json.
  std::optional<std::filesystem::path> report_path;
};

struct EvalReport {
  std::string metric;
  double value = 0.0;
  Split split = Split::Val;
  std::size_t items = 0;
  std::filesystem::path report_path;
  Json to_json() const;
};

/// Runs the model over the split named by cfg.load_type and scores it with
/// cfg.acc_metric. Throws UnknownMetric for names outside the metric suite.
EvalReport evaluate(const RunConfig& cfg, const DatasetManifest& manifest, const PretrainedSpec& weights,
                    const EvalOptions& options = {});

}  // namespace vippipe
