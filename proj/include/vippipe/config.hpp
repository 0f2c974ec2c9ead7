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
#include <string_view>
#include <vector>

#include "vippipe/clip_sampler.hpp"
#include "vippipe/manifest.hpp"
#include "vippipe/transforms.hpp"

namespace vippipe {

/// The overloaded `pretrained` key: 0 = fresh seeded init, 1 = canonical
/// registry weights, anything else = path to a checkpoint.
struct PretrainedSpec {
  enum class Kind { Fresh, Canonical, Checkpoint };
  Kind kind = Kind::Fresh;
  std::string path;

  static PretrainedSpec parse(std::string_view value);
  std::string to_string() const;
  friend bool operator==(const PretrainedSpec&, const PretrainedSpec&) = default;
};

/// Full experiment configuration. Key names match the YAML file; clip and
/// transform keys sit at the top level of the file alongside the rest.
/// Keys the engine does not know are kept verbatim in `extras`.
struct RunConfig {
  ClipConfig clip;
  TransformConfig transform;

  std::string acc_metric = "Accuracy";
  int batch_size = 1;
  std::string dataset = "synthetic";
  int debug = 0;
  int epoch = 1;
  std::string exp = "exp";
  double gamma = 0.1;
  double grad_max_norm = 0.0;  // <= 0 disables clipping
  std::string json_path;
  int labels = 0;  // 0 = infer from the manifest
  Split load_type = Split::Train;
  std::string loss_type = "M_XENTROPY";
  double lr = 0.001;
  std::vector<int> milestones;
  std::string model = "logistic_clip_classifier";
  double momentum = 0.9;
  int num_workers = 1;
  std::string opt = "sgd";
  std::string preprocess = "default";
  PretrainedSpec pretrained;
  int pseudo_batch_loop = 1;
  int rerun = 1;
  std::string save_dir = "./results";
  std::uint64_t seed = 0;
  double weight_decay = 0.0;
  std::string weights_dir = "weights";

  Json extras = Json::object();

  /// Extras lookup with a fallback, for model/loss code that reads its own keys.
  template <class T>
  T extra(const std::string& key, T fallback) const {
    auto it = extras.find(key);
    return it == extras.end() ? fallback : it->template get<T>();
  }

  /// Throws InvalidConfig when an invariant does not hold.
  void validate() const;
  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Every key load_config understands, in snapshot order.
const std::vector<std::string>& known_config_keys();

/// Resolves a config with precedence: overrides > file > VIPPIPE_SEED (seed
/// only) > defaults. Overrides are "key=value" with YAML-typed values.
/// Throws ParseError, TypeError (naming the key), UnknownOverride for a
/// malformed override, InvalidConfig for a failed invariant.
RunConfig load_config(const std::filesystem::path& file, const std::vector<std::string>& overrides = {});
RunConfig config_from_yaml(std::string_view yaml_text, const std::vector<std::string>& overrides = {});

/// Canonical YAML of the effective config. Loading it back reproduces the
/// config exactly.
std::string config_to_yaml(const RunConfig& cfg);
void write_config_snapshot(const std::filesystem::path& path, const RunConfig& cfg);

/// Hash of the settings that shape a training trajectory; ignores keys that
/// only say how far or where to run (epoch, pretrained, num_workers, rerun,
/// save_dir, exp, debug).
std::string config_digest(const RunConfig& cfg);

/// base_lr * gamma^(number of milestones <= epoch).
double schedule_lr(double base_lr, const std::vector<int>& milestones, double gamma, int epoch);

/// Manifest location named by json_path: the file itself, or manifest.json
/// inside it when it is a directory.
std::filesystem::path manifest_path(const RunConfig& cfg);

}  // namespace vippipe
