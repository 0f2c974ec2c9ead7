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

#include "vippipe/config.hpp"
#include "vippipe/micro_model.hpp"

namespace vippipe {

// Checkpoint file: one line of JSON header, '\n', then little-endian float64
// payload. The header lists model name, parameter names and shapes, epoch,
// seed and config digest; the payload holds the parameters followed by the
// momentum buffers when `has_optimizer` is set.
struct Checkpoint {
  std::string model;
  std::size_t input_dim = 0;
  std::size_t outputs = 0;
  ParameterSet params;
  std::optional<std::vector<double>> momentum;
  int epoch = 0;
  std::uint64_t seed = 0;
  std::string config_digest;
  friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

struct ResolvedModel {
  MicroModel model;
  SgdState optimizer;
  int epoch = 0;
  std::vector<std::string> warnings;
};

struct ResolveOptions {
  std::string model_name;
  std::size_t input_dim = 0;
  std::size_t num_classes = 0;
  std::uint64_t seed = 0;
  std::filesystem::path weights_dir = "weights";
  /// Digest of the config doing the loading; a different digest in the
  /// checkpoint is a warning unless strict_digest is set.
  std::string config_digest;
  bool strict_digest = false;
  /// Keep only the parameters of a checkpoint (new objective, epoch 0).
  bool params_only = false;
};

/// fresh: seeded init. canonical: `<weights_dir>/<model>.ckpt` parameters,
/// epoch 0. checkpoint: parameters, optimizer state and epoch.
/// Throws MissingWeights, ShapeMismatch, DigestMismatch (strict only).
ResolvedModel resolve_pretrained(const PretrainedSpec& spec, const ResolveOptions& opts);

}  // namespace vippipe
