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
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vippipe {

/// One training example. `target` is a class id for the classifier and a
/// regression value for the linear regressor.
struct Sample {
  std::vector<double> features;
  double target = 0.0;
};

using MiniBatch = std::vector<Sample>;

/// Named slices over one flat parameter vector.
struct ParameterSet {
  struct Entry {
    std::string name;
    std::vector<std::size_t> shape;
    std::size_t offset = 0;
    std::size_t size = 0;
    friend bool operator==(const Entry&, const Entry&) = default;
  };
  std::vector<Entry> entries;
  std::vector<double> values;

  void add(std::string name, std::vector<std::size_t> shape);
  std::span<double> view(std::size_t entry) { return std::span(values).subspan(entries[entry].offset, entries[entry].size); }
  std::span<const double> view(std::size_t entry) const {
    return std::span(values).subspan(entries[entry].offset, entries[entry].size);
  }
  bool same_layout(const ParameterSet& other) const { return entries == other.entries; }
  /// SHA-256 of the little-endian float64 parameter bytes.
  std::string digest() const;
  friend bool operator==(const ParameterSet&, const ParameterSet&) = default;
};

/// Small models with closed-form per-sample gradients, standing in for real
/// architectures so the training loop runs in seconds on a CPU.
///
///   linear_regressor          y = w.x + b, loss 0.5 (y - t)^2
///   logistic_clip_classifier  softmax(W x + b), loss -log p_t
///
/// Per-sample losses are additive, so a batch gradient is the mean of the
/// per-sample gradients.
class MicroModel {
 public:
  /// Throws UnknownModel for names outside the registry.
  static MicroModel create(std::string_view name, std::size_t input_dim, std::size_t num_classes);
  static const std::vector<std::string>& registry();

  const std::string& name() const { return name_; }
  std::size_t input_dim() const { return input_dim_; }
  std::size_t outputs() const { return outputs_; }
  bool is_classifier() const { return name_ != "linear_regressor"; }

  ParameterSet& parameters() { return params_; }
  const ParameterSet& parameters() const { return params_; }

  /// Logits for the classifier, a single value for the regressor.
  std::vector<double> forward(std::span<const double> features) const;
  int predict_class(std::span<const double> features) const;
  double loss(const Sample& sample) const;
  /// Adds this sample's gradient into `grad` (same layout as the parameters).
  void accumulate_gradient(const Sample& sample, std::span<double> grad) const;

 private:
  MicroModel(std::string name, std::size_t input_dim, std::size_t outputs);
  void check_input(const Sample& sample) const;

  std::string name_;
  std::size_t input_dim_ = 0;
  std::size_t outputs_ = 0;
  ParameterSet params_;
};

/// Seeded uniform init in [-0.01, 0.01].
void init_parameters(MicroModel& model, std::uint64_t seed);

struct SgdState {
  std::vector<double> momentum;  // empty until the first step
};

struct SgdHyper {
  double lr = 0.001;
  double momentum = 0.9;
  double weight_decay = 0.0;
  double grad_max_norm = 0.0;  // <= 0 disables clipping
};

struct StepStats {
  double mean_loss = 0.0;  // before the update
  double grad_norm = 0.0;  // before clipping
  double clipped_norm = 0.0;
  std::size_t samples = 0;
};

/// Mean gradient over every sample of every mini-batch.
std::vector<double> mean_gradient(const MicroModel& model, std::span<const MiniBatch> mini_batches);

/// Scales `grad` so its L2 norm is at most max_norm; returns the norm
/// before scaling.
double clip_gradient(std::span<double> grad, double max_norm);

/// g += wd * p; v = momentum * v + g; p -= lr * v.
void sgd_update(ParameterSet& params, std::span<const double> grad, SgdState& state, const SgdHyper& hyper);

/// One pseudo-batch step: gradients from all mini-batches are summed and
/// divided by the total sample count, clipped once, then applied in one SGD
/// update. Mini-batches may differ in size. Throws EmptyBatch when there is
/// nothing to learn from.
StepStats accumulate_step(MicroModel& model, std::span<const MiniBatch> mini_batches, SgdState& state,
                          const SgdHyper& hyper);

}  // namespace vippipe
