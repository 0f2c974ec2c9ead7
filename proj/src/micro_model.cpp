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

#include "vippipe/micro_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "vippipe/digest.hpp"
#include "vippipe/error.hpp"
#include "vippipe/random.hpp"

namespace vippipe {

namespace {

constexpr std::uint64_t kInitStream = 0x1417;

void softmax_inplace(std::vector<double>& z) {
  const double mx = *std::max_element(z.begin(), z.end());
  double sum = 0;
  for (double& v : z) {
    v = std::exp(v - mx);
    sum += v;
  }
  for (double& v : z) v /= sum;
}

}  // namespace

void ParameterSet::add(std::string name, std::vector<std::size_t> shape) {
  std::size_t size = 1;
  for (std::size_t d : shape) size *= d;
  entries.push_back({std::move(name), std::move(shape), values.size(), size});
  values.resize(values.size() + size, 0.0);
}

std::string ParameterSet::digest() const {
  std::vector<std::uint8_t> bytes(values.size() * sizeof(double));
  std::memcpy(bytes.data(), values.data(), bytes.size());
  return sha256_hex(bytes);
}

MicroModel::MicroModel(std::string name, std::size_t input_dim, std::size_t outputs)
    : name_(std::move(name)), input_dim_(input_dim), outputs_(outputs) {}

const std::vector<std::string>& MicroModel::registry() {
  static const std::vector<std::string> names = {"linear_regressor", "logistic_clip_classifier"};
  return names;
}

MicroModel MicroModel::create(std::string_view name, std::size_t input_dim, std::size_t num_classes) {
  if (input_dim == 0) throw Error(Errc::InvalidConfig, "model input dimension must be positive");
  if (name == "linear_regressor") {
    MicroModel m(std::string(name), input_dim, 1);
    m.params_.add("weight", {input_dim});
    m.params_.add("bias", {1});
    return m;
  }
  if (name == "logistic_clip_classifier") {
    if (num_classes < 2) throw Error(Errc::InvalidConfig, "classifier needs at least 2 classes");
    MicroModel m(std::string(name), input_dim, num_classes);
    m.params_.add("weight", {num_classes, input_dim});
    m.params_.add("bias", {num_classes});
    return m;
  }
  throw Error(Errc::UnknownModel, "no micro-model named '" + std::string(name) + "'");
}

void MicroModel::check_input(const Sample& sample) const {
  if (sample.features.size() != input_dim_)
    throw Error(Errc::ShapeMismatch, "sample has " + std::to_string(sample.features.size()) + " features, model expects " +
                                         std::to_string(input_dim_));
  if (name_ != "linear_regressor") {
    if (sample.target < 0 || sample.target >= static_cast<double>(outputs_) || sample.target != std::floor(sample.target))
      throw Error(Errc::InvalidInput, "class target " + std::to_string(sample.target) + " out of range");
  }
}

std::vector<double> MicroModel::forward(std::span<const double> x) const {
  const auto w = params_.view(0);
  const auto b = params_.view(1);
  std::vector<double> out(outputs_);
  for (std::size_t k = 0; k < outputs_; ++k) {
    double z = b[k];
    for (std::size_t d = 0; d < input_dim_; ++d) z += w[k * input_dim_ + d] * x[d];
    out[k] = z;
  }
  return out;
}

int MicroModel::predict_class(std::span<const double> features) const {
  const auto z = forward(features);
  return static_cast<int>(std::max_element(z.begin(), z.end()) - z.begin());
}

double MicroModel::loss(const Sample& s) const {
  check_input(s);
  auto z = forward(s.features);
  if (name_ == "linear_regressor") {
    const double r = z[0] - s.target;
    return 0.5 * r * r;
  }
  const double mx = *std::max_element(z.begin(), z.end());
  double sum = 0;
  for (double v : z) sum += std::exp(v - mx);
  return -(z[static_cast<std::size_t>(s.target)] - mx - std::log(sum));
}

void MicroModel::accumulate_gradient(const Sample& s, std::span<double> grad) const {
  check_input(s);
  auto z = forward(s.features);
  // dL/dz per output unit; the weight gradient is its outer product with x.
  if (name_ == "linear_regressor") {
    z[0] -= s.target;
  } else {
    softmax_inplace(z);
    z[static_cast<std::size_t>(s.target)] -= 1.0;
  }
  const std::size_t bias_offset = params_.entries[1].offset;
  for (std::size_t k = 0; k < outputs_; ++k) {
    for (std::size_t d = 0; d < input_dim_; ++d) grad[k * input_dim_ + d] += z[k] * s.features[d];
    grad[bias_offset + k] += z[k];
  }
}

void init_parameters(MicroModel& model, std::uint64_t seed) {
  Rng rng(derive_seed(seed, {kInitStream}));
  for (double& v : model.parameters().values) v = rng.uniform(-0.01, 0.01);
}

std::vector<double> mean_gradient(const MicroModel& model, std::span<const MiniBatch> mini_batches) {
  std::vector<double> grad(model.parameters().values.size(), 0.0);
  std::size_t total = 0;
  for (const MiniBatch& mb : mini_batches) {
    for (const Sample& s : mb) model.accumulate_gradient(s, grad);
    total += mb.size();
  }
  if (total == 0) throw Error(Errc::EmptyBatch, "no samples to compute a gradient from");
  for (double& g : grad) g /= static_cast<double>(total);
  return grad;
}

double clip_gradient(std::span<double> grad, double max_norm) {
  double sq = 0;
  for (double g : grad) sq += g * g;
  const double norm = std::sqrt(sq);
  if (max_norm > 0 && norm > max_norm) {
    const double scale = max_norm / norm;
    for (double& g : grad) g *= scale;
  }
  return norm;
}

void sgd_update(ParameterSet& params, std::span<const double> grad, SgdState& state, const SgdHyper& hyper) {
  auto& p = params.values;
  if (state.momentum.empty()) state.momentum.assign(p.size(), 0.0);
  if (state.momentum.size() != p.size()) throw Error(Errc::ShapeMismatch, "optimizer state does not match parameters");
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double g = grad[i] + hyper.weight_decay * p[i];
    state.momentum[i] = hyper.momentum * state.momentum[i] + g;
    p[i] -= hyper.lr * state.momentum[i];
  }
}

StepStats accumulate_step(MicroModel& model, std::span<const MiniBatch> mini_batches, SgdState& state,
                          const SgdHyper& hyper) {
  if (mini_batches.empty()) throw Error(Errc::EmptyBatch, "pseudo-batch has no mini-batches");
  StepStats stats;
  double loss_sum = 0;
  for (const MiniBatch& mb : mini_batches) {
    if (mb.empty()) throw Error(Errc::EmptyBatch, "empty mini-batch in pseudo-batch");
    for (const Sample& s : mb) loss_sum += model.loss(s);
    stats.samples += mb.size();
  }
  stats.mean_loss = loss_sum / static_cast<double>(stats.samples);
  std::vector<double> grad = mean_gradient(model, mini_batches);
  stats.grad_norm = clip_gradient(grad, hyper.grad_max_norm);
  double sq = 0;
  for (double g : grad) sq += g * g;
  stats.clipped_norm = std::sqrt(sq);
  sgd_update(model.parameters(), grad, state, hyper);
  return stats;
}

}  // namespace vippipe
