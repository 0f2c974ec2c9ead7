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

#include "vippipe/checkpoint.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <iterator>

#include "vippipe/error.hpp"
#include "vippipe/frame_io.hpp"

namespace vippipe {

namespace {

void append_doubles(Bytes& out, std::span<const double> values) {
  const std::size_t at = out.size();
  out.resize(at + values.size() * sizeof(double));
  std::memcpy(out.data() + at, values.data(), values.size() * sizeof(double));
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  Json params = Json::array();
  for (const auto& e : ckpt.params.entries) params.push_back({{"name", e.name}, {"shape", e.shape}});
  const Json header = {{"format", "vippipe-checkpoint"},
                       {"version", 1},
                       {"model", ckpt.model},
                       {"input_dim", ckpt.input_dim},
                       {"outputs", ckpt.outputs},
                       {"params", params},
                       {"has_optimizer", ckpt.momentum.has_value()},
                       {"epoch", ckpt.epoch},
                       {"rng_state", {{"seed", ckpt.seed}, {"epoch", ckpt.epoch}}},
                       {"config_digest", ckpt.config_digest}};
  const std::string text = header.dump() + "\n";
  Bytes out(text.begin(), text.end());
  append_doubles(out, ckpt.params.values);
  if (ckpt.momentum) append_doubles(out, *ckpt.momentum);

  // Write-then-rename so a crash never leaves a half-written checkpoint.
  const std::filesystem::path tmp = path.string() + ".tmp";
  write_file(tmp, out);
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw Error(Errc::MissingWeights, "no checkpoint at " + path.string());
  const Bytes bytes = read_file(path);
  const auto nl = std::find(bytes.begin(), bytes.end(), '\n');
  if (nl == bytes.end()) throw Error(Errc::ParseError, path.string() + ": missing checkpoint header");
  Json header;
  try {
    header = Json::parse(bytes.begin(), nl);
  } catch (const Json::parse_error& e) {
    throw Error(Errc::ParseError, path.string() + ": " + e.what());
  }
  Checkpoint ckpt;
  try {
    if (header.at("format") != "vippipe-checkpoint") throw Error(Errc::ParseError, path.string() + ": not a checkpoint");
    ckpt.model = header.at("model").get<std::string>();
    ckpt.input_dim = header.at("input_dim").get<std::size_t>();
    ckpt.outputs = header.at("outputs").get<std::size_t>();
    ckpt.epoch = header.at("epoch").get<int>();
    ckpt.seed = header.at("rng_state").at("seed").get<std::uint64_t>();
    ckpt.config_digest = header.at("config_digest").get<std::string>();
    for (const Json& p : header.at("params")) ckpt.params.add(p.at("name").get<std::string>(), p.at("shape").get<std::vector<std::size_t>>());
    const bool has_optimizer = header.at("has_optimizer").get<bool>();
    const std::size_t n = ckpt.params.values.size();
    const std::size_t expected = (has_optimizer ? 2 : 1) * n * sizeof(double);
    const std::size_t payload = static_cast<std::size_t>(bytes.end() - nl - 1);
    if (payload != expected)
      throw Error(Errc::Truncated, path.string() + ": payload is " + std::to_string(payload) + " bytes, expected " +
                                       std::to_string(expected));
    const std::uint8_t* p = &*(nl + 1);
    std::memcpy(ckpt.params.values.data(), p, n * sizeof(double));
    if (has_optimizer) {
      ckpt.momentum = std::vector<double>(n);
      std::memcpy(ckpt.momentum->data(), p + n * sizeof(double), n * sizeof(double));
    }
  } catch (const Json::exception& e) {
    throw Error(Errc::ParseError, path.string() + ": bad checkpoint header: " + e.what());
  }
  return ckpt;
}

ResolvedModel resolve_pretrained(const PretrainedSpec& spec, const ResolveOptions& opts) {
  ResolvedModel out{MicroModel::create(opts.model_name, opts.input_dim, opts.num_classes), {}, 0, {}};
  if (spec.kind == PretrainedSpec::Kind::Fresh) {
    init_parameters(out.model, opts.seed);
    return out;
  }

  const bool canonical = spec.kind == PretrainedSpec::Kind::Canonical;
  const std::filesystem::path path =
      canonical ? opts.weights_dir / (opts.model_name + ".ckpt") : std::filesystem::path(spec.path);
  if (!std::filesystem::exists(path))
    throw Error(Errc::MissingWeights, (canonical ? "no registry weights for '" + opts.model_name + "' at "
                                                 : std::string("no checkpoint at ")) +
                                          path.string());
  Checkpoint ckpt = load_checkpoint(path);
  if (ckpt.model != opts.model_name)
    throw Error(Errc::ShapeMismatch, path.string() + " holds '" + ckpt.model + "', expected '" + opts.model_name + "'");
  if (!ckpt.params.same_layout(out.model.parameters()))
    throw Error(Errc::ShapeMismatch, path.string() + ": parameter names or shapes differ from " + opts.model_name);
  out.model.parameters().values = ckpt.params.values;
  if (canonical || opts.params_only) return out;

  if (!opts.config_digest.empty() && ckpt.config_digest != opts.config_digest) {
    const std::string msg = path.string() + " was produced by a different config";
    if (opts.strict_digest) throw Error(Errc::DigestMismatch, msg);
    out.warnings.push_back("DigestMismatch: " + msg);
  }
  if (ckpt.momentum) out.optimizer.momentum = *ckpt.momentum;
  out.epoch = ckpt.epoch;
  return out;
}

}  // namespace vippipe
