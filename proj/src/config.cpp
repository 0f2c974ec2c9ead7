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

#include "vippipe/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <regex>
#include <sstream>

#include "vippipe/digest.hpp"
#include "vippipe/error.hpp"

namespace vippipe {

namespace {

[[noreturn]] void type_error(const std::string& key, const std::string& expected) {
  throw Error(Errc::TypeError, "key '" + key + "' expects " + expected);
}

bool is_blank(const YAML::Node& n) {
  return !n || n.IsNull() || (n.IsScalar() && n.Scalar().empty());
}

template <class T>
T scalar_as(const YAML::Node& n, const std::string& key, const char* expected) {
  if (!n.IsScalar()) type_error(key, expected);
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    type_error(key, expected);
  }
}

int as_int(const YAML::Node& n, const std::string& key) { return scalar_as<int>(n, key, "an integer"); }
double as_double(const YAML::Node& n, const std::string& key) { return scalar_as<double>(n, key, "a number"); }

std::string as_str(const YAML::Node& n, const std::string& key) {
  if (is_blank(n)) return "";
  return scalar_as<std::string>(n, key, "a string");
}

bool as_flag(const YAML::Node& n, const std::string& key) {
  if (!n.IsScalar()) type_error(key, "0/1 or true/false");
  const std::string& s = n.Scalar();
  if (s == "0") return false;
  if (s == "1") return true;
  return scalar_as<bool>(n, key, "0/1 or true/false");
}

std::optional<Shape> as_shape(const YAML::Node& n, const std::string& key) {
  if (is_blank(n)) return std::nullopt;
  if (!n.IsSequence() || n.size() != 2) type_error(key, "[height, width]");
  return Shape{as_int(n[0], key), as_int(n[1], key)};
}

std::vector<int> as_int_list(const YAML::Node& n, const std::string& key) {
  if (is_blank(n)) return {};
  if (!n.IsSequence()) type_error(key, "a list of integers");
  std::vector<int> out;
  for (const auto& v : n) out.push_back(as_int(v, key));
  return out;
}

std::vector<double> as_double_list(const YAML::Node& n, const std::string& key) {
  if (is_blank(n)) return {};
  if (n.IsScalar()) return {as_double(n, key)};
  if (!n.IsSequence()) type_error(key, "a number or a list of numbers");
  std::vector<double> out;
  for (const auto& v : n) out.push_back(as_double(v, key));
  return out;
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, end);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

Json scalar_to_json(const YAML::Node& n) {
  // Quoted scalars carry the "!" tag and are always strings.
  if (n.Tag() == "!") return n.Scalar();
  const std::string& s = n.Scalar();
  if (s.empty() || s == "~" || s == "null" || s == "Null" || s == "NULL") return nullptr;
  if (s == "true" || s == "True" || s == "TRUE") return true;
  if (s == "false" || s == "False" || s == "FALSE") return false;
  std::int64_t i = 0;
  if (auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), i); ec == std::errc() && p == s.data() + s.size())
    return i;
  double d = 0;
  if (auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), d); ec == std::errc() && p == s.data() + s.size())
    return d;
  return s;
}

Json yaml_to_json(const YAML::Node& n) {
  if (!n || n.IsNull()) return nullptr;
  if (n.IsScalar()) return scalar_to_json(n);
  if (n.IsSequence()) {
    Json arr = Json::array();
    for (const auto& v : n) arr.push_back(yaml_to_json(v));
    return arr;
  }
  Json obj = Json::object();
  for (const auto& kv : n) obj[kv.first.Scalar()] = yaml_to_json(kv.second);
  return obj;
}

void emit_json(YAML::Emitter& out, const Json& v) {
  if (v.is_null()) {
    out << YAML::Null;
  } else if (v.is_boolean()) {
    out << (v.get<bool>() ? "true" : "false");
  } else if (v.is_number_unsigned()) {
    out << std::to_string(v.get<std::uint64_t>());
  } else if (v.is_number_integer()) {
    out << std::to_string(v.get<std::int64_t>());
  } else if (v.is_number()) {
    out << format_double(v.get<double>());
  } else if (v.is_string()) {
    out << YAML::DoubleQuoted << v.get<std::string>();
  } else if (v.is_array()) {
    out << YAML::Flow << YAML::BeginSeq;
    for (const Json& e : v) emit_json(out, e);
    out << YAML::EndSeq;
  } else {
    out << YAML::BeginMap;
    for (auto it = v.begin(); it != v.end(); ++it) {
      out << YAML::Key << it.key() << YAML::Value;
      emit_json(out, it.value());
    }
    out << YAML::EndMap;
  }
}

using Setter = std::function<void(RunConfig&, const YAML::Node&, const std::string&)>;
using Getter = std::function<Json(const RunConfig&)>;

struct KeyDef {
  std::string name;
  Setter set;
  Getter get;
};

Json shape_json(const std::optional<Shape>& s) {
  if (!s) return nullptr;
  return Json::array({s->height, s->width});
}

const std::vector<KeyDef>& key_table() {
  static const std::vector<KeyDef> table = [] {
    std::vector<KeyDef> t;
    auto str_key = [&t](const char* name, std::string RunConfig::*field) {
      t.push_back({name, [field](RunConfig& c, const YAML::Node& n, const std::string& k) { c.*field = as_str(n, k); },
                   [field](const RunConfig& c) { return Json(c.*field); }});
    };
    auto int_key = [&t](const char* name, int RunConfig::*field) {
      t.push_back({name, [field](RunConfig& c, const YAML::Node& n, const std::string& k) { c.*field = as_int(n, k); },
                   [field](const RunConfig& c) { return Json(c.*field); }});
    };
    auto dbl_key = [&t](const char* name, double RunConfig::*field) {
      t.push_back({name,
                   [field](RunConfig& c, const YAML::Node& n, const std::string& k) { c.*field = as_double(n, k); },
                   [field](const RunConfig& c) { return Json(c.*field); }});
    };

    // Preprocessing.
    t.push_back({"clip_length", [](RunConfig& c, const YAML::Node& n, const std::string& k) { c.clip.clip_length = as_int(n, k); },
                 [](const RunConfig& c) { return Json(c.clip.clip_length); }});
    t.push_back({"clip_mode",
                 [](RunConfig& c, const YAML::Node& n, const std::string& k) {
                   auto m = parse_clip_mode(as_str(n, k));
                   if (!m) type_error(k, "contiguous or uniform");
                   c.clip.mode = *m;
                 },
                 [](const RunConfig& c) { return Json(std::string(to_string(c.clip.mode))); }});
    t.push_back({"clip_offset", [](RunConfig& c, const YAML::Node& n, const std::string& k) { c.clip.clip_offset = as_int(n, k); },
                 [](const RunConfig& c) { return Json(c.clip.clip_offset); }});
    t.push_back({"clip_stride", [](RunConfig& c, const YAML::Node& n, const std::string& k) { c.clip.clip_stride = as_int(n, k); },
                 [](const RunConfig& c) { return Json(c.clip.clip_stride); }});
    t.push_back({"crop_shape", [](RunConfig& c, const YAML::Node& n, const std::string& k) { c.transform.crop_shape = as_shape(n, k); },
                 [](const RunConfig& c) { return shape_json(c.transform.crop_shape); }});
    t.push_back({"crop_type",
                 [](RunConfig& c, const YAML::Node& n, const std::string& k) {
                   auto ct = parse_crop_type(as_str(n, k));
                   if (!ct) type_error(k, "Random, Center or None");
                   c.transform.crop_type = *ct;
                 },
                 [](const RunConfig& c) { return Json(std::string(to_string(c.transform.crop_type))); }});
    t.push_back({"final_shape", [](RunConfig& c, const YAML::Node& n, const std::string& k) { c.transform.final_shape = as_shape(n, k); },
                 [](const RunConfig& c) { return shape_json(c.transform.final_shape); }});
    t.push_back({"flip_probability",
                 [](RunConfig& c, const YAML::Node& n, const std::string& k) { c.transform.flip_probability = as_double(n, k); },
                 [](const RunConfig& c) { return Json(c.transform.flip_probability); }});
    t.push_back({"num_clips", [](RunConfig& c, const YAML::Node& n, const std::string& k) { c.clip.num_clips = as_int(n, k); },
                 [](const RunConfig& c) { return Json(c.clip.num_clips); }});
    t.push_back({"random_offset",
                 [](RunConfig& c, const YAML::Node& n, const std::string& k) { c.clip.random_offset = as_flag(n, k); },
                 [](const RunConfig& c) { return Json(c.clip.random_offset ? 1 : 0); }});
    t.push_back({"resize_shape", [](RunConfig& c, const YAML::Node& n, const std::string& k) { c.transform.resize_shape = as_shape(n, k); },
                 [](const RunConfig& c) { return shape_json(c.transform.resize_shape); }});
    t.push_back({"rotation_degrees",
                 [](RunConfig& c, const YAML::Node& n, const std::string& k) {
                   c.transform.rotation_degrees = is_blank(n) ? std::nullopt : std::optional<double>(as_double(n, k));
                 },
                 [](const RunConfig& c) {
                   return c.transform.rotation_degrees ? Json(*c.transform.rotation_degrees) : Json(nullptr);
                 }});
    t.push_back({"subtract_mean",
                 [](RunConfig& c, const YAML::Node& n, const std::string& k) { c.transform.subtract_mean = as_double_list(n, k); },
                 [](const RunConfig& c) {
                   return c.transform.subtract_mean.empty() ? Json("") : Json(c.transform.subtract_mean);
                 }});

    // Experimental setup.
    str_key("acc_metric", &RunConfig::acc_metric);
    int_key("batch_size", &RunConfig::batch_size);
    str_key("dataset", &RunConfig::dataset);
    int_key("debug", &RunConfig::debug);
    int_key("epoch", &RunConfig::epoch);
    str_key("exp", &RunConfig::exp);
    dbl_key("gamma", &RunConfig::gamma);
    dbl_key("grad_max_norm", &RunConfig::grad_max_norm);
    str_key("json_path", &RunConfig::json_path);
    int_key("labels", &RunConfig::labels);
    t.push_back({"load_type",
                 [](RunConfig& c, const YAML::Node& n, const std::string& k) {
                   auto s = parse_split(as_str(n, k));
                   if (!s) type_error(k, "train, val or test");
                   c.load_type = *s;
                 },
                 [](const RunConfig& c) { return Json(to_string(c.load_type)); }});
    str_key("loss_type", &RunConfig::loss_type);
    dbl_key("lr", &RunConfig::lr);
    t.push_back({"milestones", [](RunConfig& c, const YAML::Node& n, const std::string& k) { c.milestones = as_int_list(n, k); },
                 [](const RunConfig& c) { return Json(c.milestones); }});
    str_key("model", &RunConfig::model);
    dbl_key("momentum", &RunConfig::momentum);
    int_key("num_workers", &RunConfig::num_workers);
    str_key("opt", &RunConfig::opt);
    str_key("preprocess", &RunConfig::preprocess);
    t.push_back({"pretrained",
                 [](RunConfig& c, const YAML::Node& n, const std::string& k) {
                   c.pretrained = PretrainedSpec::parse(scalar_as<std::string>(n, k, "0, 1 or a checkpoint path"));
                 },
                 [](const RunConfig& c) {
                   if (c.pretrained.kind == PretrainedSpec::Kind::Checkpoint) return Json(c.pretrained.path);
                   return Json(c.pretrained.kind == PretrainedSpec::Kind::Canonical ? 1 : 0);
                 }});
    int_key("pseudo_batch_loop", &RunConfig::pseudo_batch_loop);
    int_key("rerun", &RunConfig::rerun);
    str_key("save_dir", &RunConfig::save_dir);
    t.push_back({"seed",
                 [](RunConfig& c, const YAML::Node& n, const std::string& k) {
                   c.seed = scalar_as<std::uint64_t>(n, k, "a non-negative integer");
                 },
                 [](const RunConfig& c) { return Json(c.seed); }});
    dbl_key("weight_decay", &RunConfig::weight_decay);
    str_key("weights_dir", &RunConfig::weights_dir);
    return t;
  }();
  return table;
}

const KeyDef* find_key(const std::string& name) {
  for (const KeyDef& k : key_table())
    if (k.name == name) return &k;
  return nullptr;
}

void apply(RunConfig& cfg, const std::string& key, const YAML::Node& value) {
  if (const KeyDef* def = find_key(key)) {
    def->set(cfg, value, key);
  } else {
    cfg.extras[key] = yaml_to_json(value);
  }
}

YAML::Node parse_yaml(std::string_view text, const std::string& origin) {
  try {
    return YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    throw Error(Errc::ParseError, origin + ": " + e.what());
  }
}

}  // namespace

PretrainedSpec PretrainedSpec::parse(std::string_view value) {
  if (value == "0" || value.empty()) return {Kind::Fresh, ""};
  if (value == "1") return {Kind::Canonical, ""};
  return {Kind::Checkpoint, std::string(value)};
}

std::string PretrainedSpec::to_string() const {
  switch (kind) {
    case Kind::Fresh: return "0";
    case Kind::Canonical: return "1";
    case Kind::Checkpoint: return path;
  }
  return "0";
}

void RunConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(Errc::InvalidConfig, what); };
  clip.validate();
  transform.validate();
  if (batch_size < 1) fail("batch_size must be >= 1");
  if (pseudo_batch_loop < 1) fail("pseudo_batch_loop must be >= 1");
  if (epoch < 1) fail("epoch must be >= 1");
  if (num_workers < 1) fail("num_workers must be >= 1");
  if (!(gamma >= 0)) fail("gamma must be >= 0");
  if (!(lr >= 0)) fail("lr must be >= 0");
  if (!(momentum >= 0 && momentum < 1)) fail("momentum must lie in [0, 1)");
  if (!(weight_decay >= 0)) fail("weight_decay must be >= 0");
  if (labels < 0) fail("labels must be >= 0");
  if (rerun != 0 && rerun != 1) fail("rerun must be 0 or 1");
  std::string opt_lower = opt;
  std::transform(opt_lower.begin(), opt_lower.end(), opt_lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (opt_lower != "sgd") fail("unsupported optimizer '" + opt + "' (only sgd)");
  for (std::size_t i = 1; i < milestones.size(); ++i)
    if (milestones[i] <= milestones[i - 1]) fail("milestones must be strictly increasing");
}

const std::vector<std::string>& known_config_keys() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const KeyDef& k : key_table()) n.push_back(k.name);
    return n;
  }();
  return names;
}

RunConfig config_from_yaml(std::string_view yaml_text, const std::vector<std::string>& overrides) {
  RunConfig cfg;
  if (const char* env = std::getenv("VIPPIPE_SEED"); env && *env) apply(cfg, "seed", YAML::Node(std::string(env)));

  const YAML::Node doc = parse_yaml(yaml_text, "config");
  if (doc && !doc.IsNull()) {
    if (!doc.IsMap()) throw Error(Errc::ParseError, "config: top level must be a mapping");
    for (const auto& kv : doc) apply(cfg, kv.first.Scalar(), kv.second);
  }

  static const std::regex key_re("[A-Za-z_][A-Za-z0-9_]*");
  for (const std::string& ov : overrides) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos) throw Error(Errc::UnknownOverride, "override '" + ov + "' is not key=value");
    const std::string key = ov.substr(0, eq);
    if (!std::regex_match(key, key_re)) throw Error(Errc::UnknownOverride, "override '" + ov + "' has a malformed key");
    apply(cfg, key, parse_yaml(ov.substr(eq + 1), "override " + key));
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& file, const std::vector<std::string>& overrides) {
  std::ifstream in(file);
  if (!in) throw Error(Errc::IoError, "cannot open config " + file.string());
  std::stringstream text;
  text << in.rdbuf();
  return config_from_yaml(text.str(), overrides);
}

std::string config_to_yaml(const RunConfig& cfg) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  for (const KeyDef& k : key_table()) {
    out << YAML::Key << k.name << YAML::Value;
    emit_json(out, k.get(cfg));
  }
  for (auto it = cfg.extras.begin(); it != cfg.extras.end(); ++it) {
    out << YAML::Key << it.key() << YAML::Value;
    emit_json(out, it.value());
  }
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

void write_config_snapshot(const std::filesystem::path& path, const RunConfig& cfg) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
  out << config_to_yaml(cfg);
}

std::string config_digest(const RunConfig& cfg) {
  RunConfig c = cfg;
  c.epoch = 1;
  c.pretrained = {};
  c.num_workers = 1;
  c.rerun = 1;
  c.save_dir.clear();
  c.exp.clear();
  c.debug = 0;
  return sha256_hex(config_to_yaml(c));
}

double schedule_lr(double base_lr, const std::vector<int>& milestones, double gamma, int epoch) {
  const auto passed = std::count_if(milestones.begin(), milestones.end(), [&](int m) { return m <= epoch; });
  double lr = base_lr;
  for (long i = 0; i < passed; ++i) lr *= gamma;
  return lr;
}

std::filesystem::path manifest_path(const RunConfig& cfg) {
  if (cfg.json_path.empty()) throw Error(Errc::InvalidConfig, "json_path is not set");
  std::filesystem::path p(cfg.json_path);
  if (std::filesystem::is_directory(p)) return p / "manifest.json";
  return p;
}

}  // namespace vippipe
