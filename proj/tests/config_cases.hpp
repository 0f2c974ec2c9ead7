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

// One row per known config key: two distinct, valid values (as YAML
// scalars) plus any context the key needs to validate.
#pragma once

#include <string>
#include <vector>

namespace cases {

struct KeyCase {
  std::string key;
  std::string file_value;
  std::string cli_value;
  std::string context;  // extra YAML lines
};

inline const std::vector<KeyCase>& key_cases() {
  static const std::vector<KeyCase> rows = {
      {"clip_length", "8", "4", ""},
      {"clip_mode", "uniform", "contiguous", "num_clips: 1\n"},
      {"clip_offset", "2", "3", ""},
      {"clip_stride", "1", "-1", ""},
      {"crop_shape", "[10, 10]", "[12, 8]", ""},
      {"crop_type", "Random", "Center", "crop_shape: [10, 10]\n"},
      {"final_shape", "[20, 20]", "[16, 24]", ""},
      {"flip_probability", "0.5", "0.25", ""},
      {"num_clips", "2", "0", ""},
      {"random_offset", "1", "0", ""},
      {"resize_shape", "[30, 40]", "[40, 50]", ""},
      {"rotation_degrees", "10", "5", ""},
      {"subtract_mean", "[1, 2, 3]", "[4, 5, 6]", ""},
      {"acc_metric", "nss", "map", ""},
      {"batch_size", "3", "5", ""},
      {"dataset", "HMDB51", "UCF101", ""},
      {"debug", "1", "2", ""},
      {"epoch", "30", "4", ""},
      {"exp", "first", "second", ""},
      {"gamma", "0.5", "0.2", ""},
      {"grad_max_norm", "10", "2", ""},
      {"json_path", "/data/a", "/data/b", ""},
      {"labels", "51", "3", ""},
      {"load_type", "val", "test", ""},
      {"loss_type", "MSE", "M_XENTROPY", ""},
      {"lr", "0.0001", "0.01", ""},
      {"milestones", "[10, 20]", "[3]", ""},
      {"model", "linear_regressor", "logistic_clip_classifier", ""},
      {"momentum", "0.5", "0.1", ""},
      {"num_workers", "2", "8", ""},
      {"opt", "SGD", "sgd", ""},
      {"preprocess", "custom", "other", ""},
      {"pretrained", "1", "/weights/run.ckpt", ""},
      {"pseudo_batch_loop", "2", "4", ""},
      {"rerun", "0", "1", ""},
      {"save_dir", "./a", "./b", ""},
      {"seed", "999", "5", ""},
      {"weight_decay", "0.0005", "0.001", ""},
      {"weights_dir", "w1", "w2", ""},
  };
  return rows;
}

}  // namespace cases
