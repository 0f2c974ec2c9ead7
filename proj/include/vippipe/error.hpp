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

#include <stdexcept>
#include <string>
#include <string_view>

namespace vippipe {

enum class Errc {
  UnsupportedFormat,
  Truncated,
  InvalidFrame,
  MissingFrame,
  ShapeMismatch,
  IoError,
  ParseError,
  SchemaError,
  InfeasibleConfig,
  InfeasibleCrop,
  EmptyInput,
  NoGroundTruth,
  DegenerateMap,
  NoFixations,
  TypeError,
  UnknownOverride,
  InvalidConfig,
  EmptyBatch,
  MissingWeights,
  DigestMismatch,
  UnknownMetric,
  UnknownModel,
  RunExists,
  InvalidInput,
};

std::string_view errc_name(Errc code);

/// All library failures surface as this exception; `code()` identifies the
/// failure kind, `what()` carries "<Kind>: <detail>".
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail);

  Errc code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  Errc code_;
  std::string detail_;
};

}  // namespace vippipe
