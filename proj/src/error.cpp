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

#include "vippipe/error.hpp"

namespace vippipe {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::UnsupportedFormat: return "UnsupportedFormat";
    case Errc::Truncated: return "Truncated";
    case Errc::InvalidFrame: return "InvalidFrame";
    case Errc::MissingFrame: return "MissingFrame";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::IoError: return "IoError";
    case Errc::ParseError: return "ParseError";
    case Errc::SchemaError: return "SchemaError";
    case Errc::InfeasibleConfig: return "InfeasibleConfig";
    case Errc::InfeasibleCrop: return "InfeasibleCrop";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::NoGroundTruth: return "NoGroundTruth";
    case Errc::DegenerateMap: return "DegenerateMap";
    case Errc::NoFixations: return "NoFixations";
    case Errc::TypeError: return "TypeError";
    case Errc::UnknownOverride: return "UnknownOverride";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::EmptyBatch: return "EmptyBatch";
    case Errc::MissingWeights: return "MissingWeights";
    case Errc::DigestMismatch: return "DigestMismatch";
    case Errc::UnknownMetric: return "UnknownMetric";
    case Errc::UnknownModel: return "UnknownModel";
    case Errc::RunExists: return "RunExists";
    case Errc::InvalidInput: return "InvalidInput";
  }
  return "Error";
}

Error::Error(Errc code, const std::string& detail)
    : std::runtime_error(std::string(errc_name(code)) + ": " + detail),
      code_(code),
      detail_(detail) {}

}  // namespace vippipe
