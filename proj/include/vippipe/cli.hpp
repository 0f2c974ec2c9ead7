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

#include <iosfwd>
#include <string>
#include <vector>

namespace vippipe {

/// Runs one `vippipe` invocation. `args` excludes the program name.
/// Returns 0 on success, 1 on validation or runtime failure, 2 on usage
/// errors. Data goes to `out`, diagnostics to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Turns leftover "--key value", "--key=value" and "key=value" tokens into
/// config overrides. A bare "--flag" becomes "flag=1".
std::vector<std::string> overrides_from_flags(const std::vector<std::string>& tokens);

}  // namespace vippipe
