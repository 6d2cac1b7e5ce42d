//
// Copyright 2026 The TabPerturb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef TABPERTURB_TOOLS_CLI_H_
#define TABPERTURB_TOOLS_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

#include "absl/status/status.h"

namespace tabperturb::cli {

// Stable exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitBudget = 3;
inline constexpr int kExitIo = 4;

// Environment variable holding the 32-hex-digit PII key.
inline constexpr char kKeyEnvVar[] = "TABPERTURB_PII_KEY";

int ExitCodeFor(const absl::Status& status);

// Runs one invocation. `args` excludes the program name. Data goes to `out`,
// diagnostics to `err`.
int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace tabperturb::cli

#endif  // TABPERTURB_TOOLS_CLI_H_
