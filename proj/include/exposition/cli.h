/*
 * Copyright 2026 The Exposition Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// The `exposition` command line:
//   exposition explain --data d.csv --target y --model m.json:label ...
//       --kind breakdown --instance 7 [--seed 42] [--out o.json]
//   exposition serve --data d.csv --target y --model a.json:A [--port 8042]
//       [--state saved.json]
//
// Exit codes: 0 success, 1 data or model errors, 2 usage errors.

#ifndef EXPOSITION_CLI_H_
#define EXPOSITION_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace exposition {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

// `args` excludes the program name. `serve` blocks until SIGINT or SIGTERM.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace exposition

#endif  // EXPOSITION_CLI_H_
