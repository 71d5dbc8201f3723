/*
 * Copyright 2026 The xaieval Authors.
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

#ifndef XAIEVAL_CLI_H_
#define XAIEVAL_CLI_H_

#include <cstddef>
#include <ostream>
#include <string_view>

namespace xaieval::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

// Environment variable consulted when neither --seed nor the configuration
// sets a master seed.
inline constexpr const char* kSeedEnv = "XAIEVAL_SEED";

// Runs the command line `argv` (argv[0] is the program name) and returns the
// process exit code. Results go to `out`, diagnostics to `err`.
int RunMain(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

// 1-based line of a byte offset in `text`.
std::size_t LineOfOffset(std::string_view text, std::size_t offset);

}  // namespace xaieval::cli

#endif  // XAIEVAL_CLI_H_
