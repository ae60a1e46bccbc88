/*
 * Copyright 2026 The xtree Authors.
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

#ifndef XTREE_TOOLS_CLI_H_
#define XTREE_TOOLS_CLI_H_

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace xtree::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitBadFlags = 2;
inline constexpr int kExitInput = 3;
inline constexpr int kExitNumerical = 4;

// Runs the command line with the given arguments (argv[0] excluded). Regular
// output goes to out, structured JSON errors to err.
int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Instance-level parallel loop. Work item i writes only its own slot, so
// results never depend on the thread count.
void ParallelFor(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

// --threads value, else XTREE_THREADS, else 1.
int ResolveThreads(int flag_value);

}  // namespace xtree::cli

#endif  // XTREE_TOOLS_CLI_H_
