// Copyright 2026 The mimpc Authors
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

#ifndef MIMPC_CLI_HPP_
#define MIMPC_CLI_HPP_

#include <ostream>

namespace mimpc {

enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitUsage = 2,
  kExitMalformedFile = 3,
  kExitInfeasible = 4,
  kExitBudgetExhausted = 5,
};

// Command-line front end with subcommands solve, simulate and bench. Options
// may also be set through MIMPC_* environment variables; explicit flags win.
// Errors are written to `err` as one JSON object per line.
int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mimpc

#endif  // MIMPC_CLI_HPP_
