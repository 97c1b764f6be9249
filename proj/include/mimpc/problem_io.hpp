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

#ifndef MIMPC_PROBLEM_IO_HPP_
#define MIMPC_PROBLEM_IO_HPP_

#include <stdexcept>
#include <string>

#include "mimpc/ocp_model.hpp"
#include "mimpc/tree_propagation.hpp"

namespace mimpc {

// Raised for unreadable or malformed problem files. `line` is 1-based and 0
// when the error is structural rather than syntactic; `where` names the
// offending field as a JSON path.
class ProblemFormatError : public std::runtime_error {
 public:
  ProblemFormatError(const std::string& message, int line, std::string where);
  int line() const { return line_; }
  const std::string& where() const { return where_; }

 private:
  int line_;
  std::string where_;
};

// JSON problem files ("format": "mimpc-ocp", "version": 1). Matrices are
// arrays of rows; infinite bounds are written as "inf" and "-inf". Output is
// deterministic and round-trips exactly.
OcpMiqp ParseProblem(const std::string& text);
std::string SerializeProblem(const OcpMiqp& prob);
OcpMiqp ReadProblem(const std::string& path);
void WriteProblem(const std::string& path, const OcpMiqp& prob);

std::string SerializeWarmStartPath(const WarmStartPath& path);
WarmStartPath ParseWarmStartPath(const std::string& text);

}  // namespace mimpc

#endif  // MIMPC_PROBLEM_IO_HPP_
