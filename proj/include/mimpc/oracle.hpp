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

#ifndef MIMPC_ORACLE_HPP_
#define MIMPC_ORACLE_HPP_

#include "mimpc/ocp_model.hpp"

namespace mimpc {

struct OracleResult {
  bool feasible = false;
  double objective = kInf;  // includes the constant term
  VectorXd controls;        // stacked, empty when infeasible
  long assignments = 0;
  long feasible_assignments = 0;
};

inline constexpr int kOracleMaxBinaries = 20;

// Enumerates every binary assignment and solves the remaining convex QP from
// a cold start. The first assignment (in binary counting order) attaining the
// minimum wins. Throws std::invalid_argument above kOracleMaxBinaries.
OracleResult BruteForceOracle(const CondensedQp& qp);
OracleResult BruteForceOracle(const OcpMiqp& prob, const VectorXd& initial_state);

}  // namespace mimpc

#endif  // MIMPC_ORACLE_HPP_
