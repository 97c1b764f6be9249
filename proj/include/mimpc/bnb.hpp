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

#ifndef MIMPC_BNB_HPP_
#define MIMPC_BNB_HPP_

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mimpc/branching.hpp"
#include "mimpc/node_list.hpp"
#include "mimpc/ocp_model.hpp"
#include "mimpc/presolve.hpp"
#include "mimpc/qp_solver.hpp"
#include "mimpc/tree_propagation.hpp"

namespace mimpc {

struct SolverConfig {
  double eps_gap = 1e-6;  // absolute
  // Maximum number of node relaxations per MIQP; 0 means unlimited.
  int max_iterations = 0;
  // Maximum number of pending nodes; 0 means unlimited.
  int node_memory_cap = 0;
  bool presolve = true;
  bool optimality_fixing = false;
  BranchingConfig branching;
  PropagationConfig propagation;
  QpOptions qp;
  // Record LB/UB after every node, for diagnostics and tests.
  bool record_bounds = false;
  // Keep every unit gain behind the pseudo-cost averages.
  bool record_pseudo_cost_history = false;
};

enum class Termination { kGapClosed, kIterationCap, kMemoryCap, kInfeasible };
const char* ToString(Termination t);

struct BoundSample {
  double lower = -kInf;
  double upper = kInf;
  bool best_first = false;
};

struct SolveStats {
  int nodes = 0;            // node relaxations solved
  int qp_solves = 0;        // every QP solve, including strong branching
  long qp_iterations = 0;
  int strong_branch_qps = 0;
  int presolve_fixings = 0;
  int optimality_fixings = 0;
  int infeasible_prunes = 0;
  int bound_prunes = 0;
  int qp_iteration_limits = 0;
  int warm_nodes = 0;
  bool warm_incumbent = false;
  double wall_ms = 0.0;
  double lower_bound = -kInf;  // condensed objective plus constant
  double upper_bound = kInf;
  Termination termination = Termination::kInfeasible;
  std::vector<int> branch_sequence;  // flat index of every branching variable
  std::vector<BoundSample> bounds;   // only with record_bounds
};

struct SolveArtifacts {
  std::vector<PathStep> path;
  std::optional<QpResult> root_relaxation;
  PseudoCostTable pseudo_costs;
  std::optional<VectorXd> incumbent;

  // Path and incumbent packaged for the next MPC step (not yet shifted).
  WarmStartPath warm_path(int nu, int horizon) const;
};

struct WarmStart {
  WarmStartPath path;          // already shifted
  PseudoCostTable pseudo_costs;  // already shifted
};

struct MiqpResult {
  std::optional<TrajectorySolution> solution;
  SolveStats stats;
  SolveArtifacts artifacts;
};

// Branch-and-bound on the condensed problem with domain propagation at every
// node, reliability branching, and depth-first search switching to best-first
// once an incumbent exists.
MiqpResult SolveMiqp(std::shared_ptr<const CondensedQp> qp, const WarmStart* warm,
                     const SolverConfig& config);
MiqpResult SolveMiqp(const OcpMiqp& prob, const VectorXd& initial_state, const WarmStart* warm,
                     const SolverConfig& config);

}  // namespace mimpc

#endif  // MIMPC_BNB_HPP_
