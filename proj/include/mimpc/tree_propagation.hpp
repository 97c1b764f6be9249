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

#ifndef MIMPC_TREE_PROPAGATION_HPP_
#define MIMPC_TREE_PROPAGATION_HPP_

#include <optional>
#include <vector>

#include "mimpc/branching.hpp"
#include "mimpc/node_list.hpp"
#include "mimpc/presolve.hpp"

namespace mimpc {

struct PathStep {
  ControlId var;
  BranchDirection dir = BranchDirection::kDown;
  // Relaxation solution of the node created by this decision, if known.
  std::optional<VectorXd> relaxation;
};

// The optimal root-to-leaf branching path of one MIQP solve and its
// incumbent, carried to the next MPC step.
struct WarmStartPath {
  int nu = 0;
  int horizon = 0;
  std::vector<PathStep> steps;
  std::optional<VectorXd> incumbent;
};

// Drops the first control stage of a stacked control vector and repeats the
// last stage, clamped to [lower, upper] when those are given.
VectorXd ShiftControls(const VectorXd& controls, int nu, const VectorXd* lower = nullptr,
                       const VectorXd* upper = nullptr);

// Moves every branched variable one stage earlier; stage-0 decisions fall
// off the horizon.
WarmStartPath ShiftPath(const WarmStartPath& path);

// Moves entries one stage earlier and lowers each count by `decay` (not
// below zero). Stage-0 entries are discarded.
PseudoCostTable ShiftPseudoCosts(const PseudoCostTable& table, int decay = 1);

struct WarmTreeConfig {
  double int_tol = 1e-6;
  double score_eps = kScoreEpsilon;
  int min_reliability = 1;
};

struct WarmTree {
  std::vector<Node> nodes;       // in push order; the on-path leaf is last
  std::vector<PathStep> path;    // filtered and re-ordered path
};

// Builds the warm-started node list from a shifted path and the solved root.
// Returns nullopt if the root relaxation is not optimal (cold start). Path
// variables that are integral at the root or lack pseudo-costs on either side
// are removed, the rest are re-ordered by descending pseudo-cost score, and
// the list holds each path node's off-path child plus the on-path leaf.
std::optional<WarmTree> BuildWarmTree(const WarmStartPath& shifted, const CondensedQp& qp,
                                      const QpResult& root_relaxation,
                                      const PseudoCostTable& table,
                                      const WarmTreeConfig& config = {},
                                      std::shared_ptr<const PathRecord> root_record = nullptr);

}  // namespace mimpc

#endif  // MIMPC_TREE_PROPAGATION_HPP_
