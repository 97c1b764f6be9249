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

#ifndef MIMPC_NODE_LIST_HPP_
#define MIMPC_NODE_LIST_HPP_

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "mimpc/branching.hpp"
#include "mimpc/qp_solver.hpp"

namespace mimpc {

struct BranchDecision {
  int var = 0;
  BranchDirection dir = BranchDirection::kDown;
};

// Persistent list of the decisions and relaxation solutions from the root to
// a node. Nodes share their ancestors' records.
struct PathRecord {
  std::shared_ptr<const PathRecord> parent;
  std::optional<BranchDecision> decision;  // empty at the root
  std::optional<VectorXd> relaxation;
};

// Information for updating pseudo-costs once the node's relaxation is known.
struct BranchOrigin {
  int var = 0;
  BranchDirection dir = BranchDirection::kDown;
  double parent_objective = 0.0;
  double distance = 1.0;
};

struct Node {
  std::vector<BranchDecision> fixings;  // in branching order
  int depth = 0;
  double lower_bound = -kInf;  // inherited from the parent relaxation
  std::shared_ptr<const WarmStartHint> hint;
  std::int64_t seq = 0;
  std::optional<BranchOrigin> origin;
  std::shared_ptr<const PathRecord> path;  // record of the parent
  // Set when strong branching already proved this node infeasible.
  bool known_infeasible = false;
};

// Pending nodes. Pops LIFO until an incumbent exists, best bound afterwards.
class NodeList {
 public:
  // Assigns the creation sequence number.
  void Push(Node node);
  Node PopNext(bool has_incumbent);
  bool empty() const { return nodes_.empty(); }
  size_t size() const { return nodes_.size(); }
  const std::vector<Node>& nodes() const { return nodes_; }
  // Minimum inherited bound, +inf when empty.
  double MinBound() const;
  // Drops nodes whose inherited bound exceeds `threshold`; returns how many.
  int PruneAbove(double threshold);

 private:
  std::vector<Node> nodes_;
  std::int64_t next_seq_ = 0;
};

// Index into `nodes` of the node SelectNext would pop.
size_t SelectNextIndex(const std::vector<Node>& nodes, bool has_incumbent);

enum class PruneDecision { kPruneInfeasible, kPruneBound, kKeep };

PruneDecision PruneCheck(const QpResult& relaxation, double upper_bound, double eps_gap);

}  // namespace mimpc

#endif  // MIMPC_NODE_LIST_HPP_
