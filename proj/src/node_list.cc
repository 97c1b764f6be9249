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

#include "mimpc/node_list.hpp"

#include <algorithm>
#include <stdexcept>

namespace mimpc {

void NodeList::Push(Node node) {
  node.seq = next_seq_++;
  nodes_.push_back(std::move(node));
}

size_t SelectNextIndex(const std::vector<Node>& nodes, bool has_incumbent) {
  if (nodes.empty()) throw std::logic_error("select from empty node list");
  if (!has_incumbent) return nodes.size() - 1;
  size_t best = 0;
  for (size_t i = 1; i < nodes.size(); ++i) {
    const Node& a = nodes[i];
    const Node& b = nodes[best];
    if (a.lower_bound < b.lower_bound ||
        (a.lower_bound == b.lower_bound &&
         (a.depth > b.depth || (a.depth == b.depth && a.seq < b.seq)))) {
      best = i;
    }
  }
  return best;
}

Node NodeList::PopNext(bool has_incumbent) {
  const size_t i = SelectNextIndex(nodes_, has_incumbent);
  Node out = std::move(nodes_[i]);
  nodes_.erase(nodes_.begin() + static_cast<std::ptrdiff_t>(i));
  return out;
}

double NodeList::MinBound() const {
  double lb = kInf;
  for (const Node& n : nodes_) lb = std::min(lb, n.lower_bound);
  return lb;
}

int NodeList::PruneAbove(double threshold) {
  const size_t before = nodes_.size();
  std::erase_if(nodes_, [&](const Node& n) { return n.lower_bound > threshold; });
  return static_cast<int>(before - nodes_.size());
}

PruneDecision PruneCheck(const QpResult& relaxation, double upper_bound, double eps_gap) {
  if (relaxation.status == QpStatus::kInfeasible) return PruneDecision::kPruneInfeasible;
  if (relaxation.objective > upper_bound - eps_gap) return PruneDecision::kPruneBound;
  return PruneDecision::kKeep;
}

}  // namespace mimpc
