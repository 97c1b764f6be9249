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

#include "mimpc/tree_propagation.hpp"

#include <algorithm>

namespace mimpc {

VectorXd ShiftControls(const VectorXd& controls, int nu, const VectorXd* lower,
                       const VectorXd* upper) {
  const Eigen::Index n = controls.size();
  if (n < nu || nu <= 0) return controls;
  VectorXd out(n);
  out.head(n - nu) = controls.tail(n - nu);
  out.tail(nu) = controls.tail(nu);
  if (lower && upper) out = out.cwiseMax(*lower).cwiseMin(*upper);
  return out;
}

WarmStartPath ShiftPath(const WarmStartPath& path) {
  WarmStartPath out;
  out.nu = path.nu;
  out.horizon = path.horizon;
  for (const PathStep& s : path.steps) {
    if (s.var.stage - 1 < 0) continue;
    PathStep shifted{{s.var.stage - 1, s.var.index}, s.dir, std::nullopt};
    if (s.relaxation) shifted.relaxation = ShiftControls(*s.relaxation, path.nu);
    out.steps.push_back(std::move(shifted));
  }
  if (path.incumbent) out.incumbent = ShiftControls(*path.incumbent, path.nu);
  return out;
}

PseudoCostTable ShiftPseudoCosts(const PseudoCostTable& table, int decay) {
  PseudoCostTable out;
  for (const auto& [id, pc] : table.entries()) {
    if (id.stage < 1) continue;
    PseudoCost moved = pc;
    moved.down_count = std::max(0, pc.down_count - decay);
    moved.up_count = std::max(0, pc.up_count - decay);
    out[{id.stage - 1, id.index}] = moved;
  }
  return out;
}

std::optional<WarmTree> BuildWarmTree(const WarmStartPath& shifted, const CondensedQp& qp,
                                      const QpResult& root_relaxation,
                                      const PseudoCostTable& table,
                                      const WarmTreeConfig& config,
                                      std::shared_ptr<const PathRecord> root_record) {
  if (root_relaxation.status != QpStatus::kOptimal) return std::nullopt;

  struct Kept {
    const PathStep* step;
    int var;
    double score;
  };
  std::vector<Kept> kept;
  for (const PathStep& s : shifted.steps) {
    if (s.var.stage < 0 || s.var.stage >= qp.horizon || s.var.index < 0 || s.var.index >= qp.nu)
      continue;
    const int j = qp.flat_index(s.var);
    if (!qp.is_binary[j]) continue;
    const double v = root_relaxation.solution[j];
    if (!IsFractional(v, config.int_tol)) continue;
    const PseudoCost* pc = table.Find(s.var);
    if (!pc || pc->down_count < config.min_reliability || pc->up_count < config.min_reliability)
      continue;
    const bool dup = std::any_of(kept.begin(), kept.end(), [&](const Kept& k) { return k.var == j; });
    if (dup) continue;
    kept.push_back({&s, j, PseudoScore(v, pc->down, pc->up, config.score_eps)});
  }
  std::stable_sort(kept.begin(), kept.end(), [](const Kept& a, const Kept& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.var < b.var;
  });

  WarmTree tree;
  if (kept.empty()) return tree;

  auto root_hint = std::make_shared<WarmStartHint>();
  root_hint->primal = root_relaxation.solution;
  root_hint->active_set = root_relaxation.active_set;

  std::vector<BranchDecision> prefix;
  std::shared_ptr<const PathRecord> record = std::move(root_record);
  for (size_t k = 0; k < kept.size(); ++k) {
    const Kept& item = kept[k];
    Node sibling;
    sibling.fixings = prefix;
    sibling.fixings.push_back({item.var, Opposite(item.step->dir)});
    sibling.depth = static_cast<int>(k) + 1;
    sibling.lower_bound = root_relaxation.objective;
    sibling.hint = root_hint;
    sibling.path = record;
    tree.nodes.push_back(std::move(sibling));

    prefix.push_back({item.var, item.step->dir});
    auto rec = std::make_shared<PathRecord>();
    rec->parent = record;
    rec->decision = BranchDecision{item.var, item.step->dir};
    if (item.step->relaxation && item.step->relaxation->size() == qp.num_vars()) {
      rec->relaxation = item.step->relaxation->cwiseMax(qp.var_lower).cwiseMin(qp.var_upper);
    }
    tree.path.push_back(*item.step);
    if (k + 1 < kept.size()) record = rec;
    else record = rec->parent;
  }

  Node leaf;
  leaf.fixings = prefix;
  leaf.depth = static_cast<int>(kept.size());
  leaf.lower_bound = root_relaxation.objective;
  const PathStep& last = *kept.back().step;
  auto leaf_hint = std::make_shared<WarmStartHint>(*root_hint);
  if (last.relaxation && last.relaxation->size() == qp.num_vars()) {
    leaf_hint->primal = last.relaxation->cwiseMax(qp.var_lower).cwiseMin(qp.var_upper);
  } else if (shifted.incumbent && shifted.incumbent->size() == qp.num_vars()) {
    leaf_hint->primal = shifted.incumbent->cwiseMax(qp.var_lower).cwiseMin(qp.var_upper);
  }
  leaf.hint = leaf_hint;
  leaf.path = record;
  tree.nodes.push_back(std::move(leaf));
  return tree;
}

}  // namespace mimpc
