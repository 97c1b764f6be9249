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

#include "mimpc/branching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mimpc {

const PseudoCost* PseudoCostTable::Find(ControlId id) const {
  auto it = entries_.find(id);
  return it == entries_.end() ? nullptr : &it->second;
}

void PseudoCostTable::Observe(ControlId id, BranchDirection dir, double unit_gain) {
  PseudoCost& pc = entries_[id];
  double& phi = dir == BranchDirection::kUp ? pc.up : pc.down;
  int& n = dir == BranchDirection::kUp ? pc.up_count : pc.down_count;
  phi = (n * phi + unit_gain) / (n + 1);
  ++n;
  if (record_history_) {
    (dir == BranchDirection::kUp ? up_history_ : down_history_)[id].push_back(unit_gain);
  }
}

void UpdatePseudoCost(PseudoCostTable& table, ControlId id, BranchDirection dir,
                      double delta_objective, double distance) {
  if (!(distance > 0.0)) throw std::invalid_argument("pseudo-cost distance must be positive");
  table.Observe(id, dir, std::max(0.0, delta_objective) / distance);
}

double Score(double down_gain, double up_gain, double eps) {
  return std::max(up_gain, eps) * std::max(down_gain, eps);
}

double PseudoScore(double value, double phi_down, double phi_up, double eps) {
  return Score(value * phi_down, (1.0 - value) * phi_up, eps);
}

bool IsFractional(double value, double int_tol) {
  return std::min(value, 1.0 - value) > int_tol;
}

namespace {

double ChildGain(const QpResult& child, double parent_objective, double big_gain) {
  if (child.status == QpStatus::kInfeasible) return big_gain;
  return std::max(0.0, child.objective - parent_objective);
}

WarmStartHint HintFrom(const QpResult& res) {
  WarmStartHint hint;
  hint.primal = res.solution;
  hint.active_set = res.active_set;
  return hint;
}

}  // namespace

StrongBranchResult StrongBranch(const QpSolver& solver, const QpInstance& node,
                                const QpResult& relaxation, int var,
                                const BranchingConfig& config, PseudoCostTable* table) {
  const double value = relaxation.solution[var];
  const WarmStartHint hint = HintFrom(relaxation);
  QpOptions options;
  options.max_iterations = config.strong_iteration_cap;

  StrongBranchResult out;
  out.down = solver.Solve(UpdateBounds(node, {{var, 0.0, 0.0}}), hint, options);
  out.up = solver.Solve(UpdateBounds(node, {{var, 1.0, 1.0}}), hint, options);
  out.down_gain = ChildGain(out.down, relaxation.objective, config.big_gain);
  out.up_gain = ChildGain(out.up, relaxation.objective, config.big_gain);
  out.score = Score(out.down_gain, out.up_gain, config.score_eps);

  if (table) {
    const ControlId id = solver.qp().control_id(var);
    if (out.down.status == QpStatus::kOptimal) {
      UpdatePseudoCost(*table, id, BranchDirection::kDown,
                       out.down.objective - relaxation.objective, value);
    }
    if (out.up.status == QpStatus::kOptimal) {
      UpdatePseudoCost(*table, id, BranchDirection::kUp,
                       out.up.objective - relaxation.objective, 1.0 - value);
    }
  }
  return out;
}

std::vector<int> FractionalCandidates(const QpInstance& node, const QpResult& relaxation,
                                      double int_tol) {
  std::vector<int> out;
  for (int j : node.qp().binaries) {
    if (node.lower()[j] == node.upper()[j]) continue;
    if (IsFractional(relaxation.solution[j], int_tol)) out.push_back(j);
  }
  return out;
}

BranchCandidate SelectVariable(const QpSolver& solver, const QpInstance& node,
                               const QpResult& relaxation, PseudoCostTable& table,
                               const BranchingConfig& config, SelectionStats* stats) {
  const CondensedQp& qp = solver.qp();
  const std::vector<int> cands = FractionalCandidates(node, relaxation, config.int_tol);
  if (cands.empty()) throw std::invalid_argument("no fractional binary to branch on");

  struct Scored {
    int var;
    double value;
    double pseudo;
    bool unreliable;
  };
  std::vector<Scored> scored;
  for (int j : cands) {
    const double v = relaxation.solution[j];
    const PseudoCost* pc = table.Find(qp.control_id(j));
    const double pseudo = pc ? PseudoScore(v, pc->down, pc->up, config.score_eps)
                             : PseudoScore(v, 0.0, 0.0, config.score_eps);
    bool unreliable = false;
    switch (config.rule) {
      case BranchingRule::kStrong: unreliable = true; break;
      case BranchingRule::kPseudoCost: unreliable = false; break;
      case BranchingRule::kReliability:
        unreliable = (pc ? pc->reliability() : 0) <= config.reliability;
        break;
    }
    scored.push_back({j, v, pseudo, unreliable});
  }

  // Strong branching budget goes to the unreliable candidates with the best
  // pseudo-cost estimate. The pure strong rule evaluates every candidate.
  std::vector<size_t> order(scored.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return scored[a].pseudo > scored[b].pseudo;
  });
  std::vector<char> do_strong(scored.size(), 0);
  int budget = config.rule == BranchingRule::kStrong ? std::numeric_limits<int>::max()
                                                        : config.lookahead;
  for (size_t i : order) {
    if (scored[i].unreliable && budget > 0) {
      do_strong[i] = 1;
      --budget;
    }
  }

  BranchCandidate best;
  best.score = -1.0;
  for (size_t i = 0; i < scored.size(); ++i) {
    BranchCandidate c;
    c.var = scored[i].var;
    c.value = scored[i].value;
    if (do_strong[i]) {
      StrongBranchResult sb = StrongBranch(solver, node, relaxation, c.var, config, &table);
      c.score = sb.score;
      if (stats) {
        ++stats->strong_branched;
        stats->qp_solves += 2;
        stats->qp_iterations += sb.down.iterations + sb.up.iterations;
      }
      c.strong = std::move(sb);
    } else {
      c.score = scored[i].pseudo;
      if (stats) ++stats->pseudo_scored;
    }
    // Candidates are in ascending flat index, so strict '>' keeps the
    // lowest (stage, index) on ties.
    if (c.score > best.score) best = std::move(c);
  }
  return best;
}

}  // namespace mimpc
