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

#ifndef MIMPC_BRANCHING_HPP_
#define MIMPC_BRANCHING_HPP_

#include <map>
#include <optional>
#include <vector>

#include "mimpc/ocp_model.hpp"
#include "mimpc/qp_solver.hpp"

namespace mimpc {

enum class BranchDirection { kDown, kUp };

inline double BranchValue(BranchDirection dir) { return dir == BranchDirection::kUp ? 1.0 : 0.0; }
inline BranchDirection Opposite(BranchDirection dir) {
  return dir == BranchDirection::kUp ? BranchDirection::kDown : BranchDirection::kUp;
}

struct PseudoCost {
  double down = 0.0;  // average objective gain per unit when branching down
  double up = 0.0;
  int down_count = 0;
  int up_count = 0;

  int reliability() const { return std::min(down_count, up_count); }
};

// Per-binary pseudo-costs keyed by (stage, index), maintained as cumulative
// averages of the observed unit gains.
class PseudoCostTable {
 public:
  const PseudoCost* Find(ControlId id) const;
  PseudoCost& operator[](ControlId id) { return entries_[id]; }
  const std::map<ControlId, PseudoCost>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  size_t size() const { return entries_.size(); }

  // Folds one unit gain into the running mean of `id` in `dir`.
  void Observe(ControlId id, BranchDirection dir, double unit_gain);

  // Optional log of every observation, for checking the averaging property.
  void set_record_history(bool on) { record_history_ = on; }
  const std::map<ControlId, std::vector<double>>& history(BranchDirection dir) const {
    return dir == BranchDirection::kUp ? up_history_ : down_history_;
  }

 private:
  std::map<ControlId, PseudoCost> entries_;
  bool record_history_ = false;
  std::map<ControlId, std::vector<double>> down_history_;
  std::map<ControlId, std::vector<double>> up_history_;
};

// Folds delta_objective / distance into the table. Requires distance > 0;
// infeasible children must not be reported.
void UpdatePseudoCost(PseudoCostTable& table, ControlId id, BranchDirection dir,
                      double delta_objective, double distance);

inline constexpr double kScoreEpsilon = 1e-6;

// Product score max(up, eps) * max(down, eps).
double Score(double down_gain, double up_gain, double eps = kScoreEpsilon);

// Score of a fractional value using pseudo-cost estimates of both gains.
double PseudoScore(double value, double phi_down, double phi_up, double eps = kScoreEpsilon);

enum class BranchingRule { kReliability, kPseudoCost, kStrong };

struct BranchingConfig {
  BranchingRule rule = BranchingRule::kReliability;
  // Strong branching is used while min(n-, n+) <= reliability; may be +inf.
  double reliability = 2.0;
  double score_eps = kScoreEpsilon;
  double int_tol = 1e-6;
  double big_gain = 1e12;
  // Strong branching calls per node under kReliability.
  int lookahead = 8;
  int strong_iteration_cap = 25;
};

bool IsFractional(double value, double int_tol);

struct StrongBranchResult {
  double down_gain = 0.0;
  double up_gain = 0.0;
  double score = 0.0;
  QpResult down;
  QpResult up;
  bool down_infeasible() const { return down.status == QpStatus::kInfeasible; }
  bool up_infeasible() const { return up.status == QpStatus::kInfeasible; }
};

// Solves both children of `var` under a capped iteration budget and scores
// them. Feasible children update `table` when it is non-null.
StrongBranchResult StrongBranch(const QpSolver& solver, const QpInstance& node,
                                const QpResult& relaxation, int var,
                                const BranchingConfig& config, PseudoCostTable* table);

struct BranchCandidate {
  int var = -1;
  double value = 0.0;
  double score = 0.0;
  std::optional<StrongBranchResult> strong;
};

struct SelectionStats {
  int strong_branched = 0;
  int pseudo_scored = 0;
  int qp_solves = 0;
  int qp_iterations = 0;
};

// Binaries that are fractional in `relaxation` and not fixed by `node`.
std::vector<int> FractionalCandidates(const QpInstance& node, const QpResult& relaxation,
                                      double int_tol);

// Reliability branching. Returns the highest-scoring candidate; ties go to the
// lowest stage, then lowest index. Requires at least one fractional binary.
BranchCandidate SelectVariable(const QpSolver& solver, const QpInstance& node,
                               const QpResult& relaxation, PseudoCostTable& table,
                               const BranchingConfig& config, SelectionStats* stats = nullptr);

}  // namespace mimpc

#endif  // MIMPC_BRANCHING_HPP_
